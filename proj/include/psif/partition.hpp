// PartitionWeights: the unified per-word topic-weight table produced by
// either partitioner (k-SVD coefficients or GMM responsibilities).
#pragma once

#include "psif/common.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace psif {

struct PartitionWeights {
  int K = 0;
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  Matrix weights;  // |V| x K

  bool contains(const std::string& token) const { return index.count(token) != 0; }
  int row_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) throw Error("token has no partition weights: " + token);
    return it->second;
  }
  std::size_t size() const { return tokens.size(); }
};

// K=1 with weight 1 for every token: partitioned averaging collapses to
// plain SIF averaging.
inline PartitionWeights uniform_weights(const std::vector<std::string>& tokens) {
  PartitionWeights pw;
  pw.K = 1;
  pw.tokens = tokens;
  pw.weights = Matrix::Ones(static_cast<Eigen::Index>(tokens.size()), 1);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    pw.index.emplace(tokens[i], static_cast<int>(i));
  }
  return pw;
}

}  // namespace psif
