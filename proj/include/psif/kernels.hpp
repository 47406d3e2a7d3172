// Document-similarity kernels over word vectors and topic vectors:
// plain averaging, topical word embedding, partitioned averaging and
// relaxed word-mover similarity.
#pragma once

#include "psif/common.hpp"
#include "psif/io.hpp"
#include "psif/partition.hpp"

#include <limits>
#include <string>
#include <vector>

namespace psif {

enum class KernelKind { k1_avg, k2_twe, k3_psif, k4_rwmd };

inline KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "k1") return KernelKind::k1_avg;
  if (name == "k2") return KernelKind::k2_twe;
  if (name == "k3") return KernelKind::k3_psif;
  if (name == "k4") return KernelKind::k4_rwmd;
  throw Error("unknown kernel kind: " + name + " (expected k1|k2|k3|k4)");
}

inline bool kernel_needs_weights(KernelKind kind) {
  return kind == KernelKind::k2_twe || kind == KernelKind::k3_psif;
}

namespace detail {

// In-vocabulary token rows, with multiplicity.
inline std::vector<int> vocab_rows(const std::vector<std::string>& doc,
                                   const WordVectorTable& table) {
  std::vector<int> rows;
  rows.reserve(doc.size());
  for (const auto& token : doc) {
    auto it = table.index.find(token);
    if (it != table.index.end()) rows.push_back(it->second);
  }
  return rows;
}

}  // namespace detail

// The four kernels; K4 is asymmetric (words of doc_a matched into doc_b).
// `weights` is required for k2/k3 and ignored otherwise.
inline double kernel(KernelKind kind, const std::vector<std::string>& doc_a,
                     const std::vector<std::string>& doc_b, const WordVectorTable& table,
                     const PartitionWeights* weights = nullptr) {
  const auto rows_a = detail::vocab_rows(doc_a, table);
  const auto rows_b = detail::vocab_rows(doc_b, table);
  if (rows_a.empty() || rows_b.empty()) {
    throw Error("kernel undefined on empty document");
  }
  if (kernel_needs_weights(kind) && weights == nullptr) {
    throw Error("kernel requires partition weights");
  }

  // Topic-vector row for the word at vector-table row r.
  const auto topic_row = [&](int r) -> Eigen::Index {
    const std::string& token = table.tokens[static_cast<std::size_t>(r)];
    return weights->row_of(token);
  };

  const double n = static_cast<double>(rows_a.size());
  const double m = static_cast<double>(rows_b.size());
  double acc = 0.0;
  switch (kind) {
    case KernelKind::k1_avg:
      for (int ra : rows_a) {
        for (int rb : rows_b) acc += table.vectors.row(ra).dot(table.vectors.row(rb));
      }
      return acc / (n * m);
    case KernelKind::k2_twe:
      for (int ra : rows_a) {
        for (int rb : rows_b) {
          acc += table.vectors.row(ra).dot(table.vectors.row(rb)) +
                 weights->weights.row(topic_row(ra)).dot(weights->weights.row(topic_row(rb)));
        }
      }
      return acc / (n * m);
    case KernelKind::k3_psif:
      for (int ra : rows_a) {
        for (int rb : rows_b) {
          acc += table.vectors.row(ra).dot(table.vectors.row(rb)) *
                 weights->weights.row(topic_row(ra)).dot(weights->weights.row(topic_row(rb)));
        }
      }
      return acc / (n * m);
    case KernelKind::k4_rwmd:
      for (int ra : rows_a) {
        double best = -std::numeric_limits<double>::infinity();
        for (int rb : rows_b) {
          const double dot = table.vectors.row(ra).dot(table.vectors.row(rb));
          if (dot > best) best = dot;  // ties keep the lowest index
        }
        acc += best;
      }
      return acc / n;
  }
  throw Error("unreachable kernel kind");
}

// Pairwise kernel over a corpus. k1-k3 are filled symmetrically from the
// upper triangle; k4 is evaluated in both directions and not symmetrized.
inline Matrix kernel_matrix(KernelKind kind, const Corpus& corpus, const WordVectorTable& table,
                            const PartitionWeights* weights = nullptr, int threads = 1) {
  const auto N = static_cast<Eigen::Index>(corpus.size());
  Matrix out(N, N);
  const bool symmetric = kind != KernelKind::k4_rwmd;
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = symmetric ? r : 0; c < N; ++c) {
      out(r, c) = kernel(kind, corpus.documents[i], corpus.documents[static_cast<std::size_t>(c)],
                         table, weights);
      if (symmetric) out(c, r) = out(r, c);
    }
  });
  return out;
}

}  // namespace psif
