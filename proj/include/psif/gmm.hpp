// Diagonal-covariance Gaussian mixture fit by EM, with k-means++ seeding.
// The responsibilities are the soft cluster assignments P(c_k | w).
#pragma once

#include "psif/common.hpp"
#include "psif/io.hpp"
#include "psif/partition.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace psif {

struct SoftAssignment {
  Matrix means;  // K x d
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  Matrix responsibilities;  // |V| x K, rows sum to 1
  Vector mixing;            // K
  Matrix variances;         // K x d, diagonal covariances
  std::vector<double> loglik_history;
  int dim = 0;
  std::uint64_t seed = 0;

  int num_components() const { return static_cast<int>(means.rows()); }
};

namespace detail {

constexpr double kGmmVarianceFloor = 1e-6;

// log N(x | mu, diag var), all per-axis.
inline double log_diag_gaussian(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                                const Eigen::Ref<const Eigen::RowVectorXd>& mu,
                                const Eigen::Ref<const Eigen::RowVectorXd>& var) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  double acc = 0.0;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    const double diff = x[a] - mu[a];
    acc += kLog2Pi + std::log(var[a]) + diff * diff / var[a];
  }
  return -0.5 * acc;
}

// E-step over all points: fills responsibilities, returns total log-likelihood.
inline double gmm_e_step(const Matrix& data, const Matrix& means, const Matrix& variances,
                         const Vector& mixing, Matrix& resp) {
  const Eigen::Index n = data.rows();
  const Eigen::Index K = means.rows();
  double loglik = 0.0;
  Vector logpost(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    double maxv = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < K; ++j) {
      const double lp = mixing[j] > 0.0
                            ? std::log(mixing[j]) +
                                  log_diag_gaussian(data.row(i), means.row(j), variances.row(j))
                            : -std::numeric_limits<double>::infinity();
      logpost[j] = lp;
      if (lp > maxv) maxv = lp;
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      const double e = std::isfinite(logpost[j]) ? std::exp(logpost[j] - maxv) : 0.0;
      resp(i, j) = e;
      sum += e;
    }
    resp.row(i) /= sum;
    loglik += maxv + std::log(sum);
  }
  return loglik;
}

}  // namespace detail

inline SoftAssignment gmm_fit(const WordVectorTable& table, int K, int iters,
                              std::uint64_t seed) {
  const auto V = static_cast<Eigen::Index>(table.size());
  const int d = table.dim;
  if (K < 1) throw Error("gmm_fit: K must be positive");
  if (K > V) throw Error("K exceeds vocabulary size");
  if (iters < 1) throw Error("gmm_fit: iters must be positive");

  const Matrix& data = table.vectors;
  Rng rng(seed);

  // k-means++ seeding: first mean uniform, then D^2-weighted picks.
  Matrix means(K, d);
  {
    std::vector<double> dist2(table.size(), std::numeric_limits<double>::infinity());
    const auto first = static_cast<Eigen::Index>(rng.uniform_index(table.size()));
    means.row(0) = data.row(first);
    for (int j = 1; j < K; ++j) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < V; ++i) {
        const double d2 = (data.row(i) - means.row(j - 1)).squaredNorm();
        if (d2 < dist2[static_cast<std::size_t>(i)]) dist2[static_cast<std::size_t>(i)] = d2;
        total += dist2[static_cast<std::size_t>(i)];
      }
      Eigen::Index pick = 0;
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        pick = V - 1;
        for (Eigen::Index i = 0; i < V; ++i) {
          acc += dist2[static_cast<std::size_t>(i)];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.uniform_index(table.size()));
      }
      means.row(j) = data.row(pick);
    }
  }

  Vector mixing = Vector::Constant(K, 1.0 / static_cast<double>(K));
  Matrix variances(K, d);
  {
    const Eigen::RowVectorXd mean = data.colwise().mean();
    Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = 0; i < V; ++i) {
      var += (data.row(i) - mean).array().square().matrix();
    }
    var /= static_cast<double>(V);
    for (Eigen::Index a = 0; a < var.size(); ++a) {
      var[a] = std::max(var[a], detail::kGmmVarianceFloor);
    }
    for (int j = 0; j < K; ++j) variances.row(j) = var;
  }

  Matrix resp(V, K);
  std::vector<double> history;
  double ll_prev = -std::numeric_limits<double>::infinity();

  Matrix means_prev = means, variances_prev = variances, resp_prev;
  Vector mixing_prev = mixing;

  for (int it = 0; it <= iters; ++it) {
    const double ll = detail::gmm_e_step(data, means, variances, mixing, resp);
    if (it > 0 && ll < ll_prev) {
      // Variance flooring can nudge the likelihood down; keep the last
      // consistent state instead of recording a decrease.
      means = means_prev;
      variances = variances_prev;
      mixing = mixing_prev;
      resp = resp_prev;
      break;
    }
    history.push_back(ll);
    const bool converged = it > 0 && (ll - ll_prev) < 1e-7;
    ll_prev = ll;
    if (converged || it == iters) break;

    means_prev = means;
    variances_prev = variances;
    mixing_prev = mixing;
    resp_prev = resp;

    // M-step.
    for (int j = 0; j < K; ++j) {
      const double nk = resp.col(j).sum();
      if (!(nk > 1e-300)) {
        mixing[j] = 0.0;  // dead component, parameters kept
        continue;
      }
      mixing[j] = nk / static_cast<double>(V);
      Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
      for (Eigen::Index i = 0; i < V; ++i) mu += resp(i, j) * data.row(i);
      mu /= nk;
      Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
      for (Eigen::Index i = 0; i < V; ++i) {
        var += resp(i, j) * (data.row(i) - mu).array().square().matrix();
      }
      var /= nk;
      for (Eigen::Index a = 0; a < var.size(); ++a) {
        var[a] = std::max(var[a], detail::kGmmVarianceFloor);
      }
      means.row(j) = mu;
      variances.row(j) = var;
    }
  }

  SoftAssignment model;
  model.means = std::move(means);
  model.tokens = table.tokens;
  model.index = table.index;
  model.responsibilities = std::move(resp);
  model.mixing = std::move(mixing);
  model.variances = std::move(variances);
  model.loglik_history = std::move(history);
  model.dim = d;
  model.seed = seed;
  return model;
}

inline PartitionWeights as_partition_weights(const SoftAssignment& model) {
  PartitionWeights pw;
  pw.K = model.num_components();
  pw.tokens = model.tokens;
  pw.index = model.index;
  pw.weights = model.responsibilities;
  return pw;
}

inline constexpr const char* kGmmFormatVersion = "psif-gmm-v1";

inline void save_gmm(const std::string& dir, const SoftAssignment& model) {
  std::filesystem::create_directories(dir);
  std::string meta = std::string(kGmmFormatVersion) + "\tK=" +
                     std::to_string(model.num_components()) + "\td=" + std::to_string(model.dim) +
                     "\tseed=" + std::to_string(model.seed) + "\n";
  write_text_atomic(dir + "/meta.txt", meta);
  save_matrix(dir + "/means.tsv", model.means);
  std::string rows;
  for (std::size_t w = 0; w < model.tokens.size(); ++w) {
    rows += model.tokens[w];
    for (int j = 0; j < model.num_components(); ++j) {
      rows += '\t';
      rows += format_double(model.responsibilities(static_cast<Eigen::Index>(w), j));
    }
    rows += '\n';
  }
  write_text_atomic(dir + "/responsibilities.tsv", rows);
}

inline SoftAssignment load_gmm(const std::string& dir) {
  auto meta_in = detail::open_text(dir + "/meta.txt");
  std::string meta_line;
  std::getline(meta_in, meta_line);
  meta_line = detail::strip_cr(meta_line);
  auto fields = detail::split_char(meta_line, '\t');
  if (fields.empty() || fields[0] != kGmmFormatVersion) {
    throw Error("not a gmm model: " + dir);
  }
  SoftAssignment model;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    auto kv = detail::split_char(fields[i], '=');
    if (kv.size() != 2) throw Error("malformed gmm metadata");
    std::int64_t value = 0;
    if (!parse_int64(kv[1], value)) throw Error("malformed gmm metadata");
    if (kv[0] == "d") model.dim = static_cast<int>(value);
    else if (kv[0] == "seed") model.seed = static_cast<std::uint64_t>(value);
  }
  model.means = load_matrix(dir + "/means.tsv");
  if (model.means.cols() != model.dim) throw Error("gmm means do not match metadata dim");
  const int K = static_cast<int>(model.means.rows());

  auto in = detail::open_text(dir + "/responsibilities.tsv");
  std::vector<std::vector<double>> rows;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto parts = detail::split_char(line, '\t');
    if (static_cast<int>(parts.size()) != K + 1) {
      throw Error("malformed responsibility line: " + line);
    }
    std::vector<double> row(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j) {
      if (!parse_double(parts[static_cast<std::size_t>(j) + 1], row[static_cast<std::size_t>(j)])) {
        throw Error("malformed responsibility value: " + line);
      }
    }
    model.index.emplace(std::string(parts[0]), static_cast<int>(model.tokens.size()));
    model.tokens.emplace_back(parts[0]);
    rows.push_back(std::move(row));
  }
  model.responsibilities.resize(static_cast<Eigen::Index>(rows.size()), K);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < K; ++j) {
      model.responsibilities(static_cast<Eigen::Index>(r), j) = rows[r][static_cast<std::size_t>(j)];
    }
  }
  model.mixing = Vector::Constant(K, 1.0 / static_cast<double>(K));
  model.variances = Matrix::Constant(K, model.dim, detail::kGmmVarianceFloor);
  return model;
}

}  // namespace psif
