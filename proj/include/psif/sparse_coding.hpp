// Sparse dictionary learning over word vectors: orthogonal matching
// pursuit for the coding stage and k-SVD rank-1 atom updates.
#pragma once

#include "psif/common.hpp"
#include "psif/io.hpp"
#include "psif/partition.hpp"
#include "psif/svd.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace psif {

struct Dictionary {
  Matrix atoms;  // K x d, unit-norm rows
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  // Sparse coefficient rows, (atom index, value) sorted by index.
  std::vector<std::vector<std::pair<int, double>>> coefficients;
  std::vector<double> residual_norms;
  int sparsity_k = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> mse_history;  // mean squared residual after each iteration

  int num_atoms() const { return static_cast<int>(atoms.rows()); }
};

// Greedy OMP: pick the atom most correlated with the residual, then jointly
// refit all selected coefficients by least squares. Stops after k picks or
// when the residual norm drops below 1e-12.
inline Vector omp_sparse_code(const Vector& v, const Matrix& atoms, int k) {
  const int K = static_cast<int>(atoms.rows());
  if (k < 1 || k > K) throw Error("omp_sparse_code: k must satisfy 1 <= k <= K");
  if (!v.allFinite()) throw Error("omp_sparse_code: non-finite input vector");
  if (v.size() != atoms.cols()) throw Error("omp_sparse_code: dimension mismatch");

  Vector coeffs = Vector::Zero(K);
  Vector residual = v;
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(k));
  std::vector<char> selected(static_cast<std::size_t>(K), 0);

  for (int step = 0; step < k; ++step) {
    if (residual.norm() < 1e-12) break;
    int best = -1;
    double best_corr = -1.0;
    for (int j = 0; j < K; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double corr = std::abs(atoms.row(j).dot(residual));
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best < 0) break;  // all atoms selected
    selected[static_cast<std::size_t>(best)] = 1;
    support.push_back(best);

    Matrix basis(v.size(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
      basis.col(static_cast<Eigen::Index>(s)) = atoms.row(support[s]).transpose();
    }
    const Vector c = basis.colPivHouseholderQr().solve(v);
    residual = v - basis * c;
    for (std::size_t s = 0; s < support.size(); ++s) coeffs[support[s]] = c[static_cast<Eigen::Index>(s)];
  }
  return coeffs;
}

// Called after every k-SVD iteration with the current state.
using KsvdObserver =
    std::function<void(int iteration, const Matrix& atoms, const Matrix& coefficients, double mse)>;

inline Dictionary ksvd_fit(const WordVectorTable& table, int K, int k, int iters,
                           std::uint64_t seed, int threads = 1,
                           const KsvdObserver& observer = nullptr) {
  const auto V = static_cast<Eigen::Index>(table.size());
  const int d = table.dim;
  if (K < 1) throw Error("ksvd_fit: K must be positive");
  if (K > V) throw Error("K exceeds vocabulary size");
  if (k < 1 || k > K) throw Error("ksvd_fit: k must satisfy 1 <= k <= K");
  if (iters < 1) throw Error("ksvd_fit: iters must be positive");

  Rng rng(seed);
  Matrix atoms(K, d);
  {
    const auto init = rng.sample_without_replacement(table.size(), static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j) {
      Vector a = table.vectors.row(static_cast<Eigen::Index>(init[static_cast<std::size_t>(j)])).transpose();
      const double n = a.norm();
      if (n > 0.0) {
        atoms.row(j) = a.transpose() / n;
      } else {
        atoms.row(j).setZero();
        atoms(j, j % d) = 1.0;
      }
    }
  }

  Matrix alpha = Matrix::Zero(V, K);
  Matrix residuals = table.vectors;  // v_w - alpha_w * atoms
  std::vector<double> mse_history;
  mse_history.reserve(static_cast<std::size_t>(iters));

  for (int it = 0; it < iters; ++it) {
    // Coding stage. A word keeps its previous code when the fresh OMP code
    // would fit worse under the current atoms; this is what makes the
    // reconstruction error nonincreasing for arbitrary inputs.
    parallel_for(static_cast<std::size_t>(V), threads, [&](std::size_t w) {
      const auto row = static_cast<Eigen::Index>(w);
      const Vector v = table.vectors.row(row).transpose();
      const Vector code = omp_sparse_code(v, atoms, k);
      const Vector res = v - atoms.transpose() * code;
      if (res.squaredNorm() <= residuals.row(row).squaredNorm()) {
        alpha.row(row) = code.transpose();
        residuals.row(row) = res.transpose();
      }
    });

    // Atom update stage, sequential over atoms.
    std::vector<char> claimed(table.size(), 0);
    for (int j = 0; j < K; ++j) {
      std::vector<Eigen::Index> users;
      for (Eigen::Index w = 0; w < V; ++w) {
        if (alpha(w, j) != 0.0) users.push_back(w);
      }
      if (users.empty()) {
        // Dead atom: reseed from the worst-reconstructed word. Each word is
        // claimed at most once per pass so two dead atoms cannot collide.
        Eigen::Index worst = -1;
        double worst_norm = -1.0;
        for (Eigen::Index w = 0; w < V; ++w) {
          if (claimed[static_cast<std::size_t>(w)]) continue;
          const double rn = residuals.row(w).norm();
          if (rn > worst_norm) {
            worst_norm = rn;
            worst = w;
          }
        }
        if (worst >= 0 && worst_norm > 0.0) {
          claimed[static_cast<std::size_t>(worst)] = 1;
          Vector a = table.vectors.row(worst).transpose();
          atoms.row(j) = a.transpose() / a.norm();
          Vector arow = atoms.row(j).transpose();
          fix_sign_by_first_nonzero(arow);
          atoms.row(j) = arow.transpose();
        }
        continue;
      }

      Matrix error(static_cast<Eigen::Index>(users.size()), d);
      for (std::size_t u = 0; u < users.size(); ++u) {
        error.row(static_cast<Eigen::Index>(u)) =
            residuals.row(users[u]) + alpha(users[u], j) * atoms.row(j);
      }
      Rank1Fit fit = dominant_singular_pair(error, atoms.row(j).transpose(), 100, 1e-10);
      if (fit.sigma > 0.0) {
        fix_sign_by_first_nonzero(fit.right, &fit.left);
        atoms.row(j) = fit.right.transpose();
        for (std::size_t u = 0; u < users.size(); ++u) {
          const double c = fit.sigma * fit.left[static_cast<Eigen::Index>(u)];
          alpha(users[u], j) = c;
          residuals.row(users[u]) =
              error.row(static_cast<Eigen::Index>(u)) - c * atoms.row(j);
        }
      } else {
        // Rows using this atom are exactly explained by the others.
        for (std::size_t u = 0; u < users.size(); ++u) {
          alpha(users[u], j) = 0.0;
          residuals.row(users[u]) = error.row(static_cast<Eigen::Index>(u));
        }
      }
    }

    double sq = 0.0;
    for (Eigen::Index w = 0; w < V; ++w) sq += residuals.row(w).squaredNorm();
    mse_history.push_back(sq / static_cast<double>(V));
    if (observer) observer(it, atoms, alpha, mse_history.back());
  }

  Dictionary dict;
  dict.atoms = std::move(atoms);
  dict.tokens = table.tokens;
  dict.index = table.index;
  dict.sparsity_k = k;
  dict.dim = d;
  dict.seed = seed;
  dict.mse_history = std::move(mse_history);
  dict.coefficients.resize(table.size());
  dict.residual_norms.resize(table.size());
  for (Eigen::Index w = 0; w < V; ++w) {
    auto& row = dict.coefficients[static_cast<std::size_t>(w)];
    for (int j = 0; j < K; ++j) {
      if (alpha(w, j) != 0.0) row.emplace_back(j, alpha(w, j));
    }
    dict.residual_norms[static_cast<std::size_t>(w)] = residuals.row(w).norm();
  }
  return dict;
}

inline PartitionWeights as_partition_weights(const Dictionary& dict) {
  PartitionWeights pw;
  pw.K = dict.num_atoms();
  pw.tokens = dict.tokens;
  pw.index = dict.index;
  pw.weights = Matrix::Zero(static_cast<Eigen::Index>(dict.tokens.size()), pw.K);
  for (std::size_t w = 0; w < dict.coefficients.size(); ++w) {
    for (const auto& [j, value] : dict.coefficients[w]) {
      pw.weights(static_cast<Eigen::Index>(w), j) = value;
    }
  }
  return pw;
}

inline constexpr const char* kDictionaryFormatVersion = "psif-dictionary-v1";

inline void save_dictionary(const std::string& dir, const Dictionary& dict) {
  std::filesystem::create_directories(dir);
  std::string meta = std::string(kDictionaryFormatVersion) + "\tK=" +
                     std::to_string(dict.num_atoms()) + "\tk=" + std::to_string(dict.sparsity_k) +
                     "\td=" + std::to_string(dict.dim) + "\tseed=" + std::to_string(dict.seed) + "\n";
  write_text_atomic(dir + "/meta.txt", meta);
  save_matrix(dir + "/atoms.tsv", dict.atoms);
  std::string coeffs;
  for (std::size_t w = 0; w < dict.tokens.size(); ++w) {
    coeffs += dict.tokens[w];
    coeffs += '\t';
    bool first = true;
    for (const auto& [j, value] : dict.coefficients[w]) {
      if (!first) coeffs += ',';
      first = false;
      coeffs += std::to_string(j);
      coeffs += ':';
      coeffs += format_double(value);
    }
    coeffs += '\n';
  }
  write_text_atomic(dir + "/coefficients.tsv", coeffs);
}

inline Dictionary load_dictionary(const std::string& dir) {
  auto meta_in = detail::open_text(dir + "/meta.txt");
  std::string meta_line;
  std::getline(meta_in, meta_line);
  meta_line = detail::strip_cr(meta_line);
  auto fields = detail::split_char(meta_line, '\t');
  if (fields.empty() || fields[0] != kDictionaryFormatVersion) {
    throw Error("not a dictionary model: " + dir);
  }
  Dictionary dict;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    auto kv = detail::split_char(fields[i], '=');
    if (kv.size() != 2) throw Error("malformed dictionary metadata");
    std::int64_t value = 0;
    if (!parse_int64(kv[1], value)) throw Error("malformed dictionary metadata");
    if (kv[0] == "k") dict.sparsity_k = static_cast<int>(value);
    else if (kv[0] == "d") dict.dim = static_cast<int>(value);
    else if (kv[0] == "seed") dict.seed = static_cast<std::uint64_t>(value);
  }
  dict.atoms = load_matrix(dir + "/atoms.tsv");
  if (dict.atoms.cols() != dict.dim) throw Error("dictionary atoms do not match metadata dim");

  auto in = detail::open_text(dir + "/coefficients.tsv");
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto parts = detail::split_char(line, '\t');
    if (parts.size() != 2) throw Error("malformed coefficient line: " + line);
    const std::string token(parts[0]);
    std::vector<std::pair<int, double>> row;
    if (!parts[1].empty()) {
      for (auto entry : detail::split_char(parts[1], ',')) {
        auto iv = detail::split_char(entry, ':');
        std::int64_t idx = 0;
        double value = 0.0;
        if (iv.size() != 2 || !parse_int64(iv[0], idx) || !parse_double(iv[1], value)) {
          throw Error("malformed coefficient entry: " + std::string(entry));
        }
        if (idx < 0 || idx >= dict.atoms.rows()) throw Error("coefficient atom index out of range");
        row.emplace_back(static_cast<int>(idx), value);
      }
    }
    dict.index.emplace(token, static_cast<int>(dict.tokens.size()));
    dict.tokens.push_back(token);
    dict.coefficients.push_back(std::move(row));
  }
  dict.residual_norms.assign(dict.tokens.size(), 0.0);  // not persisted
  return dict;
}

}  // namespace psif
