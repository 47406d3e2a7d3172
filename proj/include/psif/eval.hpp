// Evaluation harness: Pearson correlation for STS, a deterministic
// logistic-regression trainer over fixed embeddings, multiclass and
// multilabel metrics, and cross-validated hyperparameter selection.
#pragma once

#include "psif/common.hpp"
#include "psif/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace psif {

// ---------------------------------------------------------------------------
// Correlation and STS
// ---------------------------------------------------------------------------

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  if (x.size() < 2) throw Error("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("undefined correlation");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

struct StsPair {
  std::vector<std::string> sentence_a;
  std::vector<std::string> sentence_b;
  double gold = 0.0;
};

struct StsPairSet {
  std::vector<StsPair> pairs;
};

// TSV `sentence_a<TAB>sentence_b<TAB>gold`, sentences tokenized on whitespace.
inline StsPairSet load_sts_pairs(const std::string& path, bool lowercase = false) {
  auto in = detail::open_text(path);
  StsPairSet set;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto parts = detail::split_char(line, '\t');
    StsPair pair;
    if (parts.size() != 3 || !parse_double(parts[2], pair.gold) || !std::isfinite(pair.gold)) {
      throw Error("malformed STS pair at line " + std::to_string(line_no));
    }
    for (auto tok : detail::split_ws(parts[0])) {
      pair.sentence_a.push_back(lowercase ? detail::lowercase_ascii(tok) : std::string(tok));
    }
    for (auto tok : detail::split_ws(parts[1])) {
      pair.sentence_b.push_back(lowercase ? detail::lowercase_ascii(tok) : std::string(tok));
    }
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

struct StsResult {
  double r = 0.0;
  std::size_t dropped = 0;  // pairs with a zero-vector side
  std::size_t used = 0;
};

// Predicted similarity is the cosine of the two embeddings; pairs where
// either side embeds to the zero vector are dropped and counted.
inline StsResult sts_evaluate(
    const StsPairSet& set,
    const std::function<Vector(const std::vector<std::string>&)>& embed) {
  std::vector<double> pred, gold;
  StsResult result;
  for (const auto& pair : set.pairs) {
    const Vector ea = embed(pair.sentence_a);
    const Vector eb = embed(pair.sentence_b);
    const double na = ea.norm(), nb = eb.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
      ++result.dropped;
      continue;
    }
    pred.push_back(ea.dot(eb) / (na * nb));
    gold.push_back(pair.gold);
  }
  if (pred.size() < 2) throw Error("fewer than 2 usable STS pairs");
  result.used = pred.size();
  result.r = pearson(pred, gold);
  return result;
}

// ---------------------------------------------------------------------------
// Logistic-regression trainer (multinomial and one-vs-rest)
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix augment_ones(const Matrix& X) {
  Matrix Xa(X.rows(), X.cols() + 1);
  Xa.leftCols(X.cols()) = X;
  Xa.col(X.cols()).setOnes();
  return Xa;
}

// Softmax cross-entropy over augmented features; bias row unpenalized.
// W is (D+1) x C.
inline double multiclass_loss_grad(const Matrix& Xa, const std::vector<int>& y, const Matrix& W,
                                   double l2, Matrix* grad) {
  const Eigen::Index N = Xa.rows();
  const Eigen::Index C = W.cols();
  Matrix Z = Xa * W;  // N x C
  double loss = 0.0;
  Matrix P(N, C);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double zmax = Z.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < C; ++c) {
      P(i, c) = std::exp(Z(i, c) - zmax);
      sum += P(i, c);
    }
    P.row(i) /= sum;
    loss -= Z(i, y[static_cast<std::size_t>(i)]) - zmax - std::log(sum);
  }
  loss /= static_cast<double>(N);
  Matrix Wpen = W;
  Wpen.row(W.rows() - 1).setZero();
  loss += 0.5 * l2 * Wpen.squaredNorm();
  if (grad) {
    Matrix D = P;
    for (Eigen::Index i = 0; i < N; ++i) D(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    *grad = Xa.transpose() * D / static_cast<double>(N) + l2 * Wpen;
  }
  return loss;
}

// Independent binary logistic losses, mean over all N*L cells. W is (D+1) x L.
inline double ovr_loss_grad(const Matrix& Xa, const Matrix& Y, const Matrix& W, double l2,
                            Matrix* grad) {
  const Eigen::Index N = Xa.rows();
  const Eigen::Index L = W.cols();
  Matrix Z = Xa * W;
  double loss = 0.0;
  Matrix S(N, L);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index l = 0; l < L; ++l) {
      const double z = Z(i, l);
      // log(1 + e^z) - y z, evaluated stably.
      loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - Y(i, l) * z;
      S(i, l) = 1.0 / (1.0 + std::exp(-z));
    }
  }
  const double scale = static_cast<double>(N) * static_cast<double>(L);
  loss /= scale;
  Matrix Wpen = W;
  Wpen.row(W.rows() - 1).setZero();
  loss += 0.5 * l2 * Wpen.squaredNorm();
  if (grad) *grad = Xa.transpose() * (S - Y) / scale + l2 * Wpen;
  return loss;
}

// Full-batch gradient descent with step halving whenever a step would
// increase the loss; the recorded loss history is therefore nonincreasing.
template <typename LossGrad>
inline std::vector<double> descend(Matrix& W, int epochs, const LossGrad& loss_grad) {
  double step = 1.0;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(epochs) + 1);
  Matrix grad;
  double loss = loss_grad(W, &grad);
  history.push_back(loss);
  for (int e = 0; e < epochs; ++e) {
    bool moved = false;
    while (step >= 1e-18) {
      Matrix Wc = W - step * grad;
      Matrix grad_c;
      const double loss_c = loss_grad(Wc, &grad_c);
      if (loss_c <= loss) {
        W = std::move(Wc);
        grad = std::move(grad_c);
        loss = loss_c;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // step underflow: at a numerical minimum
    history.push_back(loss);
  }
  return history;
}

}  // namespace detail

struct TrainResult {
  Matrix W;  // (D+1) x C, last row is the bias
  std::vector<double> loss_history;
};

// Multinomial logistic regression; `seed` is part of the contract for
// reproducibility but the zero initialization makes training deterministic
// regardless.
inline TrainResult train_linear_classifier(const Matrix& X, const std::vector<int>& y,
                                           int num_classes, double l2, int epochs,
                                           std::uint64_t /*seed*/ = 0) {
  if (X.rows() != static_cast<Eigen::Index>(y.size())) throw Error("train: shape mismatch");
  if (X.rows() < 1) throw Error("train: empty input");
  std::set<int> distinct(y.begin(), y.end());
  if (num_classes < 2 || distinct.size() < 2) throw Error("degenerate single-class input");
  for (int label : y) {
    if (label < 0 || label >= num_classes) throw Error("label index out of range");
  }
  if (!X.allFinite()) throw Error("train: non-finite features");
  const Matrix Xa = detail::augment_ones(X);
  TrainResult result;
  result.W = Matrix::Zero(Xa.cols(), num_classes);
  result.loss_history = detail::descend(result.W, epochs, [&](const Matrix& W, Matrix* g) {
    return detail::multiclass_loss_grad(Xa, y, W, l2, g);
  });
  return result;
}

// One-vs-rest logistic regression for multilabel data; Y is N x L binary.
inline TrainResult train_one_vs_rest(const Matrix& X, const Matrix& Y, double l2, int epochs,
                                     std::uint64_t /*seed*/ = 0) {
  if (X.rows() != Y.rows()) throw Error("train: shape mismatch");
  if (Y.cols() < 1) throw Error("train: no labels");
  if (!X.allFinite()) throw Error("train: non-finite features");
  const Matrix Xa = detail::augment_ones(X);
  TrainResult result;
  result.W = Matrix::Zero(Xa.cols(), Y.cols());
  result.loss_history = detail::descend(result.W, epochs, [&](const Matrix& W, Matrix* g) {
    return detail::ovr_loss_grad(Xa, Y, W, l2, g);
  });
  return result;
}

inline std::vector<int> predict_classes(const Matrix& W, const Matrix& X) {
  const Matrix Z = detail::augment_ones(X) * W;
  std::vector<int> out(static_cast<std::size_t>(Z.rows()));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Eigen::Index best = 0;
    Z.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

inline Matrix predict_scores_ovr(const Matrix& W, const Matrix& X) {
  Matrix Z = detail::augment_ones(X) * W;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index l = 0; l < Z.cols(); ++l) Z(i, l) = 1.0 / (1.0 + std::exp(-Z(i, l)));
  }
  return Z;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct MulticlassMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// Macro averages run over the union of classes observed in gold or pred;
// empty precision/recall cells (0/0) count as 0.
inline MulticlassMetrics multiclass_metrics(const std::vector<int>& pred,
                                            const std::vector<int>& gold) {
  if (pred.size() != gold.size()) throw Error("metrics: length mismatch");
  if (pred.empty()) throw Error("metrics: empty input");
  std::set<int> classes(gold.begin(), gold.end());
  classes.insert(pred.begin(), pred.end());
  std::map<int, std::array<std::size_t, 3>> cm;  // class -> {tp, fp, fn}
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) {
      ++correct;
      ++cm[pred[i]][0];
    } else {
      ++cm[pred[i]][1];
      ++cm[gold[i]][2];
    }
  }
  MulticlassMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  for (int c : classes) {
    const auto& [tp, fp, fn] = cm[c];
    const double p = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double r = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.macro_precision += p;
    m.macro_recall += r;
    m.macro_f1 += (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
  }
  const double nc = static_cast<double>(classes.size());
  m.macro_precision /= nc;
  m.macro_recall /= nc;
  m.macro_f1 /= nc;
  return m;
}

struct MultilabelMetrics {
  double precision_at_k = 0.0;
  double ndcg_at_k = 0.0;
  double coverage_error = 0.0;
  double lrap = 0.0;
  double micro_f1 = 0.0;
  std::size_t skipped_rows = 0;  // rows without positives, skipped for P@k/nDCG/LRAP
};

// Ranking metrics with ties broken by ascending label index. Rows without a
// positive label are skipped for Precision@k, nDCG@k and LRAP (and counted);
// they contribute 0 to coverage error.
inline MultilabelMetrics multilabel_metrics(const Matrix& scores, const Matrix& gold, int k) {
  if (scores.rows() != gold.rows() || scores.cols() != gold.cols()) {
    throw Error("multilabel metrics: shape mismatch");
  }
  const Eigen::Index N = scores.rows();
  const Eigen::Index L = scores.cols();
  if (N < 1 || L < 1) throw Error("multilabel metrics: empty input");
  if (k < 1 || k > L) throw Error("multilabel metrics: k must satisfy 1 <= k <= L");

  MultilabelMetrics m;
  double sum_p_at_k = 0.0, sum_ndcg = 0.0, sum_cov = 0.0, sum_lrap = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::size_t ranked_rows = 0;

  std::vector<int> order(static_cast<std::size_t>(L));
  for (Eigen::Index i = 0; i < N; ++i) {
    Eigen::Index positives = 0;
    for (Eigen::Index l = 0; l < L; ++l) {
      const bool g = gold(i, l) != 0.0;
      const bool p = scores(i, l) >= 0.5;
      if (g && p) ++tp;
      else if (!g && p) ++fp;
      else if (g && !p) ++fn;
      if (g) ++positives;
    }
    if (positives == 0) {
      ++m.skipped_rows;
      continue;  // contributes 0 to coverage
    }
    ++ranked_rows;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scores(i, a) > scores(i, b);  // equal scores keep index order
    });

    Eigen::Index hits = 0;
    double dcg = 0.0, idcg = 0.0, lrap_row = 0.0;
    Eigen::Index worst_rank = 0, seen_pos = 0;
    for (Eigen::Index pos = 0; pos < L; ++pos) {
      const int label = order[static_cast<std::size_t>(pos)];
      const bool g = gold(i, label) != 0.0;
      const Eigen::Index rank = pos + 1;
      if (g) {
        ++seen_pos;
        worst_rank = rank;
        lrap_row += static_cast<double>(seen_pos) / static_cast<double>(rank);
        if (rank <= k) {
          ++hits;
          dcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
        }
      }
      if (rank <= std::min<Eigen::Index>(k, positives)) {
        idcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
      }
    }
    sum_p_at_k += static_cast<double>(hits) / static_cast<double>(k);
    sum_ndcg += dcg / idcg;
    sum_cov += static_cast<double>(worst_rank);
    sum_lrap += lrap_row / static_cast<double>(positives);
  }

  if (ranked_rows > 0) {
    m.precision_at_k = sum_p_at_k / static_cast<double>(ranked_rows);
    m.ndcg_at_k = sum_ndcg / static_cast<double>(ranked_rows);
    m.lrap = sum_lrap / static_cast<double>(ranked_rows);
  }
  m.coverage_error = sum_cov / static_cast<double>(N);
  const double denom_p = static_cast<double>(tp + fp);
  const double denom_r = static_cast<double>(tp + fn);
  const double micro_p = denom_p > 0.0 ? static_cast<double>(tp) / denom_p : 0.0;
  const double micro_r = denom_r > 0.0 ? static_cast<double>(tp) / denom_r : 0.0;
  m.micro_f1 = (micro_p + micro_r > 0.0) ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct CvPoint {
  double l2 = 0.0;
  int epochs = 200;
};

struct CvReport {
  CvPoint best;
  std::size_t best_index = 0;
  std::vector<double> mean_f1;  // per grid point
  bool stratified = false;
  std::string warning;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                        const std::vector<int>* labels,
                                                        std::uint64_t seed, bool* stratified,
                                                        std::string* warning) {
  std::vector<std::vector<std::size_t>> fold_indices(static_cast<std::size_t>(folds));
  Rng rng(seed);
  bool use_strata = labels != nullptr;
  if (labels) {
    std::map<int, std::size_t> counts;
    for (int label : *labels) ++counts[label];
    for (const auto& [label, count] : counts) {
      if (count < static_cast<std::size_t>(folds)) {
        use_strata = false;
        if (warning) {
          *warning = "class " + std::to_string(label) +
                     " has fewer examples than folds; using unstratified folds";
        }
        break;
      }
    }
  }
  if (use_strata) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[(*labels)[i]].push_back(i);
    std::size_t dealt = 0;
    for (auto& [label, idx] : by_class) {
      rng.shuffle(idx);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        fold_indices[(dealt + i) % static_cast<std::size_t>(folds)].push_back(idx[i]);
      }
      dealt += idx.size();
    }
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (std::size_t i = 0; i < n; ++i) {
      fold_indices[i % static_cast<std::size_t>(folds)].push_back(idx[i]);
    }
  }
  if (stratified) *stratified = use_strata;
  return fold_indices;
}

inline Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace detail

// Stratified k-fold selection of the grid point with the best mean macro-F1.
inline CvReport run_cross_validation_multiclass(const Matrix& X, const std::vector<int>& y,
                                                int num_classes, int folds,
                                                const std::vector<CvPoint>& grid,
                                                std::uint64_t seed) {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (X.rows() < static_cast<Eigen::Index>(folds)) throw Error("fewer examples than folds");
  if (grid.empty()) throw Error("empty hyperparameter grid");

  CvReport report;
  const auto fold_indices =
      detail::make_folds(y.size(), folds, &y, seed, &report.stratified, &report.warning);

  std::vector<std::vector<std::size_t>> train_sets(fold_indices.size());
  for (std::size_t f = 0; f < fold_indices.size(); ++f) {
    for (std::size_t g = 0; g < fold_indices.size(); ++g) {
      if (g == f) continue;
      train_sets[f].insert(train_sets[f].end(), fold_indices[g].begin(), fold_indices[g].end());
    }
  }

  double best_f1 = -1.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double mean_f1 = 0.0;
    for (std::size_t f = 0; f < fold_indices.size(); ++f) {
      std::vector<int> y_train, y_val;
      for (auto i : train_sets[f]) y_train.push_back(y[i]);
      for (auto i : fold_indices[f]) y_val.push_back(y[i]);
      const auto model = train_linear_classifier(detail::take_rows(X, train_sets[f]), y_train,
                                                 num_classes, grid[p].l2, grid[p].epochs, seed);
      const auto pred = predict_classes(model.W, detail::take_rows(X, fold_indices[f]));
      mean_f1 += multiclass_metrics(pred, y_val).macro_f1;
    }
    mean_f1 /= static_cast<double>(fold_indices.size());
    report.mean_f1.push_back(mean_f1);
    if (mean_f1 > best_f1) {
      best_f1 = mean_f1;
      report.best = grid[p];
      report.best_index = p;
    }
  }
  return report;
}

// Random k-fold selection of the grid point with the best mean micro-F1.
inline CvReport run_cross_validation_multilabel(const Matrix& X, const Matrix& Y, int folds,
                                                const std::vector<CvPoint>& grid,
                                                std::uint64_t seed) {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (X.rows() < static_cast<Eigen::Index>(folds)) throw Error("fewer examples than folds");
  if (grid.empty()) throw Error("empty hyperparameter grid");

  CvReport report;
  const auto fold_indices = detail::make_folds(static_cast<std::size_t>(X.rows()), folds, nullptr,
                                               seed, &report.stratified, &report.warning);

  double best_f1 = -1.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double mean_f1 = 0.0;
    for (std::size_t f = 0; f < fold_indices.size(); ++f) {
      std::vector<std::size_t> train_rows;
      for (std::size_t g = 0; g < fold_indices.size(); ++g) {
        if (g == f) continue;
        train_rows.insert(train_rows.end(), fold_indices[g].begin(), fold_indices[g].end());
      }
      const auto model = train_one_vs_rest(detail::take_rows(X, train_rows),
                                           detail::take_rows(Y, train_rows), grid[p].l2,
                                           grid[p].epochs, seed);
      const Matrix scores = predict_scores_ovr(model.W, detail::take_rows(X, fold_indices[f]));
      mean_f1 += multilabel_metrics(scores, detail::take_rows(Y, fold_indices[f]), 1).micro_f1;
    }
    mean_f1 /= static_cast<double>(fold_indices.size());
    report.mean_f1.push_back(mean_f1);
    if (mean_f1 > best_f1) {
      best_f1 = mean_f1;
      report.best = grid[p];
      report.best_index = p;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Labeled-set loading and reports
// ---------------------------------------------------------------------------

struct LabeledSet {
  std::vector<std::vector<std::string>> docs;
  std::vector<int> labels;                   // multiclass
  std::vector<std::vector<int>> label_sets;  // multilabel
  int max_label = -1;
};

// TSV `label(s)<TAB>document`; multilabel labels comma-separated integers.
inline LabeledSet load_labeled_set(const std::string& path, bool multilabel,
                                   bool lowercase = false) {
  auto in = detail::open_text(path);
  LabeledSet set;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("missing label column at line " + std::to_string(line_no));
    }
    const std::string label_field = line.substr(0, tab);
    std::vector<std::string> doc;
    for (auto tok : detail::split_ws(std::string_view(line).substr(tab + 1))) {
      doc.push_back(lowercase ? detail::lowercase_ascii(tok) : std::string(tok));
    }
    if (multilabel) {
      std::vector<int> labels;
      for (auto part : detail::split_char(label_field, ',')) {
        std::int64_t v = -1;
        if (!parse_int64(part, v) || v < 0) {
          throw Error("bad label at line " + std::to_string(line_no));
        }
        labels.push_back(static_cast<int>(v));
        set.max_label = std::max(set.max_label, static_cast<int>(v));
      }
      set.label_sets.push_back(std::move(labels));
    } else {
      std::int64_t v = -1;
      if (!parse_int64(label_field, v) || v < 0) {
        throw Error("bad label at line " + std::to_string(line_no));
      }
      set.labels.push_back(static_cast<int>(v));
      set.max_label = std::max(set.max_label, static_cast<int>(v));
    }
    set.docs.push_back(std::move(doc));
  }
  if (set.docs.empty()) throw Error("empty labeled set: " + path);
  return set;
}

struct EvalReport {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> metrics;

  std::string to_text() const {
    std::string out;
    for (const auto& [key, value] : config) out += key + ": " + value + "\n";
    for (const auto& [key, value] : metrics) out += key + ": " + format_double(value) + "\n";
    return out;
  }
  std::string to_kv() const {
    std::string out;
    for (const auto& [key, value] : config) out += key + "=" + value + "\n";
    for (const auto& [key, value] : metrics) out += key + "=" + format_double(value) + "\n";
    return out;
  }
};

}  // namespace psif
