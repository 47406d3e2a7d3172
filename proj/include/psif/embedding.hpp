// Word topic-vector formation, SIF-weighted averaging and common-component
// removal: the embedding pipeline that turns a corpus into K*d vectors.
#pragma once

#include "psif/common.hpp"
#include "psif/io.hpp"
#include "psif/partition.hpp"
#include "psif/svd.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace psif {

struct SifParams {
  double a = 1e-3;
  bool remove_component = true;
};

// Per-word topic vectors tv_w in R^{K*d}: block j holds weights[w][j] * v_w.
// Stored factored (weights + word vectors); rows are materialized on demand.
struct WordTopicTable {
  int K = 0;
  int d = 0;
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  Matrix word_vectors;  // |V| x d
  Matrix weights;       // |V| x K

  bool contains(const std::string& token) const { return index.count(token) != 0; }

  Vector vector_of(int row) const {
    Vector tv(static_cast<Eigen::Index>(K) * d);
    for (int j = 0; j < K; ++j) {
      tv.segment(static_cast<Eigen::Index>(j) * d, d) =
          weights(row, j) * word_vectors.row(row).transpose();
    }
    return tv;
  }

  Vector vector_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) throw Error("token not in word-topic table: " + token);
    return vector_of(it->second);
  }
};

struct EmbeddingMatrix {
  Eigen::Index dim = 0;  // K * d
  std::vector<std::string> ids;
  Matrix rows;  // N x dim
  std::optional<Vector> common_direction;

  std::size_t size() const { return ids.size(); }
};

struct EmbedStats {
  std::size_t total_tokens = 0;
  std::size_t dropped_tokens = 0;  // out-of-vocabulary occurrences
  std::size_t empty_documents = 0;
};

inline double sif_weight(double p_w, double a) {
  if (!(a > 0.0)) throw Error("sif_weight: a must be positive");
  if (p_w < 0.0) throw Error("sif_weight: negative probability");
  return a / (a + p_w);
}

inline WordTopicTable build_word_topic_table(const WordVectorTable& table,
                                             const PartitionWeights& weights) {
  std::string missing;
  for (const auto& token : weights.tokens) {
    if (!table.contains(token)) {
      if (!missing.empty()) missing += ", ";
      missing += token;
    }
  }
  if (!missing.empty()) {
    throw Error("weighted tokens missing from vector table: " + missing);
  }
  WordTopicTable tt;
  tt.K = weights.K;
  tt.d = table.dim;
  tt.tokens = weights.tokens;
  tt.index = weights.index;
  tt.weights = weights.weights;
  tt.word_vectors.resize(static_cast<Eigen::Index>(weights.tokens.size()), table.dim);
  for (std::size_t w = 0; w < weights.tokens.size(); ++w) {
    tt.word_vectors.row(static_cast<Eigen::Index>(w)) = table.vectors.row(table.row_of(weights.tokens[w]));
  }
  return tt;
}

// (1/|d'|) sum over in-vocabulary tokens of a/(a+p(w)) * tv_w; the zero
// vector when no token is in vocabulary.
inline Vector embed_document(const std::vector<std::string>& doc, const WordTopicTable& tt,
                             const UnigramModel& unigram, const SifParams& params,
                             EmbedStats* stats = nullptr) {
  const Eigen::Index dim = static_cast<Eigen::Index>(tt.K) * tt.d;
  Vector acc = Vector::Zero(dim);
  std::size_t in_vocab = 0;
  for (const auto& token : doc) {
    if (stats) ++stats->total_tokens;
    auto it = tt.index.find(token);
    if (it == tt.index.end()) {
      if (stats) ++stats->dropped_tokens;
      continue;
    }
    ++in_vocab;
    const int row = it->second;
    const double sw = sif_weight(unigram.prob(token), params.a);
    for (int j = 0; j < tt.K; ++j) {
      const double wj = tt.weights(row, j);
      if (wj != 0.0) {
        acc.segment(static_cast<Eigen::Index>(j) * tt.d, tt.d) +=
            (sw * wj) * tt.word_vectors.row(row).transpose();
      }
    }
  }
  if (in_vocab == 0) {
    if (stats) ++stats->empty_documents;
    return acc;
  }
  return acc / static_cast<double>(in_vocab);
}

// Projects every row orthogonal to the dominant direction u of the row set
// and records u on the result. Zero rows take no part in finding u but are
// still (trivially) projected.
inline EmbeddingMatrix remove_common_component(EmbeddingMatrix emb) {
  bool any_nonzero = false;
  for (Eigen::Index r = 0; r < emb.rows.rows(); ++r) {
    if (emb.rows.row(r).squaredNorm() > 0.0) {
      any_nonzero = true;
      break;
    }
  }
  if (!any_nonzero) throw Error("no common component in zero matrix");

  Rank1Fit fit = dominant_singular_pair(emb.rows, Vector(), 1000, 1e-10);
  Vector u = fit.right;
  fix_sign_by_first_nonzero(u);
  for (Eigen::Index r = 0; r < emb.rows.rows(); ++r) {
    const double proj = emb.rows.row(r).dot(u);
    emb.rows.row(r) -= proj * u.transpose();
  }
  emb.common_direction = u;
  return emb;
}

// Same projection with a direction computed elsewhere (e.g. training time).
inline EmbeddingMatrix apply_common_component(EmbeddingMatrix emb, const Vector& direction) {
  if (direction.size() != emb.dim) throw Error("component direction has wrong dimension");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw Error("component direction is zero");
  const Vector u = direction / norm;
  for (Eigen::Index r = 0; r < emb.rows.rows(); ++r) {
    const double proj = emb.rows.row(r).dot(u);
    emb.rows.row(r) -= proj * u.transpose();
  }
  emb.common_direction = u;
  return emb;
}

inline EmbeddingMatrix embed_corpus(const Corpus& corpus, const WordTopicTable& tt,
                                    const UnigramModel& unigram, const SifParams& params,
                                    int threads = 1, EmbedStats* stats = nullptr) {
  EmbeddingMatrix emb;
  emb.dim = static_cast<Eigen::Index>(tt.K) * tt.d;
  emb.ids = corpus.ids;
  emb.rows.resize(static_cast<Eigen::Index>(corpus.size()), emb.dim);
  std::vector<EmbedStats> per_doc(stats ? corpus.size() : 0);
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    emb.rows.row(static_cast<Eigen::Index>(i)) =
        embed_document(corpus.documents[i], tt, unigram, params, stats ? &per_doc[i] : nullptr)
            .transpose();
  });
  if (stats) {
    for (const auto& s : per_doc) {
      stats->total_tokens += s.total_tokens;
      stats->dropped_tokens += s.dropped_tokens;
      stats->empty_documents += s.empty_documents;
    }
  }
  if (params.remove_component) emb = remove_common_component(std::move(emb));
  return emb;
}

inline void save_embeddings(const std::string& path, const EmbeddingMatrix& emb) {
  std::string out;
  for (std::size_t r = 0; r < emb.size(); ++r) {
    out += emb.ids[r];
    for (Eigen::Index c = 0; c < emb.dim; ++c) {
      out += '\t';
      out += format_double(emb.rows(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

inline EmbeddingMatrix load_embeddings(const std::string& path) {
  auto in = detail::open_text(path);
  EmbeddingMatrix emb;
  std::vector<std::vector<double>> rows;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto parts = detail::split_char(line, '\t');
    if (parts.size() < 2) throw Error("malformed embedding line: " + line);
    std::vector<double> row(parts.size() - 1);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (!parse_double(parts[i], row[i - 1])) {
        throw Error("invalid embedding value in row " + std::to_string(rows.size()));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("ragged embedding row " + std::to_string(rows.size()));
    }
    emb.ids.emplace_back(parts[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("empty embeddings file: " + path);
  emb.dim = static_cast<Eigen::Index>(rows.front().size());
  emb.rows.resize(static_cast<Eigen::Index>(rows.size()), emb.dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < emb.dim; ++c) {
      emb.rows(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return emb;
}

}  // namespace psif
