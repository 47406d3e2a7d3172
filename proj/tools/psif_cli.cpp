// psif command-line front end: fit a partitioner, embed a corpus, compute
// document-similarity kernels, and evaluate STS / classification tasks.
#include "psif/embedding.hpp"
#include "psif/eval.hpp"
#include "psif/gmm.hpp"
#include "psif/io.hpp"
#include "psif/kernels.hpp"
#include "psif/partition.hpp"
#include "psif/sparse_coding.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace {

struct RunConfig {
  std::string vectors_path;
  std::string corpus_path;
  std::string freq_path;
  std::string model_dir;
  std::string reuse_component_path;
  std::string out_dir;
  int k_atoms = 40;
  int sparsity = 0;  // 0: default K/2
  double weight_a = 1e-3;
  std::string partitioner = "ksvd";
  int iters = 15;
  std::uint64_t seed = 42;
  int threads = 1;
  bool no_component_removal = false;
  bool lowercase = false;

  int sparsity_or_default() const { return sparsity > 0 ? sparsity : std::max(1, k_atoms / 2); }
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--k-atoms", cfg.k_atoms, "Number of dictionary atoms / clusters K");
  cmd->add_option("--sparsity", cfg.sparsity, "Nonzero coefficients per word (default K/2)");
  cmd->add_option("--weight-a", cfg.weight_a, "Smooth inverse frequency parameter a");
  cmd->add_option("--partitioner", cfg.partitioner, "ksvd or gmm")
      ->check(CLI::IsMember({"ksvd", "gmm"}));
  cmd->add_option("--iters", cfg.iters, "Fitting iterations");
  cmd->add_option("--seed", cfg.seed, "Random seed");
  cmd->add_option("--threads", cfg.threads, "Worker thread cap (default 1)");
  cmd->add_flag("--no-component-removal", cfg.no_component_removal,
                "Skip common-component removal");
  cmd->add_flag("--lowercase", cfg.lowercase, "Lowercase all tokens on load");
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

// A fitted partitioner model loaded from disk, either flavor.
struct LoadedModel {
  psif::PartitionWeights weights;
  std::string kind;
  int K = 0;
  int k = 0;
  int dim = 0;
  std::uint64_t seed = 0;
};

LoadedModel load_model(const std::string& dir) {
  auto meta_in = psif::detail::open_text(dir + "/meta.txt");
  std::string line;
  std::getline(meta_in, line);
  LoadedModel model;
  if (line.rfind(psif::kDictionaryFormatVersion, 0) == 0) {
    const auto dict = psif::load_dictionary(dir);
    model.weights = psif::as_partition_weights(dict);
    model.kind = "ksvd";
    model.K = dict.num_atoms();
    model.k = dict.sparsity_k;
    model.dim = dict.dim;
    model.seed = dict.seed;
  } else if (line.rfind(psif::kGmmFormatVersion, 0) == 0) {
    const auto gmm = psif::load_gmm(dir);
    model.weights = psif::as_partition_weights(gmm);
    model.kind = "gmm";
    model.K = gmm.num_components();
    model.k = gmm.num_components();
    model.dim = gmm.dim;
    model.seed = gmm.seed;
  } else {
    throw psif::Error("unrecognized model directory: " + dir);
  }
  return model;
}

psif::UnigramModel resolve_unigram(const RunConfig& cfg, const psif::Corpus& corpus) {
  if (!cfg.freq_path.empty()) return psif::load_unigram(cfg.freq_path);
  return psif::estimate_unigram(corpus);
}

int cmd_fit(const RunConfig& cfg) {
  const auto table = psif::load_word_vectors(cfg.vectors_path);
  if (cfg.k_atoms > static_cast<int>(table.size())) {
    throw psif::Error("K exceeds vocabulary size (" + std::to_string(cfg.k_atoms) + " > " +
                      std::to_string(table.size()) + ")");
  }
  const auto out = ensure_out_dir(cfg.out_dir);
  if (cfg.partitioner == "ksvd") {
    const auto dict = psif::ksvd_fit(table, cfg.k_atoms, cfg.sparsity_or_default(), cfg.iters,
                                     cfg.seed, cfg.threads);
    psif::save_dictionary(out.string(), dict);
    std::cout << "partitioner=ksvd K=" << dict.num_atoms() << " k=" << dict.sparsity_k
              << " d=" << dict.dim << " iters=" << cfg.iters << "\n";
    std::cout << "final_mse=" << psif::format_double(dict.mse_history.back()) << "\n";
  } else {
    const auto gmm = psif::gmm_fit(table, cfg.k_atoms, cfg.iters, cfg.seed);
    psif::save_gmm(out.string(), gmm);
    std::cout << "partitioner=gmm K=" << gmm.num_components() << " d=" << gmm.dim
              << " em_steps=" << gmm.loglik_history.size() - 1 << "\n";
    std::cout << "final_loglik=" << psif::format_double(gmm.loglik_history.back()) << "\n";
  }
  std::cout << "model_dir=" << out.string() << "\n";
  return 0;
}

int cmd_embed(const RunConfig& cfg) {
  const auto table = psif::load_word_vectors(cfg.vectors_path);
  const auto model = load_model(cfg.model_dir);
  if (model.dim != table.dim) {
    throw psif::Error("model dimension " + std::to_string(model.dim) +
                      " does not match vector file dimension " + std::to_string(table.dim));
  }
  const auto corpus = psif::load_corpus(cfg.corpus_path, cfg.lowercase);
  const auto unigram = resolve_unigram(cfg, corpus);
  const auto tt = psif::build_word_topic_table(table, model.weights);

  psif::SifParams params;
  params.a = cfg.weight_a;
  params.remove_component = !cfg.no_component_removal && cfg.reuse_component_path.empty();

  psif::EmbedStats stats;
  auto emb = psif::embed_corpus(corpus, tt, unigram, params, cfg.threads, &stats);
  if (!cfg.reuse_component_path.empty() && !cfg.no_component_removal) {
    const psif::Matrix u = psif::load_matrix(cfg.reuse_component_path);
    if (u.rows() != 1) throw psif::Error("component file must contain exactly one row");
    emb = psif::apply_common_component(std::move(emb), u.row(0).transpose());
  }

  const auto out = ensure_out_dir(cfg.out_dir);
  psif::save_embeddings((out / "embeddings.tsv").string(), emb);
  if (emb.common_direction) {
    psif::Matrix u(1, emb.dim);
    u.row(0) = emb.common_direction->transpose();
    psif::save_matrix((out / "component.tsv").string(), u);
  }
  std::cout << "documents=" << emb.size() << " dim=" << emb.dim
            << " dropped_tokens=" << stats.dropped_tokens << "/" << stats.total_tokens
            << " empty_documents=" << stats.empty_documents << "\n";
  std::cout << "embeddings=" << (out / "embeddings.tsv").string() << "\n";
  return 0;
}

int cmd_kernel(const RunConfig& cfg, const std::string& kind_name, const std::string& pairs_path) {
  const auto kind = psif::parse_kernel_kind(kind_name);
  const auto table = psif::load_word_vectors(cfg.vectors_path);
  const auto corpus = psif::load_corpus(cfg.corpus_path, cfg.lowercase);
  std::optional<LoadedModel> model;
  if (psif::kernel_needs_weights(kind)) {
    if (cfg.model_dir.empty()) {
      throw psif::Error("kernel " + kind_name + " requires a fitted model (--model)");
    }
    model = load_model(cfg.model_dir);
  }
  const psif::PartitionWeights* weights = model ? &model->weights : nullptr;

  std::vector<bool> empty_doc(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    empty_doc[i] = psif::detail::vocab_rows(corpus.documents[i], table).empty();
    if (empty_doc[i]) {
      std::cerr << "warning: document " << corpus.ids[i]
                << " has no in-vocabulary tokens; emitting NA\n";
    }
  }

  const auto out = ensure_out_dir(cfg.out_dir);
  if (!pairs_path.empty()) {
    auto in = psif::detail::open_text(pairs_path);
    std::string raw, body;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = psif::detail::strip_cr(raw);
      if (line.empty()) continue;
      auto parts = psif::detail::split_char(line, '\t');
      std::int64_t i = -1, j = -1;
      if (parts.size() != 2 || !psif::parse_int64(parts[0], i) || !psif::parse_int64(parts[1], j) ||
          i < 0 || j < 0 || i >= static_cast<std::int64_t>(corpus.size()) ||
          j >= static_cast<std::int64_t>(corpus.size())) {
        throw psif::Error("bad pair at line " + std::to_string(line_no));
      }
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(j);
      std::string value = "NA";
      if (!empty_doc[a] && !empty_doc[b]) {
        value = psif::format_double(
            psif::kernel(kind, corpus.documents[a], corpus.documents[b], table, weights));
      }
      const std::string row = corpus.ids[a] + "\t" + corpus.ids[b] + "\t" + value;
      std::cout << row << "\n";
      body += row + "\n";
    }
    psif::write_text_atomic((out / "kernel_pairs.tsv").string(), body);
    std::cout << "output=" << (out / "kernel_pairs.tsv").string() << "\n";
    return 0;
  }

  // Full matrix with an id header row and column. Computed over the
  // non-empty documents so k1-k3 cells come out exactly symmetric.
  psif::Corpus usable;
  std::vector<std::size_t> grid_to_usable(corpus.size(), SIZE_MAX);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (empty_doc[i]) continue;
    grid_to_usable[i] = usable.size();
    usable.documents.push_back(corpus.documents[i]);
    usable.ids.push_back(corpus.ids[i]);
  }
  const psif::Matrix values =
      psif::kernel_matrix(kind, usable, table, weights, cfg.threads);

  std::string body = "id";
  for (const auto& id : corpus.ids) body += "\t" + id;
  body += "\n";
  for (std::size_t r = 0; r < corpus.size(); ++r) {
    body += corpus.ids[r];
    for (std::size_t c = 0; c < corpus.size(); ++c) {
      body += '\t';
      if (empty_doc[r] || empty_doc[c]) {
        body += "NA";
      } else {
        body += psif::format_double(values(static_cast<Eigen::Index>(grid_to_usable[r]),
                                           static_cast<Eigen::Index>(grid_to_usable[c])));
      }
    }
    body += '\n';
  }
  psif::write_text_atomic((out / "kernel_matrix.tsv").string(), body);
  std::cout << "output=" << (out / "kernel_matrix.tsv").string() << "\n";
  return 0;
}

// Shared by eval-sts: embeds every sentence, finds the common direction over
// the whole pair set, then scores each pair by projected-cosine.
int cmd_eval_sts(const RunConfig& cfg, const std::string& pairs_path) {
  const auto table = psif::load_word_vectors(cfg.vectors_path);
  const auto model = load_model(cfg.model_dir);
  if (model.dim != table.dim) {
    throw psif::Error("model dimension does not match vector file dimension");
  }
  const auto pairs = psif::load_sts_pairs(pairs_path, cfg.lowercase);
  if (pairs.pairs.size() < 2) throw psif::Error("need at least 2 STS pairs");

  psif::Corpus sentences;
  for (std::size_t i = 0; i < pairs.pairs.size(); ++i) {
    sentences.documents.push_back(pairs.pairs[i].sentence_a);
    sentences.ids.push_back(std::to_string(2 * i));
    sentences.documents.push_back(pairs.pairs[i].sentence_b);
    sentences.ids.push_back(std::to_string(2 * i + 1));
  }
  const auto unigram = resolve_unigram(cfg, sentences);
  const auto tt = psif::build_word_topic_table(table, model.weights);

  psif::SifParams params;
  params.a = cfg.weight_a;
  params.remove_component = false;  // direction handled explicitly below
  std::optional<psif::Vector> direction;
  if (!cfg.reuse_component_path.empty()) {
    const psif::Matrix u = psif::load_matrix(cfg.reuse_component_path);
    if (u.rows() != 1) throw psif::Error("component file must contain exactly one row");
    direction = u.row(0).transpose();
  } else if (!cfg.no_component_removal) {
    auto emb = psif::embed_corpus(sentences, tt, unigram, params, cfg.threads);
    emb = psif::remove_common_component(std::move(emb));
    direction = *emb.common_direction;
  }

  const auto embed_fn = [&](const std::vector<std::string>& sentence) {
    psif::Vector v = psif::embed_document(sentence, tt, unigram, params);
    if (direction) v -= direction->dot(v) * (*direction);
    return v;
  };
  const auto result = psif::sts_evaluate(pairs, embed_fn);

  psif::EvalReport report;
  report.config = {{"task", "sts"},
                   {"partitioner", model.kind},
                   {"K", std::to_string(model.K)},
                   {"k", std::to_string(model.k)},
                   {"a", psif::format_double(cfg.weight_a)},
                   {"seed", std::to_string(model.seed)}};
  report.metrics = {{"pearson_r", result.r},
                    {"pearson_r_x100", result.r * 100.0},
                    {"pairs_used", static_cast<double>(result.used)},
                    {"pairs_dropped", static_cast<double>(result.dropped)}};
  const auto out = ensure_out_dir(cfg.out_dir);
  psif::write_text_atomic((out / "sts_report.txt").string(), report.to_text());
  psif::write_text_atomic((out / "sts_report.kv").string(), report.to_kv());
  std::cout << report.to_text();
  return 0;
}

int cmd_eval_classify(const RunConfig& cfg, const std::string& train_path,
                      const std::string& test_path, const std::string& mode, int topk) {
  const bool multilabel = mode == "multilabel";
  const auto table = psif::load_word_vectors(cfg.vectors_path);
  const auto model = load_model(cfg.model_dir);
  if (model.dim != table.dim) {
    throw psif::Error("model dimension does not match vector file dimension");
  }
  const auto train = psif::load_labeled_set(train_path, multilabel, cfg.lowercase);
  const auto test = psif::load_labeled_set(test_path, multilabel, cfg.lowercase);

  if (!multilabel) {
    std::set<int> train_labels(train.labels.begin(), train.labels.end());
    for (int label : test.labels) {
      if (!train_labels.count(label)) {
        throw psif::Error("test label " + std::to_string(label) + " unseen in training data");
      }
    }
  }

  psif::Corpus all_docs;
  for (std::size_t i = 0; i < train.docs.size(); ++i) {
    all_docs.documents.push_back(train.docs[i]);
    all_docs.ids.push_back("train" + std::to_string(i));
  }
  for (std::size_t i = 0; i < test.docs.size(); ++i) {
    all_docs.documents.push_back(test.docs[i]);
    all_docs.ids.push_back("test" + std::to_string(i));
  }
  const auto unigram = resolve_unigram(cfg, all_docs);
  const auto tt = psif::build_word_topic_table(table, model.weights);
  psif::SifParams params;
  params.a = cfg.weight_a;
  params.remove_component = !cfg.no_component_removal;
  const auto emb = psif::embed_corpus(all_docs, tt, unigram, params, cfg.threads);

  const auto n_train = static_cast<Eigen::Index>(train.docs.size());
  const psif::Matrix x_train = emb.rows.topRows(n_train);
  const psif::Matrix x_test = emb.rows.bottomRows(emb.rows.rows() - n_train);

  const std::vector<psif::CvPoint> grid = {
      {0.0, 300}, {1e-4, 300}, {1e-2, 300}};

  psif::EvalReport report;
  report.config = {{"task", mode},
                   {"partitioner", model.kind},
                   {"K", std::to_string(model.K)},
                   {"k", std::to_string(model.k)},
                   {"a", psif::format_double(cfg.weight_a)},
                   {"seed", std::to_string(cfg.seed)}};

  if (!multilabel) {
    const int num_classes = std::max(train.max_label, test.max_label) + 1;
    const auto cv = psif::run_cross_validation_multiclass(x_train, train.labels, num_classes, 5,
                                                          grid, cfg.seed);
    if (!cv.warning.empty()) std::cerr << "warning: " << cv.warning << "\n";
    const auto trained = psif::train_linear_classifier(x_train, train.labels, num_classes,
                                                       cv.best.l2, cv.best.epochs, cfg.seed);
    const auto pred = psif::predict_classes(trained.W, x_test);
    const auto metrics = psif::multiclass_metrics(pred, test.labels);
    report.config.emplace_back("cv_l2", psif::format_double(cv.best.l2));
    report.metrics = {{"accuracy", metrics.accuracy},
                      {"macro_precision", metrics.macro_precision},
                      {"macro_recall", metrics.macro_recall},
                      {"macro_f1", metrics.macro_f1}};
  } else {
    const int L = std::max(train.max_label, test.max_label) + 1;
    const auto to_binary = [L](const std::vector<std::vector<int>>& sets) {
      psif::Matrix Y = psif::Matrix::Zero(static_cast<Eigen::Index>(sets.size()), L);
      for (std::size_t i = 0; i < sets.size(); ++i) {
        for (int l : sets[i]) Y(static_cast<Eigen::Index>(i), l) = 1.0;
      }
      return Y;
    };
    const psif::Matrix y_train = to_binary(train.label_sets);
    const psif::Matrix y_test = to_binary(test.label_sets);
    const auto cv = psif::run_cross_validation_multilabel(x_train, y_train, 5, grid, cfg.seed);
    const auto trained =
        psif::train_one_vs_rest(x_train, y_train, cv.best.l2, cv.best.epochs, cfg.seed);
    const psif::Matrix scores = psif::predict_scores_ovr(trained.W, x_test);
    const int k = topk > 0 ? topk : std::min(5, L);
    const auto metrics = psif::multilabel_metrics(scores, y_test, k);
    report.config.emplace_back("cv_l2", psif::format_double(cv.best.l2));
    report.config.emplace_back("topk", std::to_string(k));
    report.metrics = {{"precision_at_k", metrics.precision_at_k},
                      {"ndcg_at_k", metrics.ndcg_at_k},
                      {"coverage_error", metrics.coverage_error},
                      {"lrap", metrics.lrap},
                      {"micro_f1", metrics.micro_f1},
                      {"skipped_rows", static_cast<double>(metrics.skipped_rows)}};
  }

  const auto out = ensure_out_dir(cfg.out_dir);
  psif::write_text_atomic((out / "report.txt").string(), report.to_text());
  psif::write_text_atomic((out / "report.kv").string(), report.to_kv());
  std::cout << report.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P-SIF partitioned word-vector-averaging document embeddings"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string kernel_kind = "k3";
  std::string pairs_path;
  std::string train_path, test_path, mode = "multiclass";
  int topk = 0;

  auto* fit = app.add_subcommand("fit", "Fit a k-SVD dictionary or GMM partitioner");
  fit->add_option("--vectors", cfg.vectors_path, "Word-vector text file")->required();
  fit->add_option("--out", cfg.out_dir, "Model output directory")->required();
  add_common_flags(fit, cfg);

  auto* embed = app.add_subcommand("embed", "Embed a corpus with a fitted model");
  embed->add_option("--vectors", cfg.vectors_path)->required();
  embed->add_option("--corpus", cfg.corpus_path, "One document per line")->required();
  embed->add_option("--model", cfg.model_dir, "Fitted model directory")->required();
  embed->add_option("--freq", cfg.freq_path, "token<TAB>count unigram frequencies");
  embed->add_option("--reuse-component", cfg.reuse_component_path,
                    "Project with this stored direction instead of refitting");
  embed->add_option("--out", cfg.out_dir)->required();
  add_common_flags(embed, cfg);

  auto* kernel = app.add_subcommand("kernel", "Pairwise document-similarity kernels");
  kernel->add_option("--kind", kernel_kind, "k1|k2|k3|k4")->required();
  kernel->add_option("--vectors", cfg.vectors_path)->required();
  kernel->add_option("--corpus", cfg.corpus_path)->required();
  kernel->add_option("--model", cfg.model_dir, "Required for k2/k3");
  kernel->add_option("--pairs", pairs_path, "TSV of doc-index pairs; omit for the full matrix");
  kernel->add_option("--out", cfg.out_dir)->required();
  add_common_flags(kernel, cfg);

  auto* sts = app.add_subcommand("eval-sts", "Pearson correlation on sentence pairs");
  sts->add_option("--vectors", cfg.vectors_path)->required();
  sts->add_option("--pairs", pairs_path, "TSV sentence_a<TAB>sentence_b<TAB>gold")->required();
  sts->add_option("--model", cfg.model_dir)->required();
  sts->add_option("--freq", cfg.freq_path);
  sts->add_option("--reuse-component", cfg.reuse_component_path);
  sts->add_option("--out", cfg.out_dir)->required();
  add_common_flags(sts, cfg);

  auto* classify = app.add_subcommand("eval-classify", "Train and score a linear classifier");
  classify->add_option("--vectors", cfg.vectors_path)->required();
  classify->add_option("--train", train_path, "TSV label(s)<TAB>document")->required();
  classify->add_option("--test", test_path)->required();
  classify->add_option("--mode", mode)->check(CLI::IsMember({"multiclass", "multilabel"}));
  classify->add_option("--model", cfg.model_dir)->required();
  classify->add_option("--freq", cfg.freq_path);
  classify->add_option("--topk", topk, "k for Precision@k and nDCG@k (default min(5, L))");
  classify->add_option("--out", cfg.out_dir)->required();
  add_common_flags(classify, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.sparsity > cfg.k_atoms) {
      throw psif::Error("--sparsity must not exceed --k-atoms");
    }
    if (fit->parsed()) return cmd_fit(cfg);
    if (embed->parsed()) return cmd_embed(cfg);
    if (kernel->parsed()) return cmd_kernel(cfg, kernel_kind, pairs_path);
    if (sts->parsed()) return cmd_eval_sts(cfg, pairs_path);
    if (classify->parsed()) return cmd_eval_classify(cfg, train_path, test_path, mode, topk);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
