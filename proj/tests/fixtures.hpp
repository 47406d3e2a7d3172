// Shared helpers for tests: temp dirs, process execution, and synthetic
// data generators (all seeded through psif::Rng for reproducibility).
#pragma once

#include <psif/common.hpp>
#include <psif/io.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = base / ("psif_test_" + std::to_string(std::rand()) + "_" +
                               std::to_string(attempt));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path() const { return path_; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing stdout and stderr.
inline CommandResult run_command(const std::string& cmd, const std::string& workdir) {
  CommandResult result;
  const auto out_path = workdir + "/cmd_stdout.txt";
  const auto err_path = workdir + "/cmd_stderr.txt";
  const std::string full = cmd + " >" + out_path + " 2>" + err_path;
  const int status = std::system(full.c_str());
  result.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

inline std::string cli_path() {
  if (const char* env = std::getenv("PSIF_CLI")) return env;
  return "./tools/psif";
}

// Random word-vector table with tokens w000, w001, ...
inline psif::WordVectorTable make_random_table(std::size_t vocab, int dim, std::uint64_t seed,
                                               double scale = 1.0) {
  psif::Rng rng(seed);
  psif::WordVectorTable table;
  table.dim = dim;
  table.vectors.resize(static_cast<Eigen::Index>(vocab), dim);
  for (std::size_t w = 0; w < vocab; ++w) {
    char name[16];
    std::snprintf(name, sizeof(name), "w%03u", static_cast<unsigned>(w));
    table.index.emplace(name, static_cast<int>(w));
    table.tokens.emplace_back(name);
    for (int c = 0; c < dim; ++c) {
      table.vectors(static_cast<Eigen::Index>(w), c) = scale * rng.normal();
    }
  }
  return table;
}

inline std::string table_to_text(const psif::WordVectorTable& table, bool header = false) {
  std::string out;
  if (header) {
    out += std::to_string(table.size()) + " " + std::to_string(table.dim) + "\n";
  }
  for (std::size_t w = 0; w < table.size(); ++w) {
    out += table.tokens[w];
    for (int c = 0; c < table.dim; ++c) {
      out += ' ';
      out += psif::format_double(table.vectors(static_cast<Eigen::Index>(w), c));
    }
    out += '\n';
  }
  return out;
}

// A corpus of topic-mixture documents over a planted-topic vocabulary.
struct TopicWorld {
  psif::WordVectorTable table;          // vocabulary clustered around topic centers
  std::vector<int> topic_of_word;       // word row -> topic
  psif::Corpus corpus;                  // sampled documents
  std::vector<std::vector<int>> doc_topics;  // topics drawn per document
  psif::Matrix mixtures;                // N x topics, token share per topic
};

// `topics` disjoint vocabularies of `words_per_topic` words each; documents
// draw `min_topics..max_topics` distinct topics, then `min_len..max_len`
// tokens according to random mixture weights.
inline TopicWorld make_topic_world(int topics, int words_per_topic, int dim, std::size_t num_docs,
                                   int min_len, int max_len, int min_topics, int max_topics,
                                   std::uint64_t seed, double center_scale = 2.0,
                                   double noise = 0.1) {
  psif::Rng rng(seed);
  TopicWorld world;
  world.table.dim = dim;
  const std::size_t vocab = static_cast<std::size_t>(topics) * words_per_topic;
  world.table.vectors.resize(static_cast<Eigen::Index>(vocab), dim);

  psif::Matrix centers(topics, dim);
  for (int t = 0; t < topics; ++t) {
    for (int c = 0; c < dim; ++c) centers(t, c) = rng.normal();
    centers.row(t) *= center_scale / centers.row(t).norm();
  }
  for (int t = 0; t < topics; ++t) {
    for (int w = 0; w < words_per_topic; ++w) {
      const auto row = static_cast<Eigen::Index>(t) * words_per_topic + w;
      char name[24];
      std::snprintf(name, sizeof(name), "t%02dw%03d", t, w);
      world.table.index.emplace(name, static_cast<int>(row));
      world.table.tokens.emplace_back(name);
      world.topic_of_word.push_back(t);
      for (int c = 0; c < dim; ++c) {
        world.table.vectors(row, c) = centers(t, c) + noise * rng.normal();
      }
    }
  }

  world.mixtures = psif::Matrix::Zero(static_cast<Eigen::Index>(num_docs), topics);
  for (std::size_t i = 0; i < num_docs; ++i) {
    const int t_count =
        min_topics + static_cast<int>(rng.uniform_index(
                         static_cast<std::size_t>(max_topics - min_topics + 1)));
    std::vector<std::size_t> chosen =
        rng.sample_without_replacement(static_cast<std::size_t>(topics),
                                       static_cast<std::size_t>(t_count));
    std::vector<double> weights(chosen.size());
    double total = 0.0;
    for (auto& w : weights) {
      w = 0.2 + rng.uniform();
      total += w;
    }
    for (auto& w : weights) w /= total;

    const int len = min_len + static_cast<int>(rng.uniform_index(
                                  static_cast<std::size_t>(max_len - min_len + 1)));
    std::vector<std::string> doc;
    std::vector<int> doc_topic_list;
    for (auto t : chosen) doc_topic_list.push_back(static_cast<int>(t));
    for (int j = 0; j < len; ++j) {
      double r = rng.uniform();
      std::size_t pick = chosen.size() - 1;
      for (std::size_t c = 0; c < weights.size(); ++c) {
        if (r < weights[c]) {
          pick = c;
          break;
        }
        r -= weights[c];
      }
      const int topic = static_cast<int>(chosen[pick]);
      const auto word = static_cast<std::size_t>(topic) * words_per_topic +
                        rng.uniform_index(static_cast<std::size_t>(words_per_topic));
      doc.push_back(world.table.tokens[word]);
      world.mixtures(static_cast<Eigen::Index>(i), topic) += 1.0;
    }
    world.mixtures.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(len);
    world.corpus.documents.push_back(std::move(doc));
    world.corpus.ids.push_back(std::to_string(i));
    world.doc_topics.push_back(std::move(doc_topic_list));
  }
  return world;
}

}  // namespace fixtures
