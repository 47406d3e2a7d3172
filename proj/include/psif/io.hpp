// Text-format loaders and writers: word vectors, corpora, unigram
// frequencies and TSV matrices. All loaded artifacts are immutable
// after construction and safe to share across threads.
#pragma once

#include "psif/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace psif {

struct WordVectorTable {
  int dim = 0;
  std::vector<std::string> tokens;               // file order
  std::unordered_map<std::string, int> index;    // token -> row
  Matrix vectors;                                // |V| x dim

  bool contains(const std::string& token) const { return index.count(token) != 0; }
  int row_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) throw Error("token not in vector table: " + token);
    return it->second;
  }
  std::size_t size() const { return tokens.size(); }
};

struct Corpus {
  std::vector<std::vector<std::string>> documents;
  std::vector<std::string> ids;  // parallel to documents

  std::size_t size() const { return documents.size(); }
};

struct UnigramModel {
  std::unordered_map<std::string, double> probs;
  std::int64_t total_count = 0;

  // Absent tokens get probability 0 (SIF weight 1).
  double prob(const std::string& token) const {
    auto it = probs.find(token);
    return it == probs.end() ? 0.0 : it->second;
  }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_char(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  return in;
}

inline std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

// Writes via a temp file in the same directory, renamed into place on
// success, so readers never observe partial output.
inline void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("rename failed for " + path + ": " + ec.message());
  }
}

// Format: one entry per line, `token v1 v2 ... vd`. An optional first line
// of exactly two integers (vocab size, dim) is treated as a header.
inline WordVectorTable load_word_vectors(const std::string& path) {
  auto in = detail::open_text(path);
  WordVectorTable table;
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    auto parts = detail::split_ws(line);
    if (parts.empty()) continue;
    if (first_content_line && parts.size() == 2) {
      std::int64_t a = 0, b = 0;
      if (parse_int64(parts[0], a) && parse_int64(parts[1], b)) {
        first_content_line = false;
        continue;  // header
      }
    }
    first_content_line = false;
    if (parts.size() < 2) {
      throw Error("malformed vector entry at line " + std::to_string(line_no));
    }
    const std::string token(parts[0]);
    if (table.dim == 0) {
      table.dim = static_cast<int>(parts.size()) - 1;
    } else if (static_cast<int>(parts.size()) - 1 != table.dim) {
      throw Error("dimension mismatch at line " + std::to_string(line_no));
    }
    if (table.index.count(token)) {
      throw Error("duplicate token at line " + std::to_string(line_no) + ": " + token);
    }
    std::vector<double> v(table.dim);
    for (int i = 0; i < table.dim; ++i) {
      if (!parse_double(parts[i + 1], v[i]) || !std::isfinite(v[i])) {
        throw Error("non-finite or invalid value at line " + std::to_string(line_no));
      }
    }
    table.index.emplace(token, static_cast<int>(rows.size()));
    table.tokens.push_back(token);
    rows.push_back(std::move(v));
  }
  if (rows.empty()) throw Error("no vector entries in " + path);
  table.vectors.resize(static_cast<Eigen::Index>(rows.size()), table.dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < table.dim; ++c) table.vectors(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return table;
}

inline void save_word_vectors(const std::string& path, const WordVectorTable& table) {
  std::string out;
  out += std::to_string(table.size()) + " " + std::to_string(table.dim) + "\n";
  for (std::size_t r = 0; r < table.size(); ++r) {
    out += table.tokens[r];
    for (int c = 0; c < table.dim; ++c) {
      out += ' ';
      out += format_double(table.vectors(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

// One document per line, tokens split on ASCII whitespace. Blank lines
// become empty documents so line/ID alignment is preserved.
inline Corpus load_corpus(const std::string& path, bool lowercase = false) {
  auto in = detail::open_text(path);
  Corpus corpus;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    const std::string line = detail::strip_cr(raw);
    std::vector<std::string> doc;
    for (auto part : detail::split_ws(line)) {
      doc.push_back(lowercase ? detail::lowercase_ascii(part) : std::string(part));
    }
    corpus.documents.push_back(std::move(doc));
    corpus.ids.push_back(std::to_string(line_no));
    ++line_no;
  }
  return corpus;
}

inline UnigramModel estimate_unigram(const Corpus& corpus) {
  UnigramModel model;
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& doc : corpus.documents) {
    for (const auto& token : doc) {
      ++counts[token];
      ++total;
    }
  }
  if (total == 0) throw Error("cannot estimate from empty corpus");
  model.total_count = total;
  for (const auto& [token, count] : counts) {
    model.probs.emplace(token, static_cast<double>(count) / static_cast<double>(total));
  }
  return model;
}

// TSV lines `token<TAB>count`, counts positive integers.
inline UnigramModel load_unigram(const std::string& path) {
  auto in = detail::open_text(path);
  UnigramModel model;
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto parts = detail::split_char(line, '\t');
    std::int64_t count = 0;
    if (parts.size() != 2 || !parse_int64(parts[1], count)) {
      throw Error("malformed frequency line " + std::to_string(line_no));
    }
    if (count <= 0) {
      throw Error("nonpositive count at line " + std::to_string(line_no));
    }
    counts[std::string(parts[0])] += count;
    total += count;
  }
  if (total == 0) throw Error("empty frequency file: " + path);
  model.total_count = total;
  for (const auto& [token, count] : counts) {
    model.probs.emplace(token, static_cast<double>(count) / static_cast<double>(total));
  }
  return model;
}

inline void save_unigram(const std::string& path, const UnigramModel& model) {
  // Persist as counts; probabilities are reconstructed on load.
  std::vector<std::string> tokens;
  tokens.reserve(model.probs.size());
  for (const auto& [token, p] : model.probs) tokens.push_back(token);
  std::sort(tokens.begin(), tokens.end());
  std::string out;
  for (const auto& token : tokens) {
    const double p = model.probs.at(token);
    const auto count = static_cast<std::int64_t>(std::llround(p * static_cast<double>(model.total_count)));
    out += token;
    out += '\t';
    out += std::to_string(count);
    out += '\n';
  }
  write_text_atomic(path, out);
}

inline void save_matrix(const std::string& path, const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += '\t';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

inline Matrix load_matrix(const std::string& path) {
  auto in = detail::open_text(path);
  std::vector<std::vector<double>> rows;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = detail::strip_cr(raw);
    auto parts = detail::split_char(line, '\t');
    std::vector<double> row(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!parse_double(parts[i], row[i])) {
        throw Error("invalid value in matrix row " + std::to_string(rows.size()));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("ragged matrix row " + std::to_string(rows.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

}  // namespace psif
