// Copyright 2026 The BELT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "belt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <system_error>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "belt/errors.hpp"

namespace belt {
namespace {

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

void StripCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool IsSkippable(const std::string& line) {
  return line.empty() || line.front() == '#';
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // The smaller index stays the root, so roots are first appearances.
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::optional<double> ParseDouble(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) return std::nullopt;
  return value;
}

std::vector<std::string> ReadVocab(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line.empty()) continue;
    if (line.find('\t') != std::string::npos) {
      throw ParseError(path, line_no, "vocabulary tokens may not contain tabs");
    }
    if (!seen.emplace(line, line_no).second) {
      throw ParseError(path, line_no, "duplicate token '" + line + "'");
    }
    vocab.push_back(line);
  }
  return vocab;
}

TokenSource ReadTokenSource(const std::string& triplet_path,
                            const std::string& vocab_path) {
  TokenSource source;
  source.label = std::filesystem::path(triplet_path).stem().string();
  source.vocab = ReadVocab(vocab_path);
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < source.vocab.size(); ++i) {
    position.emplace(source.vocab[i], i);
  }

  std::ifstream in = OpenInput(triplet_path);
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (IsSkippable(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      throw ParseError(triplet_path, line_no,
                       "expected 3 tab-separated fields, found " +
                           std::to_string(fields.size()));
    }
    const auto row = position.find(fields[0]);
    const auto col = position.find(fields[1]);
    if (row == position.end() || col == position.end()) {
      const std::string_view missing =
          row == position.end() ? fields[0] : fields[1];
      throw ParseError(triplet_path, line_no,
                       "token '" + std::string(missing) +
                           "' is not in the vocabulary " + vocab_path);
    }
    const auto value = ParseDouble(fields[2]);
    if (!value || !std::isfinite(*value)) {
      throw ParseError(triplet_path, line_no,
                       "invalid value '" + std::string(fields[2]) + "'");
    }
    const auto key = std::minmax(row->second, col->second);
    const auto [it, inserted] = entries.emplace(key, *value);
    if (!inserted && it->second != *value) {
      throw ParseError(triplet_path, line_no,
                       "conflicting duplicate entry for (" +
                           std::string(fields[0]) + ", " +
                           std::string(fields[1]) + ")");
    }
  }
  source.triplets.reserve(entries.size());
  for (const auto& [key, value] : entries) {
    source.triplets.push_back({key.first, key.second, value});
  }
  return source;
}

Dictionary ReadDictionary(const std::string& path, int source_a,
                          int source_b) {
  Dictionary dict;
  dict.source_a = source_a;
  dict.source_b = source_b;
  std::ifstream in = OpenInput(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (IsSkippable(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(path, line_no, "expected 'token_a<TAB>token_b'");
    }
    dict.pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return dict;
}

TokenProblem ResolveTokens(std::span<const TokenSource> sources,
                           std::span<const Dictionary> dictionaries) {
  if (sources.empty()) throw ValidationError("no sources to resolve");
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t> token_index;
  for (const auto& source : sources) {
    for (const auto& token : source.vocab) {
      if (token_index.emplace(token, tokens.size()).second) {
        tokens.push_back(token);
      }
    }
  }

  UnionFind classes(tokens.size());
  for (const auto& dict : dictionaries) {
    const auto count = static_cast<int>(sources.size());
    if (dict.source_a < 0 || dict.source_a >= count || dict.source_b < 0 ||
        dict.source_b >= count) {
      throw ValidationError("dictionary refers to a source outside [1, " +
                            std::to_string(count) + "]");
    }
    const auto& vocab_a = sources[static_cast<std::size_t>(dict.source_a)].vocab;
    const auto& vocab_b = sources[static_cast<std::size_t>(dict.source_b)].vocab;
    const std::unordered_set<std::string_view> known_a(vocab_a.begin(),
                                                       vocab_a.end());
    const std::unordered_set<std::string_view> known_b(vocab_b.begin(),
                                                       vocab_b.end());
    std::size_t skipped = 0;
    for (const auto& [a, b] : dict.pairs) {
      const bool known = known_a.count(a) > 0 && known_b.count(b) > 0;
      if (!known) {
        ++skipped;
        continue;
      }
      classes.Union(token_index.at(a), token_index.at(b));
    }
    if (skipped > 0) {
      Warn("dictionary " + std::to_string(dict.source_a + 1) + ":" +
           std::to_string(dict.source_b + 1) + ": skipped " +
           std::to_string(skipped) + " pairs with unknown tokens");
    }
  }

  TokenProblem problem;
  std::vector<EntityId> entity_of_token(tokens.size());
  std::unordered_map<std::size_t, EntityId> entity_of_root;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::size_t root = classes.Find(t);
    auto [it, inserted] = entity_of_root.emplace(
        root, static_cast<EntityId>(problem.entity_tokens.size()));
    if (inserted) problem.entity_tokens.emplace_back();
    entity_of_token[t] = it->second;
    problem.entity_tokens[static_cast<std::size_t>(it->second)].push_back(
        tokens[t]);
  }

  for (const auto& source : sources) {
    const std::size_t size = source.vocab.size();
    if (size == 0) {
      throw ValidationError("source '" + source.label + "' has no tokens");
    }
    std::vector<EntityId> ids(size);
    for (std::size_t i = 0; i < size; ++i) {
      ids[i] = entity_of_token[token_index.at(source.vocab[i])];
    }
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&ids](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::vector<std::size_t> rank_of(size);
    SourceObservation obs;
    obs.label = source.label;
    for (std::size_t pos = 0; pos < size; ++pos) {
      rank_of[order[pos]] = pos;
      if (pos > 0 && ids[order[pos]] == ids[order[pos - 1]]) {
        throw ValidationError(
            "source '" + source.label + "': tokens '" +
            source.vocab[order[pos - 1]] + "' and '" +
            source.vocab[order[pos]] + "' map to the same entity");
      }
      obs.indices.push_back(ids[order[pos]]);
    }
    const auto n = static_cast<Eigen::Index>(size);
    obs.matrix = Matrix::Zero(n, n);
    for (const Triplet& t : source.triplets) {
      const auto a = static_cast<Eigen::Index>(rank_of[t.row]);
      const auto b = static_cast<Eigen::Index>(rank_of[t.col]);
      obs.matrix(a, b) = t.value;
      obs.matrix(b, a) = t.value;
    }
    problem.sources.push_back(std::move(obs));
  }
  return problem;
}

void WriteTriplets(std::ostream& out, const Matrix& matrix,
                   std::span<const std::string> names) {
  if (matrix.rows() != matrix.cols() ||
      static_cast<std::size_t>(matrix.rows()) != names.size()) {
    throw ValidationError("WriteTriplets: names do not match the matrix");
  }
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = i; j < matrix.cols(); ++j) {
      out << names[static_cast<std::size_t>(i)] << '\t'
          << names[static_cast<std::size_t>(j)] << '\t'
          << FormatDouble(matrix(i, j)) << '\n';
    }
  }
}

void WriteEmbeddings(std::ostream& out, const Matrix& embeddings,
                     std::span<const std::vector<std::string>> tokens) {
  if (static_cast<std::size_t>(embeddings.rows()) != tokens.size()) {
    throw ValidationError("WriteEmbeddings: token list does not match rows");
  }
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (const auto& token : tokens[static_cast<std::size_t>(i)]) {
      out << token;
      for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
        out << '\t' << FormatDouble(embeddings(i, j));
      }
      out << '\n';
    }
  }
}

std::optional<Eigen::Index> EmbeddingTable::Find(std::string_view token) const {
  const auto it = row_of.find(std::string(token));
  if (it == row_of.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable ReadEmbeddings(const std::string& path) {
  std::ifstream in = OpenInput(path);
  EmbeddingTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (IsSkippable(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 2) {
      throw ParseError(path, line_no, "expected a token and at least one value");
    }
    if (rows.empty()) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw ParseError(path, line_no,
                       "expected " + std::to_string(dim) + " values, found " +
                           std::to_string(fields.size() - 1));
    }
    std::vector<double> values;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto v = ParseDouble(fields[f]);
      if (!v) {
        throw ParseError(path, line_no,
                         "invalid value '" + std::string(fields[f]) + "'");
      }
      values.push_back(*v);
    }
    const std::string token(fields[0]);
    if (!table.row_of.emplace(token, static_cast<Eigen::Index>(rows.size()))
             .second) {
      throw ParseError(path, line_no, "duplicate token '" + token + "'");
    }
    table.tokens.push_back(token);
    rows.push_back(std::move(values));
  }
  table.vectors.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      table.vectors(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

std::vector<std::string> ReadTokenList(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    StripCarriageReturn(line);
    if (!line.empty()) tokens.push_back(line);
  }
  return tokens;
}

void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows,
                     bool include_timing) {
  out << kMetricsHeader << '\n';
  for (const MetricRow& row : rows) {
    out << row.setting << ',' << MethodName(row.method) << ',' << row.n << ','
        << row.rank << ',' << row.m << ',' << FormatDouble(row.p0) << ','
        << FormatDouble(row.sigma) << ',' << row.replicate << ',' << row.seed
        << ',';
    if (row.ok) {
      out << FormatDouble(row.err_f) << ',' << FormatDouble(row.err_2);
    } else {
      out << ',';
    }
    for (int k : {5, 10, 20}) {
      out << ',';
      const auto it = row.precision_at.find(k);
      if (row.ok && it != row.precision_at.end()) out << FormatDouble(it->second);
    }
    out << ',';
    if (include_timing) out << FormatDouble(row.wall_ms);
    out << '\n';
  }
}

std::string CompletionReportJson(const CompletionResult& result,
                                 std::span<const std::string> source_labels,
                                 std::string_view method,
                                 std::optional<double> rank_threshold) {
  using nlohmann::json;
  json report;
  report["method"] = std::string(method);
  report["rank"] = result.rank();
  report["rank_threshold"] =
      rank_threshold ? json(*rank_threshold) : json(nullptr);
  report["entities"] = result.global_index.size();

  json sources = json::array();
  for (std::size_t s = 0; s < result.noise_estimates.size(); ++s) {
    sources.push_back({
        {"label", s < source_labels.size() ? source_labels[s] : std::string()},
        {"sigma_hat", result.noise_estimates[s]},
    });
  }
  report["sources"] = sources;

  json log = json::array();
  for (const auto& d : result.imputation_log) {
    log.push_back({
        {"source_a", d.source_a + 1},
        {"source_b", d.source_b + 1},
        {"sigma_sum", d.noise_sum},
        {"overlap", d.overlap},
        {"block_rows", d.block_rows},
        {"block_cols", d.block_cols},
        {"status", d.status},
        {"entries_assigned", d.entries_assigned},
        {"entries_superseded", d.entries_superseded},
        {"entries_observed", d.entries_observed},
    });
  }
  report["imputation_log"] = log;

  json diagnostics;
  diagnostics["eigenvalues"] = std::vector<double>(
      result.factors.values.data(),
      result.factors.values.data() + result.factors.values.size());
  try {
    diagnostics["coherence"] = Coherence(result.factors.vectors);
  } catch (const ValidationError&) {
    diagnostics["coherence"] = nullptr;
  }
  try {
    const auto& v = result.factors.values;
    diagnostics["condition_number"] =
        ConditionNumber(std::span<const double>(v.data(), v.size()));
  } catch (const ValidationError&) {
    diagnostics["condition_number"] = nullptr;
  }
  report["diagnostics"] = diagnostics;
  return report.dump(2) + "\n";
}

}  // namespace belt
