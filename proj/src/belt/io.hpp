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

#ifndef BELT_IO_HPP_
#define BELT_IO_HPP_

// File formats: triplet/vocabulary sources, cross-source dictionaries,
// completed triplets, embedding tables, metrics CSV and the run report.
//
// Triplet file: UTF-8 lines "row_token<TAB>col_token<TAB>value" holding the
// upper triangle (diagonal included). Blank lines and lines starting with
// '#' are ignored. Vocabulary file: one token per line; tokens without
// triplets are observed rows of zeros.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "belt/metrics.hpp"
#include "belt/model.hpp"

namespace belt {

// 17 significant digits, locale independent.
std::string FormatDouble(double value);
// Locale-independent parse of a whole field; nullopt on trailing garbage.
std::optional<double> ParseDouble(std::string_view text);

struct Triplet {
  std::size_t row = 0;  // positions in the vocabulary
  std::size_t col = 0;
  double value = 0.0;
};

struct TokenSource {
  std::string label;
  std::vector<std::string> vocab;
  std::vector<Triplet> triplets;
};

std::vector<std::string> ReadVocab(const std::string& path);
TokenSource ReadTokenSource(const std::string& triplet_path,
                            const std::string& vocab_path);

// Declares token pairs (token in source a, token in source b) to be the
// same entity.
struct Dictionary {
  int source_a = 0;
  int source_b = 0;
  std::vector<std::pair<std::string, std::string>> pairs;
};
Dictionary ReadDictionary(const std::string& path, int source_a, int source_b);

// Sources over shared entity ids. Tokens are merged across sources by exact
// string equality and by dictionary pairs; ids follow first appearance.
struct TokenProblem {
  std::vector<SourceObservation> sources;
  // Tokens of each entity id, first the canonical one.
  std::vector<std::vector<std::string>> entity_tokens;
};
TokenProblem ResolveTokens(std::span<const TokenSource> sources,
                           std::span<const Dictionary> dictionaries = {});

// Upper triangle of `matrix` with row/column names.
void WriteTriplets(std::ostream& out, const Matrix& matrix,
                   std::span<const std::string> names);
void WriteEmbeddings(std::ostream& out, const Matrix& embeddings,
                     std::span<const std::vector<std::string>> tokens);

struct EmbeddingTable {
  std::vector<std::string> tokens;
  Matrix vectors;
  std::unordered_map<std::string, Eigen::Index> row_of;

  std::optional<Eigen::Index> Find(std::string_view token) const;
};
EmbeddingTable ReadEmbeddings(const std::string& path);

// Reads one token per line (blank lines skipped).
std::vector<std::string> ReadTokenList(const std::string& path);

inline constexpr std::string_view kMetricsHeader =
    "setting,method,n,rank,m,p0,sigma,replicate,seed,err_f,err_2,"
    "precision_at_5,precision_at_10,precision_at_20,wall_ms";

// Metrics CSV. Failed rows keep empty metric fields; wall_ms is written only
// when `include_timing` is set so that repeated runs are byte-identical.
void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows,
                     bool include_timing);

// report.json content for a completion run.
std::string CompletionReportJson(const CompletionResult& result,
                                 std::span<const std::string> source_labels,
                                 std::string_view method,
                                 std::optional<double> rank_threshold);

}  // namespace belt

#endif  // BELT_IO_HPP_
