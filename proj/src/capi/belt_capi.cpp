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

#include "belt/belt.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "belt/baselines.hpp"
#include "belt/completion.hpp"
#include "belt/errors.hpp"
#include "belt/io.hpp"
#include "belt/metrics.hpp"
#include "belt/simlab.hpp"

struct belt_problem {
  std::vector<belt::SourceObservation> dense;
  std::vector<belt::TokenSource> token_sources;
  std::vector<belt::Dictionary> dictionaries;
  // Resolved view of the token sources, rebuilt after every change.
  std::optional<belt::TokenProblem> resolved;

  const std::vector<belt::SourceObservation>& Sources() {
    if (!token_sources.empty()) {
      if (!resolved) resolved = belt::ResolveTokens(token_sources, dictionaries);
      return resolved->sources;
    }
    return dense;
  }
};

struct belt_result {
  belt::CompletionResult result;
  belt::Method method = belt::Method::kBelt;
  std::optional<double> rank_threshold;
  std::vector<std::string> source_labels;
  // Tokens per row; the first one names the row in completed.tsv.
  std::vector<std::vector<std::string>> row_tokens;
};

struct belt_metric_table {
  std::vector<belt::MetricRow> rows;
};

struct belt_embeddings {
  belt::EmbeddingTable table;
};

namespace {

thread_local std::string g_last_error;

belt_status Fail(belt_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

belt_status StatusOf(belt::ErrorKind kind) {
  switch (kind) {
    case belt::ErrorKind::kValidation:
      return BELT_ERROR_VALIDATION;
    case belt::ErrorKind::kPrecondition:
      return BELT_ERROR_PRECONDITION;
    case belt::ErrorKind::kNumerical:
      return BELT_ERROR_NUMERICAL;
    case belt::ErrorKind::kCompletion:
      return BELT_ERROR_COMPLETION;
    case belt::ErrorKind::kGeneration:
      return BELT_ERROR_GENERATION;
    case belt::ErrorKind::kParse:
      return BELT_ERROR_PARSE;
    case belt::ErrorKind::kIo:
      return BELT_ERROR_IO;
  }
  return BELT_ERROR_INTERNAL;
}

// Runs `body` and converts exceptions into status codes.
template <typename Fn>
belt_status Guard(Fn&& body) {
  try {
    body();
    return BELT_OK;
  } catch (const belt::Error& e) {
    return Fail(StatusOf(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(BELT_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(BELT_ERROR_INTERNAL, e.what());
  } catch (...) {
    return Fail(BELT_ERROR_INTERNAL, "unknown error");
  }
}

#define BELT_REQUIRE(ptr)                                                  \
  do {                                                                     \
    if ((ptr) == nullptr) {                                                \
      return Fail(BELT_ERROR_NULL_ARGUMENT, #ptr " must not be NULL");     \
    }                                                                      \
  } while (0)

void CopyRowMajor(const belt::Matrix& m, double* out) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(out, m.rows(), m.cols()) = m;
}

belt::Method ToMethod(belt_method method) {
  switch (method) {
    case BELT_METHOD_SMC:
      return belt::Method::kSmc;
    case BELT_METHOD_PRETRAIN:
      return belt::Method::kPretrain;
    case BELT_METHOD_BELT:
      return belt::Method::kBelt;
  }
  throw belt::ValidationError("unknown method " +
                              std::to_string(static_cast<int>(method)));
}

belt_method FromMethod(belt::Method method) {
  switch (method) {
    case belt::Method::kSmc:
      return BELT_METHOD_SMC;
    case belt::Method::kPretrain:
      return BELT_METHOD_PRETRAIN;
    case belt::Method::kBelt:
      break;
  }
  return BELT_METHOD_BELT;
}

belt::SimConfig ToSimConfig(const belt_sim_config& c) {
  belt::SimConfig config;
  config.setting = c.setting;
  config.n = c.n;
  config.rank = c.rank;
  config.m = c.m;
  config.p0 = c.p0;
  config.sigma = c.sigma;
  config.sigma_rule = c.sigma_rule == BELT_SIGMA_CONSTANT
                          ? belt::SigmaRule::kConstant
                          : belt::SigmaRule::kScaled;
  config.n_test = c.n_test;
  config.seed = c.seed;
  config.replicates = c.replicates;
  config.require_overlap = c.require_overlap != 0;
  config.threads = c.threads;
  return config;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw belt::IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

extern "C" {

const char* belt_version(void) { return "1.0.0"; }

const char* belt_last_error(void) { return g_last_error.c_str(); }

const char* belt_status_name(belt_status status) {
  switch (status) {
    case BELT_OK:
      return "ok";
    case BELT_ERROR_VALIDATION:
      return "validation error";
    case BELT_ERROR_PRECONDITION:
      return "precondition error";
    case BELT_ERROR_NUMERICAL:
      return "numerical error";
    case BELT_ERROR_COMPLETION:
      return "completion error";
    case BELT_ERROR_GENERATION:
      return "generation error";
    case BELT_ERROR_PARSE:
      return "parse error";
    case BELT_ERROR_IO:
      return "i/o error";
    case BELT_ERROR_NULL_ARGUMENT:
      return "null argument";
    case BELT_ERROR_NOT_FOUND:
      return "not found";
    case BELT_ERROR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* belt_method_name(belt_method method) {
  switch (method) {
    case BELT_METHOD_BELT:
      return "belt";
    case BELT_METHOD_SMC:
      return "smc";
    case BELT_METHOD_PRETRAIN:
      return "pretrain";
  }
  return "unknown";
}

belt_status belt_method_parse(const char* name, belt_method* out) {
  BELT_REQUIRE(name);
  BELT_REQUIRE(out);
  const auto method = belt::ParseMethod(name);
  if (!method) {
    return Fail(BELT_ERROR_VALIDATION, std::string("unknown method '") + name +
                                           "' (expected belt, smc or pretrain)");
  }
  *out = FromMethod(*method);
  return BELT_OK;
}

void belt_set_warning_callback(belt_warning_fn callback, void* user_data) {
  if (callback == nullptr) {
    belt::SetWarningHandler(nullptr);
    return;
  }
  belt::SetWarningHandler([callback, user_data](std::string_view message) {
    const std::string text(message);
    callback(text.c_str(), user_data);
  });
}

belt_status belt_problem_create(belt_problem** out) {
  BELT_REQUIRE(out);
  return Guard([&] { *out = new belt_problem(); });
}

void belt_problem_destroy(belt_problem* problem) { delete problem; }

belt_status belt_problem_add_dense(belt_problem* problem, const char* label,
                                   const int64_t* indices, size_t count,
                                   const double* values) {
  BELT_REQUIRE(problem);
  BELT_REQUIRE(indices);
  BELT_REQUIRE(values);
  if (!problem->token_sources.empty()) {
    return Fail(BELT_ERROR_VALIDATION,
                "cannot mix dense sources with file-based sources");
  }
  return Guard([&] {
    belt::SourceObservation obs;
    obs.label = label ? label : "";
    obs.indices.assign(indices, indices + count);
    const auto n = static_cast<Eigen::Index>(count);
    obs.matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                Eigen::Dynamic, Eigen::RowMajor>>(
        values, n, n);
    obs.Validate();
    problem->dense.push_back(std::move(obs));
  });
}

belt_status belt_problem_add_files(belt_problem* problem,
                                   const char* triplet_path,
                                   const char* vocab_path) {
  BELT_REQUIRE(problem);
  BELT_REQUIRE(triplet_path);
  BELT_REQUIRE(vocab_path);
  if (!problem->dense.empty()) {
    return Fail(BELT_ERROR_VALIDATION,
                "cannot mix file-based sources with dense sources");
  }
  return Guard([&] {
    problem->token_sources.push_back(
        belt::ReadTokenSource(triplet_path, vocab_path));
    problem->resolved.reset();
  });
}

belt_status belt_problem_add_dictionary(belt_problem* problem, int source_a,
                                        int source_b, const char* path) {
  BELT_REQUIRE(problem);
  BELT_REQUIRE(path);
  const auto count = static_cast<int>(problem->token_sources.size());
  if (source_a < 1 || source_a > count || source_b < 1 || source_b > count ||
      source_a == source_b) {
    return Fail(BELT_ERROR_VALIDATION,
                "dictionary sources must be two distinct file-based sources in "
                "[1, " + std::to_string(count) + "]");
  }
  return Guard([&] {
    problem->dictionaries.push_back(
        belt::ReadDictionary(path, source_a - 1, source_b - 1));
    problem->resolved.reset();
  });
}

size_t belt_problem_source_count(const belt_problem* problem) {
  if (problem == nullptr) return 0;
  return problem->token_sources.empty() ? problem->dense.size()
                                        : problem->token_sources.size();
}

belt_status belt_problem_select_rank(belt_problem* problem, double threshold,
                                     int* rank) {
  BELT_REQUIRE(problem);
  BELT_REQUIRE(rank);
  return Guard([&] {
    *rank = belt::SelectRankFromOverlaps(problem->Sources(), threshold);
  });
}

void belt_completion_options_init(belt_completion_options* options) {
  if (options == nullptr) return;
  options->method = BELT_METHOD_BELT;
  options->rank = 0;
  options->threads = 1;
  options->rank_threshold = 0.0;
}

belt_status belt_complete(belt_problem* problem,
                          const belt_completion_options* options,
                          belt_result** out) {
  BELT_REQUIRE(problem);
  BELT_REQUIRE(options);
  BELT_REQUIRE(out);
  return Guard([&] {
    const auto& sources = problem->Sources();
    if (sources.empty()) throw belt::ValidationError("problem has no sources");
    auto result = std::make_unique<belt_result>();
    result->method = ToMethod(options->method);
    if (options->rank_threshold > 0.0) {
      result->rank_threshold = options->rank_threshold;
    }
    belt::CompletionOptions opts;
    opts.threads = options->threads;
    result->result =
        belt::RunEstimator(result->method, sources, options->rank, opts);
    for (const auto& s : sources) result->source_labels.push_back(s.label);
    for (belt::EntityId id : result->result.global_index) {
      if (problem->resolved) {
        result->row_tokens.push_back(
            problem->resolved->entity_tokens[static_cast<std::size_t>(id)]);
      } else {
        result->row_tokens.push_back({std::to_string(id)});
      }
    }
    *out = result.release();
  });
}

void belt_result_destroy(belt_result* result) { delete result; }

size_t belt_result_dimension(const belt_result* result) {
  return result ? result->result.global_index.size() : 0;
}

int belt_result_rank(const belt_result* result) {
  return result ? result->result.rank() : 0;
}

size_t belt_result_source_count(const belt_result* result) {
  return result ? result->result.noise_estimates.size() : 0;
}

belt_status belt_result_entities(const belt_result* result, int64_t* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  std::copy(result->result.global_index.begin(),
            result->result.global_index.end(), out);
  return BELT_OK;
}

belt_status belt_result_low_rank(const belt_result* result, double* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  return Guard([&] { CopyRowMajor(result->result.LowRank(), out); });
}

belt_status belt_result_imputed(const belt_result* result, double* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  return Guard([&] { CopyRowMajor(result->result.imputed, out); });
}

belt_status belt_result_embeddings(const belt_result* result, double* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  return Guard([&] { CopyRowMajor(result->result.embeddings, out); });
}

belt_status belt_result_eigenvalues(const belt_result* result, double* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  const auto& v = result->result.factors.values;
  std::copy(v.data(), v.data() + v.size(), out);
  return BELT_OK;
}

belt_status belt_result_noise(const belt_result* result, double* out) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(out);
  std::copy(result->result.noise_estimates.begin(),
            result->result.noise_estimates.end(), out);
  return BELT_OK;
}

belt_status belt_result_write(const belt_result* result,
                              const char* directory) {
  BELT_REQUIRE(result);
  BELT_REQUIRE(directory);
  return Guard([&] {
    const std::filesystem::path dir(directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw belt::IoError("cannot create '" + dir.string() + "': " +
                          ec.message());
    }
    std::vector<std::string> names;
    for (const auto& tokens : result->row_tokens) names.push_back(tokens.front());
    {
      std::ofstream out = OpenOutput(dir / "completed.tsv");
      belt::WriteTriplets(out, result->result.LowRank(), names);
    }
    {
      std::ofstream out = OpenOutput(dir / "embeddings.tsv");
      belt::WriteEmbeddings(out, result->result.embeddings, result->row_tokens);
    }
    {
      std::ofstream out = OpenOutput(dir / "report.json");
      out << belt::CompletionReportJson(result->result, result->source_labels,
                                        belt::MethodName(result->method),
                                        result->rank_threshold);
    }
  });
}

belt_status belt_sim_config_init(belt_sim_config* config, int setting) {
  BELT_REQUIRE(config);
  if (setting < 1 || setting > 3) {
    return Fail(BELT_ERROR_VALIDATION, "setting must be 1, 2 or 3");
  }
  const belt::SimConfig d = belt::DefaultSimConfig(setting);
  config->setting = d.setting;
  config->n = d.n;
  config->rank = d.rank;
  config->m = d.m;
  config->p0 = d.p0;
  config->sigma = d.sigma;
  config->sigma_rule = d.sigma_rule == belt::SigmaRule::kConstant
                           ? BELT_SIGMA_CONSTANT
                           : BELT_SIGMA_SCALED;
  config->n_test = d.n_test;
  config->seed = d.seed;
  config->replicates = d.replicates;
  config->require_overlap = d.require_overlap ? 1 : 0;
  config->threads = d.threads;
  return BELT_OK;
}

belt_status belt_simulate(const belt_sim_config* config,
                          const belt_method* methods, size_t method_count,
                          belt_metric_table** out) {
  BELT_REQUIRE(config);
  BELT_REQUIRE(methods);
  BELT_REQUIRE(out);
  return Guard([&] {
    std::vector<belt::Method> list;
    for (size_t i = 0; i < method_count; ++i) list.push_back(ToMethod(methods[i]));
    auto table = std::make_unique<belt_metric_table>();
    table->rows = belt::RunSetting(ToSimConfig(*config), list);
    *out = table.release();
  });
}

void belt_metric_table_destroy(belt_metric_table* table) { delete table; }

size_t belt_metric_table_size(const belt_metric_table* table) {
  return table ? table->rows.size() : 0;
}

size_t belt_metric_table_failures(const belt_metric_table* table) {
  if (table == nullptr) return 0;
  size_t failures = 0;
  for (const auto& row : table->rows) failures += row.ok ? 0 : 1;
  return failures;
}

belt_status belt_metric_table_row(const belt_metric_table* table, size_t index,
                                  belt_metric_row* out) {
  BELT_REQUIRE(table);
  BELT_REQUIRE(out);
  if (index >= table->rows.size()) {
    return Fail(BELT_ERROR_VALIDATION, "row index out of range");
  }
  const belt::MetricRow& row = table->rows[index];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto precision = [&](int k) {
    const auto it = row.precision_at.find(k);
    return row.ok && it != row.precision_at.end() ? it->second : nan;
  };
  out->setting = row.setting;
  out->method = FromMethod(row.method);
  out->n = row.n;
  out->rank = row.rank;
  out->m = row.m;
  out->p0 = row.p0;
  out->sigma = row.sigma;
  out->replicate = row.replicate;
  out->seed = row.seed;
  out->ok = row.ok ? 1 : 0;
  out->err_f = row.ok ? row.err_f : nan;
  out->err_2 = row.ok ? row.err_2 : nan;
  out->precision_at_1 = precision(1);
  out->precision_at_5 = precision(5);
  out->precision_at_10 = precision(10);
  out->precision_at_20 = precision(20);
  out->wall_ms = row.wall_ms;
  return BELT_OK;
}

const char* belt_metric_table_row_error(const belt_metric_table* table,
                                        size_t index) {
  if (table == nullptr || index >= table->rows.size()) return "";
  return table->rows[index].error.c_str();
}

belt_status belt_metric_table_write_csv(const belt_metric_table* table,
                                        const char* path, int include_timing) {
  BELT_REQUIRE(table);
  BELT_REQUIRE(path);
  return Guard([&] {
    std::ofstream out = OpenOutput(path);
    belt::WriteMetricsCsv(out, table->rows, include_timing != 0);
    if (!out) throw belt::IoError(std::string("failed writing '") + path + "'");
  });
}

belt_status belt_embeddings_load(const char* path, belt_embeddings** out) {
  BELT_REQUIRE(path);
  BELT_REQUIRE(out);
  return Guard([&] {
    auto table = std::make_unique<belt_embeddings>();
    table->table = belt::ReadEmbeddings(path);
    *out = table.release();
  });
}

void belt_embeddings_destroy(belt_embeddings* table) { delete table; }

size_t belt_embeddings_count(const belt_embeddings* table) {
  return table ? table->table.tokens.size() : 0;
}

size_t belt_embeddings_dimension(const belt_embeddings* table) {
  return table ? static_cast<size_t>(table->table.vectors.cols()) : 0;
}

const char* belt_embeddings_token(const belt_embeddings* table, size_t row) {
  if (table == nullptr || row >= table->table.tokens.size()) return nullptr;
  return table->table.tokens[row].c_str();
}

belt_status belt_embeddings_find(const belt_embeddings* table,
                                 const char* token, size_t* row) {
  BELT_REQUIRE(table);
  BELT_REQUIRE(token);
  BELT_REQUIRE(row);
  const auto found = table->table.Find(token);
  if (!found) {
    return Fail(BELT_ERROR_NOT_FOUND,
                std::string("unknown token '") + token + "'");
  }
  *row = static_cast<size_t>(*found);
  return BELT_OK;
}

belt_status belt_translate(const belt_embeddings* table, size_t query,
                           const size_t* candidates, size_t candidate_count,
                           size_t k, double threshold, belt_match* out,
                           size_t* out_count) {
  BELT_REQUIRE(table);
  BELT_REQUIRE(candidates);
  BELT_REQUIRE(out_count);
  if (k > 0) BELT_REQUIRE(out);
  return Guard([&] {
    std::vector<Eigen::Index> rows(candidates, candidates + candidate_count);
    const auto matches =
        belt::Translate(table->table.vectors, static_cast<Eigen::Index>(query),
                        rows, k, threshold);
    for (std::size_t i = 0; i < matches.size(); ++i) {
      out[i] = {static_cast<size_t>(matches[i].candidate), matches[i].cosine};
    }
    *out_count = matches.size();
  });
}

}  // extern "C"
