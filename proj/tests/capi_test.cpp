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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>

#include "belt/belt.h"

namespace {

namespace fs = std::filesystem;

// Rank-2 PSD matrix W = a a^T + b b^T over entities 0..n-1.
double Entry(std::int64_t i, std::int64_t j) {
  auto a = [](std::int64_t k) { return 1.0 + 0.1 * static_cast<double>(k); };
  auto b = [](std::int64_t k) { return std::sin(static_cast<double>(k)); };
  return a(i) * a(j) + b(i) * b(j);
}

std::vector<double> Block(const std::vector<std::int64_t>& ids) {
  std::vector<double> values;
  for (std::int64_t i : ids) {
    for (std::int64_t j : ids) values.push_back(Entry(i, j));
  }
  return values;
}

std::vector<std::int64_t> Range(std::int64_t begin, std::int64_t end) {
  std::vector<std::int64_t> out;
  for (std::int64_t i = begin; i < end; ++i) out.push_back(i);
  return out;
}

belt_problem* TwoSourceProblem() {
  belt_problem* problem = nullptr;
  REQUIRE(belt_problem_create(&problem) == BELT_OK);
  const auto a = Range(0, 12);
  const auto b = Range(8, 20);
  REQUIRE(belt_problem_add_dense(problem, "a", a.data(), a.size(),
                                 Block(a).data()) == BELT_OK);
  REQUIRE(belt_problem_add_dense(problem, "b", b.data(), b.size(),
                                 Block(b).data()) == BELT_OK);
  return problem;
}

TEST_CASE("Status and method names") {
  CHECK(std::string(belt_version()).size() > 0);
  CHECK(std::string(belt_status_name(BELT_OK)) == "ok");
  belt_method method;
  CHECK(belt_method_parse("smc", &method) == BELT_OK);
  CHECK(method == BELT_METHOD_SMC);
  CHECK(std::string(belt_method_name(BELT_METHOD_PRETRAIN)) == "pretrain");
  CHECK(belt_method_parse("als", &method) == BELT_ERROR_VALIDATION);
  CHECK(std::string(belt_last_error()).find("als") != std::string::npos);
  CHECK(belt_method_parse(nullptr, &method) == BELT_ERROR_NULL_ARGUMENT);
}

TEST_CASE("Dense two-source completion is exact") {
  belt_problem* problem = TwoSourceProblem();
  CHECK(belt_problem_source_count(problem) == 2);
  belt_completion_options options;
  belt_completion_options_init(&options);
  options.rank = 2;
  belt_result* result = nullptr;
  REQUIRE(belt_complete(problem, &options, &result) == BELT_OK);
  const std::size_t n = belt_result_dimension(result);
  REQUIRE(n == 20);
  CHECK(belt_result_rank(result) == 2);
  CHECK(belt_result_source_count(result) == 2);
  std::vector<std::int64_t> ids(n);
  REQUIRE(belt_result_entities(result, ids.data()) == BELT_OK);
  std::vector<double> low(n * n);
  REQUIRE(belt_result_low_rank(result, low.data()) == BELT_OK);
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double truth = Entry(ids[i], ids[j]);
      err += std::pow(low[i * n + j] - truth, 2);
      norm += truth * truth;
    }
  }
  CHECK(std::sqrt(err / norm) < 1e-8);

  std::vector<double> emb(n * 2), values(2), noise(2);
  CHECK(belt_result_embeddings(result, emb.data()) == BELT_OK);
  CHECK(belt_result_eigenvalues(result, values.data()) == BELT_OK);
  CHECK(values[0] >= values[1]);
  CHECK(belt_result_noise(result, noise.data()) == BELT_OK);
  CHECK(noise[0] < 1e-8);
  belt_result_destroy(result);
  belt_problem_destroy(problem);
}

TEST_CASE("Rank selection through the C API") {
  belt_problem* problem = TwoSourceProblem();
  int rank = 0;
  CHECK(belt_problem_select_rank(problem, 0.999999, &rank) == BELT_OK);
  CHECK(rank == 2);
  CHECK(belt_problem_select_rank(problem, 1.5, &rank) == BELT_ERROR_VALIDATION);
  belt_problem_destroy(problem);
}

TEST_CASE("Insufficient overlap is a completion error") {
  belt_problem* problem = nullptr;
  REQUIRE(belt_problem_create(&problem) == BELT_OK);
  const auto a = Range(0, 10);
  const auto b = Range(9, 20);
  belt_problem_add_dense(problem, "a", a.data(), a.size(), Block(a).data());
  belt_problem_add_dense(problem, "b", b.data(), b.size(), Block(b).data());
  belt_completion_options options;
  belt_completion_options_init(&options);
  options.rank = 2;
  belt_result* result = nullptr;
  CHECK(belt_complete(problem, &options, &result) == BELT_ERROR_COMPLETION);
  CHECK(result == nullptr);
  CHECK(std::string(belt_last_error()).find("'a' and 'b'") != std::string::npos);
  belt_problem_destroy(problem);
}

TEST_CASE("Invalid dense input is rejected") {
  belt_problem* problem = nullptr;
  REQUIRE(belt_problem_create(&problem) == BELT_OK);
  const std::int64_t unsorted[] = {3, 1};
  const double values[] = {1, 0, 0, 1};
  CHECK(belt_problem_add_dense(problem, "x", unsorted, 2, values) ==
        BELT_ERROR_VALIDATION);
  const std::int64_t ids[] = {1, 3};
  const double asym[] = {1, 2, 0, 1};
  CHECK(belt_problem_add_dense(problem, "x", ids, 2, asym) ==
        BELT_ERROR_VALIDATION);
  CHECK(belt_problem_add_dense(problem, "x", ids, 2, nullptr) ==
        BELT_ERROR_NULL_ARGUMENT);
  CHECK(belt_problem_source_count(problem) == 0);
  belt_problem_destroy(problem);
}

TEST_CASE("Simulation through the C API") {
  belt_sim_config config;
  REQUIRE(belt_sim_config_init(&config, 1) == BELT_OK);
  CHECK(config.n == 2000);
  CHECK(config.rank == 20);
  config.n = 300;
  config.rank = 4;
  config.p0 = 0.3;
  config.replicates = 2;
  const belt_method methods[] = {BELT_METHOD_BELT, BELT_METHOD_PRETRAIN};
  belt_metric_table* table = nullptr;
  REQUIRE(belt_simulate(&config, methods, 2, &table) == BELT_OK);
  CHECK(belt_metric_table_size(table) == 4);
  CHECK(belt_metric_table_failures(table) == 0);
  belt_metric_row row;
  REQUIRE(belt_metric_table_row(table, 1, &row) == BELT_OK);
  CHECK(row.method == BELT_METHOD_PRETRAIN);
  CHECK(row.replicate == 0);
  CHECK(row.ok == 1);
  CHECK(std::isnan(row.precision_at_5));
  CHECK(belt_metric_table_row(table, 4, &row) == BELT_ERROR_VALIDATION);
  CHECK(std::string(belt_metric_table_row_error(table, 0)).empty());
  belt_metric_table_destroy(table);

  REQUIRE(belt_sim_config_init(&config, 3) == BELT_OK);
  config.n = 400;
  config.rank = 4;
  config.p0 = 0.3;
  config.n_test = 20;
  config.replicates = 1;
  REQUIRE(belt_simulate(&config, methods, 1, &table) == BELT_OK);
  REQUIRE(belt_metric_table_row(table, 0, &row) == BELT_OK);
  CHECK(row.precision_at_1 >= 0.0);
  CHECK(row.precision_at_20 >= row.precision_at_1);
  belt_metric_table_destroy(table);

  CHECK(belt_sim_config_init(&config, 7) == BELT_ERROR_VALIDATION);
}

TEST_CASE("Embedding tables and translation") {
  const fs::path dir =
      fs::temp_directory_path() / ("belt_capi_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string path = (dir / "emb.tsv").string();
  std::ofstream(path) << "q\t1\t0\nc1\t0\t1\nc2\t1\t0\nc3\t1\t1\n";
  belt_embeddings* table = nullptr;
  REQUIRE(belt_embeddings_load(path.c_str(), &table) == BELT_OK);
  CHECK(belt_embeddings_count(table) == 4);
  CHECK(belt_embeddings_dimension(table) == 2);
  std::size_t q = 0;
  REQUIRE(belt_embeddings_find(table, "q", &q) == BELT_OK);
  std::size_t missing = 0;
  CHECK(belt_embeddings_find(table, "nope", &missing) == BELT_ERROR_NOT_FOUND);
  const std::size_t candidates[] = {1, 2, 3};
  belt_match matches[2];
  std::size_t count = 0;
  REQUIRE(belt_translate(table, q, candidates, 3, 2, -1.0, matches, &count) ==
          BELT_OK);
  REQUIRE(count == 2);
  CHECK(std::string(belt_embeddings_token(table, matches[0].row)) == "c2");
  CHECK(matches[0].cosine == doctest::Approx(1.0));
  CHECK(std::string(belt_embeddings_token(table, matches[1].row)) == "c3");
  REQUIRE(belt_translate(table, q, candidates, 3, 2, 0.99, matches, &count) ==
          BELT_OK);
  CHECK(count == 1);
  belt_embeddings_destroy(table);
  fs::remove_all(dir);
}

TEST_CASE("Warnings reach the registered callback") {
  static int calls = 0;
  belt_set_warning_callback(
      [](const char*, void* user) { ++*static_cast<int*>(user); }, &calls);
  const fs::path dir =
      fs::temp_directory_path() / ("belt_capi_w" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string path = (dir / "emb.tsv").string();
  std::ofstream(path) << "zero\t0\t0\nc\t1\t0\n";
  belt_embeddings* table = nullptr;
  REQUIRE(belt_embeddings_load(path.c_str(), &table) == BELT_OK);
  const std::size_t candidates[] = {1};
  belt_match match;
  std::size_t count = 1;
  CHECK(belt_translate(table, 0, candidates, 1, 1, -1.0, &match, &count) ==
        BELT_OK);
  CHECK(count == 0);
  CHECK(calls == 1);
  belt_set_warning_callback(nullptr, nullptr);
  belt_embeddings_destroy(table);
  fs::remove_all(dir);
}

}  // namespace
