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

// belt: command-line front end over the libbelt C API.
//
//   belt simulate  --setting {1,2,3} ... --out DIR      -> DIR/metrics.csv
//   belt complete  --sources a.tsv,b.tsv --vocab a.vocab,b.vocab
//                  (--rank R | --rank-auto T) --out DIR
//   belt translate --embeddings FILE --queries FILE --candidates FILE
//                  --k K --threshold C
//
// Exit codes: 0 success, 1 estimator or data failure, 2 invalid usage or
// unparsable input. BELT_THREADS caps worker threads (0 = auto).

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "belt/belt.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string FormatValue(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

int ThreadsFromEnv() {
  const char* env = std::getenv("BELT_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int threads = 0;
  const std::string_view text(env);
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), threads);
  if (result.ec != std::errc() || threads < 0) {
    std::cerr << "belt: ignoring invalid BELT_THREADS='" << env << "'\n";
    return 0;
  }
  return threads;
}

// Usage errors (bad input files) map to 2, everything else to 1.
int ReportError(belt_status status, const std::string& context) {
  std::cerr << "belt: " << context << ": " << belt_status_name(status) << ": "
            << belt_last_error() << '\n';
  return status == BELT_ERROR_PARSE || status == BELT_ERROR_VALIDATION
             ? kExitUsage
             : kExitFailure;
}

std::vector<std::string> SplitComma(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

struct SimulateArgs {
  int setting = 1;
  std::optional<long long> n;
  std::optional<int> rank;
  std::optional<int> m;
  std::optional<double> p0;
  std::optional<double> sigma;
  std::optional<int> replicates;
  std::optional<unsigned long long> seed;
  std::optional<int> n_test;
  std::string sigma_rule;
  std::string methods = "belt";
  std::string out;
  bool no_overlap_conditioning = false;
  bool timing = false;
};

int RunSimulate(const SimulateArgs& args) {
  belt_sim_config config;
  if (belt_sim_config_init(&config, args.setting) != BELT_OK) {
    std::cerr << "belt: " << belt_last_error() << '\n';
    return kExitUsage;
  }
  if (args.n) config.n = *args.n;
  if (args.rank) config.rank = *args.rank;
  if (args.m) config.m = *args.m;
  if (args.p0) config.p0 = *args.p0;
  if (args.sigma) config.sigma = *args.sigma;
  if (args.replicates) config.replicates = *args.replicates;
  if (args.seed) config.seed = *args.seed;
  if (args.n_test) config.n_test = *args.n_test;
  if (args.sigma_rule == "constant") config.sigma_rule = BELT_SIGMA_CONSTANT;
  if (args.sigma_rule == "scaled") config.sigma_rule = BELT_SIGMA_SCALED;
  config.require_overlap = args.no_overlap_conditioning ? 0 : 1;
  config.threads = ThreadsFromEnv();

  std::vector<belt_method> methods;
  for (const auto& name : SplitComma(args.methods)) {
    belt_method method;
    if (belt_method_parse(name.c_str(), &method) != BELT_OK) {
      std::cerr << "belt: " << belt_last_error() << '\n';
      return kExitUsage;
    }
    methods.push_back(method);
  }
  if (methods.empty()) {
    std::cerr << "belt: --method needs at least one estimator\n";
    return kExitUsage;
  }

  belt_metric_table* table = nullptr;
  belt_status status =
      belt_simulate(&config, methods.data(), methods.size(), &table);
  if (status != BELT_OK) return ReportError(status, "simulate");

  const std::size_t rows = belt_metric_table_size(table);
  const std::size_t failures = belt_metric_table_failures(table);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string error = belt_metric_table_row_error(table, i);
    if (!error.empty()) {
      std::cerr << "belt: row " << i << " failed: " << error << '\n';
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  const std::string path =
      (std::filesystem::path(args.out) / "metrics.csv").string();
  status = belt_metric_table_write_csv(table, path.c_str(), args.timing ? 1 : 0);
  belt_metric_table_destroy(table);
  if (status != BELT_OK) return ReportError(status, "writing " + path);
  return rows > 0 && failures == rows ? kExitFailure : kExitOk;
}

struct CompleteArgs {
  std::vector<std::string> sources;
  std::vector<std::string> vocab;
  std::optional<int> rank;
  std::optional<double> rank_auto;
  std::vector<std::string> dictionaries;
  std::string method = "belt";
  std::string out;
};

int RunComplete(const CompleteArgs& args) {
  if (args.sources.size() != args.vocab.size()) {
    std::cerr << "belt: --sources and --vocab must list the same number of "
                 "files\n";
    return kExitUsage;
  }
  belt_completion_options options;
  belt_completion_options_init(&options);
  if (belt_method_parse(args.method.c_str(), &options.method) != BELT_OK) {
    std::cerr << "belt: " << belt_last_error() << '\n';
    return kExitUsage;
  }
  options.threads = ThreadsFromEnv();

  belt_problem* problem = nullptr;
  belt_problem_create(&problem);
  struct Cleanup {
    belt_problem* p;
    ~Cleanup() { belt_problem_destroy(p); }
  } cleanup{problem};

  for (std::size_t i = 0; i < args.sources.size(); ++i) {
    const belt_status status = belt_problem_add_files(
        problem, args.sources[i].c_str(), args.vocab[i].c_str());
    if (status != BELT_OK) return ReportError(status, "reading sources");
  }
  for (const auto& spec : args.dictionaries) {
    // s:k:FILE with 1-based source numbers.
    const auto first = spec.find(':');
    const auto second =
        first == std::string::npos ? first : spec.find(':', first + 1);
    int a = 0, b = 0;
    if (second == std::string::npos ||
        std::from_chars(spec.data(), spec.data() + first, a).ec != std::errc() ||
        std::from_chars(spec.data() + first + 1, spec.data() + second, b).ec !=
            std::errc()) {
      std::cerr << "belt: --dictionary expects s:k:FILE, got '" << spec
                << "'\n";
      return kExitUsage;
    }
    const belt_status status = belt_problem_add_dictionary(
        problem, a, b, spec.substr(second + 1).c_str());
    if (status != BELT_OK) return ReportError(status, "reading dictionary");
  }

  if (args.rank_auto) {
    int rank = 0;
    const belt_status status =
        belt_problem_select_rank(problem, *args.rank_auto, &rank);
    if (status != BELT_OK) return ReportError(status, "selecting rank");
    options.rank = rank;
    options.rank_threshold = *args.rank_auto;
    std::cerr << "belt: selected rank " << rank << '\n';
  } else {
    options.rank = *args.rank;
  }

  belt_result* result = nullptr;
  belt_status status = belt_complete(problem, &options, &result);
  if (status != BELT_OK) {
    std::cerr << "belt: complete: " << belt_status_name(status) << ": "
              << belt_last_error() << '\n';
    return status == BELT_ERROR_PARSE ? kExitUsage : kExitFailure;
  }
  status = belt_result_write(result, args.out.c_str());
  belt_result_destroy(result);
  if (status != BELT_OK) return ReportError(status, "writing results");
  return kExitOk;
}

struct TranslateArgs {
  std::string embeddings;
  std::string queries;
  std::string candidates;
  int k = 1;
  double threshold = -1.0;
  std::string out;
};

int RunTranslate(const TranslateArgs& args) {
  belt_embeddings* table = nullptr;
  belt_status status = belt_embeddings_load(args.embeddings.c_str(), &table);
  if (status != BELT_OK) return ReportError(status, "reading embeddings");
  struct Cleanup {
    belt_embeddings* t;
    ~Cleanup() { belt_embeddings_destroy(t); }
  } cleanup{table};

  std::vector<std::size_t> candidates;
  for (const auto& token : ReadLines(args.candidates)) {
    std::size_t row = 0;
    if (belt_embeddings_find(table, token.c_str(), &row) != BELT_OK) {
      std::cerr << "belt: warning: unknown candidate token '" << token
                << "' skipped\n";
      continue;
    }
    candidates.push_back(row);
  }
  if (candidates.empty()) {
    std::cerr << "belt: no known candidate tokens\n";
    return kExitFailure;
  }

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::binary);
    if (!file) {
      std::cerr << "belt: cannot open '" << args.out << "' for writing\n";
      return kExitFailure;
    }
  }
  std::ostream& out = args.out.empty() ? std::cout : file;

  const std::vector<std::string> queries = ReadLines(args.queries);
  std::size_t failed = 0;
  std::vector<belt_match> matches(static_cast<std::size_t>(args.k));
  for (const auto& token : queries) {
    std::size_t row = 0;
    if (belt_embeddings_find(table, token.c_str(), &row) != BELT_OK) {
      std::cerr << "belt: warning: unknown query token '" << token
                << "' skipped\n";
      ++failed;
      continue;
    }
    std::size_t count = 0;
    status = belt_translate(table, row, candidates.data(), candidates.size(),
                            static_cast<std::size_t>(args.k), args.threshold,
                            matches.data(), &count);
    if (status != BELT_OK) {
      std::cerr << "belt: warning: query '" << token
                << "' failed: " << belt_last_error() << '\n';
      ++failed;
      continue;
    }
    for (std::size_t i = 0; i < count; ++i) {
      out << token << '\t' << (i + 1) << '\t'
          << belt_embeddings_token(table, matches[i].row) << '\t'
          << FormatValue(matches[i].cosine) << '\n';
    }
  }
  if (!queries.empty() && failed == queries.size()) return kExitFailure;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-wise missing matrix completion (libbelt " +
               std::string(belt_version()) + ")"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate =
      app.add_subcommand("simulate", "Run a simulation setting, write metrics.csv");
  simulate->add_option("--setting", sim.setting, "Simulation setting")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  simulate->add_option("--n", sim.n, "Population size N")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--rank", sim.rank, "Rank r")->check(CLI::PositiveNumber);
  simulate->add_option("--m", sim.m, "Number of sources")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--p0", sim.p0, "Per-source sampling probability")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--sigma", sim.sigma, "Noise scale")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--replicates", sim.replicates, "Replicates")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--n-test", sim.n_test, "Setting-3 test vertices")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--sigma-rule", sim.sigma_rule,
                       "scaled (sigma_s = s*sigma) or constant")
      ->check(CLI::IsMember({"scaled", "constant"}));
  simulate->add_option("--method", sim.methods,
                       "Comma-separated estimators: belt, smc, pretrain");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_flag("--no-overlap-conditioning", sim.no_overlap_conditioning,
                     "Keep index sets whose pairwise overlap is below the rank");
  simulate->add_flag("--timing", sim.timing, "Fill the wall_ms column");

  CompleteArgs comp;
  auto* complete =
      app.add_subcommand("complete", "Complete ingested triplet matrices");
  complete->add_option("--sources", comp.sources, "Triplet files")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  complete->add_option("--vocab", comp.vocab, "Vocabulary files")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  auto* rank_opt = complete->add_option("--rank", comp.rank, "Rank r")
                       ->check(CLI::PositiveNumber);
  auto* auto_opt =
      complete
          ->add_option("--rank-auto", comp.rank_auto,
                       "Select the rank by cumulative eigenvalue share")
          ->check(CLI::Range(0.0, 1.0));
  rank_opt->excludes(auto_opt);
  complete->add_option("--dictionary", comp.dictionaries,
                       "s:k:FILE token pairs shared by sources s and k");
  complete->add_option("--method", comp.method, "belt, smc or pretrain");
  complete->add_option("--out", comp.out, "Output directory")->required();

  TranslateArgs tr;
  auto* translate =
      app.add_subcommand("translate", "Rank candidates by cosine similarity");
  translate->add_option("--embeddings", tr.embeddings, "embeddings.tsv")
      ->required()
      ->check(CLI::ExistingFile);
  translate->add_option("--queries", tr.queries, "Query tokens, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  translate->add_option("--candidates", tr.candidates,
                        "Candidate tokens, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  translate->add_option("--k", tr.k, "Matches per query")
      ->check(CLI::PositiveNumber);
  translate->add_option("--threshold", tr.threshold, "Minimum cosine")
      ->check(CLI::Range(-1.0, 1.0));
  translate->add_option("--out", tr.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (complete->parsed() && !comp.rank && !comp.rank_auto) {
      throw CLI::RequiredError("--rank or --rank-auto");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);
    }
    std::cerr << "belt: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (simulate->parsed()) return RunSimulate(sim);
  if (complete->parsed()) return RunComplete(comp);
  return RunTranslate(tr);
}
