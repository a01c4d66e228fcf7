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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

#include "belt/completion.hpp"
#include "belt/io.hpp"
#include "belt/metrics.hpp"
#include "belt/simlab.hpp"
#include "support.hpp"

namespace belt {
namespace {

namespace fs = std::filesystem;

fs::path WorkDir() {
  static const fs::path dir = [] {
    const char* env = std::getenv("BELT_TEST_TMP");
    fs::path base = env ? fs::path(env) : fs::temp_directory_path();
    fs::path path = base / ("cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
    return path;
  }();
  return dir;
}

fs::path Fresh(const std::string& name) {
  const fs::path path = WorkDir() / name;
  fs::remove_all(path);
  fs::create_directories(path);
  return path;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome Run(const std::string& args, const std::string& env = "") {
  const fs::path out = WorkDir() / "stdout.txt";
  const fs::path err = WorkDir() / "stderr.txt";
  const std::string command = env + " '" + std::string(BELT_CLI_PATH) + "' " +
                              args + " >'" + out.string() + "' 2>'" +
                              err.string() + "'";
  const int status = std::system(command.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = Slurp(out);
  o.err = Slurp(err);
  return o;
}

std::vector<std::map<std::string, std::string>> ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::map<std::string, std::string> row;
    std::size_t start = 0;
    for (const auto& name : header) {
      const std::size_t end = line.find(',', start);
      row[name] = line.substr(start, end == std::string::npos
                                         ? std::string::npos
                                         : end - start);
      start = end == std::string::npos ? line.size() : end + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string Token(EntityId id) { return "e" + std::to_string(id); }

// Writes a source as triplet and vocabulary files named <stem>.tsv/.vocab.
std::pair<std::string, std::string> WriteSource(const fs::path& dir,
                                                const std::string& stem,
                                                const SourceObservation& obs) {
  std::vector<std::string> names;
  for (EntityId id : obs.indices) names.push_back(Token(id));
  const fs::path tsv = dir / (stem + ".tsv");
  const fs::path vocab = dir / (stem + ".vocab");
  std::ofstream t(tsv, std::ios::binary);
  WriteTriplets(t, obs.matrix, names);
  std::ofstream v(vocab, std::ios::binary);
  for (const auto& n : names) v << n << '\n';
  return {tsv.string(), vocab.string()};
}

std::map<std::pair<std::string, std::string>, double> ReadCompleted(
    const fs::path& path) {
  std::map<std::pair<std::string, std::string>, double> out;
  std::ifstream in(path);
  std::string a, b, v;
  while (std::getline(in, a, '\t') && std::getline(in, b, '\t') &&
         std::getline(in, v)) {
    out[{a, b}] = *ParseDouble(v);
  }
  return out;
}

const char* kSimulateArgs =
    "simulate --setting 1 --n 400 --rank 8 --m 2 --p0 0.3 --sigma 0.1 "
    "--replicates 3 --seed 7 --method belt";

TEST_CASE("simulate writes one row per replicate") {
  const fs::path dir = Fresh("sim");
  const Outcome o = Run(std::string(kSimulateArgs) + " --out '" +
                        dir.string() + "'");
  REQUIRE(o.code == 0);
  const std::string csv = Slurp(dir / "metrics.csv");
  CHECK(csv.rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
  const auto rows = ReadCsv(dir / "metrics.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].at("replicate") == std::to_string(i));
    CHECK(rows[i].at("method") == "belt");
    CHECK(rows[i].at("precision_at_5").empty());
    CHECK(rows[i].at("wall_ms").empty());
    CHECK(!rows[i].at("err_f").empty());
  }
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
  const fs::path a = Fresh("det_a");
  const fs::path b = Fresh("det_b");
  REQUIRE(Run(std::string(kSimulateArgs) + " --out '" + a.string() + "'")
              .code == 0);
  REQUIRE(Run(std::string(kSimulateArgs) + " --out '" + b.string() + "'",
              "BELT_THREADS=3")
              .code == 0);
  CHECK(Slurp(a / "metrics.csv") == Slurp(b / "metrics.csv"));
}

TEST_CASE("simulate --timing fills wall_ms") {
  const fs::path dir = Fresh("timing");
  REQUIRE(Run(std::string(kSimulateArgs) + " --timing --out '" +
              dir.string() + "'")
              .code == 0);
  for (const auto& row : ReadCsv(dir / "metrics.csv")) {
    CHECK(!row.at("wall_ms").empty());
  }
}

TEST_CASE("simulate rejects invalid flags with exit code 2") {
  const fs::path dir = Fresh("bad");
  CHECK(Run("simulate --setting 4 --out '" + dir.string() + "'").code == 2);
  CHECK(Run("simulate --setting 1 --p0 abc --out '" + dir.string() + "'")
            .code == 2);
  CHECK(Run("simulate --setting 1").code == 2);
  CHECK(Run("simulate --setting 1 --method als --out '" + dir.string() + "'")
            .code == 2);
  const Outcome o = Run("frobnicate");
  CHECK(o.code == 2);
  CHECK(o.err.find("Usage") != std::string::npos);
}

TEST_CASE("simulate exits 1 when every replicate fails") {
  const fs::path dir = Fresh("fail");
  // Sources of about four entities cannot overlap on rank 8.
  const Outcome o = Run(
      "simulate --setting 1 --n 40 --rank 8 --p0 0.1 --replicates 2 "
      "--no-overlap-conditioning --out '" + dir.string() + "'");
  CHECK(o.code == 1);
  CHECK(ReadCsv(dir / "metrics.csv").size() == 2);
}

TEST_CASE("simulate: SMC rows are no better than the BELT mean at p0 = 0.1") {
  const fs::path dir = Fresh("smc");
  REQUIRE(Run("simulate --setting 1 --n 400 --rank 8 --m 2 --p0 0.1 "
              "--sigma 0.1 --replicates 10 --seed 7 --method belt,smc --out '" +
              dir.string() + "'")
              .code == 0);
  double belt_sum = 0.0;
  int belt_count = 0;
  std::vector<double> smc;
  for (const auto& row : ReadCsv(dir / "metrics.csv")) {
    REQUIRE(!row.at("err_f").empty());
    const double err = *ParseDouble(row.at("err_f"));
    if (row.at("method") == "belt") {
      belt_sum += err;
      ++belt_count;
    } else {
      smc.push_back(err);
    }
  }
  REQUIRE(belt_count == 10);
  REQUIRE(smc.size() == 10);
  for (double err : smc) CHECK(err >= belt_sum / belt_count);
}

TEST_CASE("complete reproduces noiseless two-source data") {
  const fs::path dir = Fresh("complete");
  const GroundTruth truth = GenerateGroundTruth(120, 4, 501);
  Rng rng(502);
  const auto [va, vb] = testing::SplitCover(120, 30, rng);
  const auto [ta, la] = WriteSource(dir, "left", testing::Noiseless(truth, va));
  const auto [tb, lb] = WriteSource(dir, "right", testing::Noiseless(truth, vb));
  const fs::path out = dir / "out";
  const Outcome o = Run("complete --sources '" + ta + "','" + tb +
                        "' --vocab '" + la + "','" + lb +
                        "' --rank 4 --out '" + out.string() + "'");
  REQUIRE(o.code == 0);
  const auto completed = ReadCompleted(out / "completed.tsv");
  CHECK(completed.size() == 120 * 121 / 2);
  const Matrix full = truth.Full();
  double max_err = 0.0;
  for (const auto& [key, value] : completed) {
    const EntityId i = std::stoll(key.first.substr(1));
    const EntityId j = std::stoll(key.second.substr(1));
    max_err = std::max(max_err, std::abs(value - full(i, j)));
  }
  CHECK(max_err < 1e-6);

  const auto report = nlohmann::json::parse(Slurp(out / "report.json"));
  CHECK(report["rank"] == 4);
  CHECK(report["sources"].size() == 2);
  CHECK(report["sources"][0]["label"] == "left");
  CHECK(report["sources"][0]["sigma_hat"].get<double>() < 1e-8);
  CHECK(report["imputation_log"][0]["status"] == "imputed");

  const EmbeddingTable emb = ReadEmbeddings((out / "embeddings.tsv").string());
  CHECK(emb.tokens.size() == 120);
  CHECK(emb.vectors.cols() == 4);
}

TEST_CASE("complete --rank-auto picks the rank of a clean spectrum") {
  const fs::path dir = Fresh("auto");
  const GroundTruth truth = GenerateGroundTruth(50, 3, 503);
  std::vector<EntityId> all(50);
  for (int i = 0; i < 50; ++i) all[i] = i;
  const auto [t, v] = WriteSource(dir, "only", testing::Noiseless(truth, all));
  const fs::path out = dir / "out";
  const Outcome o = Run("complete --sources '" + t + "' --vocab '" + v +
                        "' --rank-auto 0.95 --out '" + out.string() + "'");
  REQUIRE(o.code == 0);
  const auto report = nlohmann::json::parse(Slurp(out / "report.json"));
  CHECK(report["rank"] == 3);
  CHECK(report["rank_threshold"] == 0.95);
}

TEST_CASE("complete with one source is its rank-r truncation") {
  const fs::path dir = Fresh("single");
  const GroundTruth truth = GenerateGroundTruth(40, 3, 504);
  std::vector<EntityId> all(40);
  for (int i = 0; i < 40; ++i) all[i] = i;
  Rng rng(505);
  const SourceObservation obs = ObserveSource(truth, all, all, 0.3, rng, "s");
  const auto [t, v] = WriteSource(dir, "s", obs);
  const fs::path out = dir / "out";
  REQUIRE(Run("complete --sources '" + t + "' --vocab '" + v +
              "' --rank 3 --out '" + out.string() + "'")
              .code == 0);
  const Matrix expected = TopEig(obs.matrix, 3).Reconstruct();
  double max_err = 0.0;
  for (const auto& [key, value] : ReadCompleted(out / "completed.tsv")) {
    const EntityId i = std::stoll(key.first.substr(1));
    const EntityId j = std::stoll(key.second.substr(1));
    max_err = std::max(max_err, std::abs(value - expected(i, j)));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("complete maps dictionary pairs onto shared entities") {
  const fs::path dir = Fresh("dict");
  const GroundTruth truth = GenerateGroundTruth(60, 2, 506);
  std::vector<EntityId> a, b;
  for (EntityId i = 0; i < 40; ++i) a.push_back(i);
  for (EntityId i = 25; i < 60; ++i) b.push_back(i);
  const auto [ta, la] = WriteSource(dir, "en", testing::Noiseless(truth, a));
  // Rename the second source's tokens so overlap comes only from the
  // dictionary.
  SourceObservation right = testing::Noiseless(truth, b);
  std::vector<std::string> names;
  for (EntityId id : b) names.push_back("x" + std::to_string(id));
  {
    std::ofstream t(dir / "fr.tsv");
    WriteTriplets(t, right.matrix, names);
    std::ofstream v(dir / "fr.vocab");
    for (const auto& n : names) v << n << '\n';
    std::ofstream d(dir / "dict.tsv");
    for (EntityId id = 25; id < 40; ++id) d << Token(id) << "\tx" << id << '\n';
    d << "unknown\tx30\n";
  }
  const fs::path out = dir / "out";
  const Outcome o = Run("complete --sources '" + ta + "','" +
                        (dir / "fr.tsv").string() + "' --vocab '" + la +
                        "','" + (dir / "fr.vocab").string() +
                        "' --dictionary '1:2:" + (dir / "dict.tsv").string() +
                        "' --rank 2 --out '" + out.string() + "'");
  REQUIRE(o.code == 0);
  CHECK(o.err.find("skipped 1") != std::string::npos);
  const auto completed = ReadCompleted(out / "completed.tsv");
  CHECK(completed.size() == 60 * 61 / 2);
  const Matrix full = truth.Full();
  const auto it = completed.find({"e0", "x59"});
  REQUIRE(it != completed.end());
  CHECK(std::abs(it->second - full(0, 59)) < 1e-6);
  const EmbeddingTable emb = ReadEmbeddings((out / "embeddings.tsv").string());
  CHECK(emb.Find("e30").has_value());
  CHECK(emb.Find("x30").has_value());
  CHECK(emb.vectors.row(*emb.Find("e30")) == emb.vectors.row(*emb.Find("x30")));
}

TEST_CASE("complete exits 1 naming the pair when the overlap is too small") {
  const fs::path dir = Fresh("overlap");
  const GroundTruth truth = GenerateGroundTruth(40, 5, 507);
  std::vector<EntityId> a, b;
  for (EntityId i = 0; i < 22; ++i) a.push_back(i);
  for (EntityId i = 19; i < 40; ++i) b.push_back(i);
  const auto [ta, la] = WriteSource(dir, "alpha", testing::Noiseless(truth, a));
  const auto [tb, lb] = WriteSource(dir, "beta", testing::Noiseless(truth, b));
  const Outcome o = Run("complete --sources '" + ta + "','" + tb +
                        "' --vocab '" + la + "','" + lb +
                        "' --rank 5 --out '" + (dir / "out").string() + "'");
  CHECK(o.code == 1);
  CHECK(o.err.find("'alpha' and 'beta' overlap on 3") != std::string::npos);
}

TEST_CASE("complete exits 2 on parse errors with the line number") {
  const fs::path dir = Fresh("parse");
  {
    std::ofstream(dir / "s.vocab") << "a\nb\n";
    std::ofstream(dir / "s.tsv") << "a\ta\t1\na\tb\tnot-a-number\n";
  }
  const Outcome o = Run("complete --sources '" + (dir / "s.tsv").string() +
                        "' --vocab '" + (dir / "s.vocab").string() +
                        "' --rank 1 --out '" + (dir / "out").string() + "'");
  CHECK(o.code == 2);
  CHECK(o.err.find("s.tsv:2:") != std::string::npos);
  CHECK(Run("complete --sources '" + (dir / "s.tsv").string() +
            "' --vocab '" + (dir / "s.vocab").string() + "' --out x")
            .code == 2);
  CHECK(Run("complete --sources '" + (dir / "missing.tsv").string() +
            "' --vocab '" + (dir / "s.vocab").string() + "' --rank 1 --out x")
            .code == 2);
}

TEST_CASE("translate ranks identical vectors first") {
  const fs::path dir = Fresh("translate");
  {
    std::ofstream(dir / "emb.tsv") << "q\t1\t0\t0\nc1\t0\t1\t0\nc2\t1\t0\t0\n"
                                      "c3\t0.6\t0.8\t0\nc4\t0\t0\t1\n";
    std::ofstream(dir / "queries.txt") << "q\nmissing\n";
    std::ofstream(dir / "cands.txt") << "c1\nc2\nc3\nc4\nghost\n";
  }
  const std::string base = "translate --embeddings '" +
                           (dir / "emb.tsv").string() + "' --queries '" +
                           (dir / "queries.txt").string() +
                           "' --candidates '" + (dir / "cands.txt").string() +
                           "'";
  Outcome o = Run(base + " --k 2");
  REQUIRE(o.code == 0);
  CHECK(o.out == "q\t1\tc2\t1\nq\t2\tc3\t0.59999999999999998\n");
  CHECK(o.err.find("missing") != std::string::npos);
  CHECK(o.err.find("ghost") != std::string::npos);

  o = Run(base + " --k 1 --threshold 0.99");
  CHECK(o.code == 0);
  CHECK(o.out == "q\t1\tc2\t1\n");

  {
    std::ofstream(dir / "emb2.tsv") << "q\t1\t0\nc1\t0\t1\nc2\t-1\t0\n";
    std::ofstream(dir / "c2.txt") << "c1\nc2\n";
    std::ofstream(dir / "q2.txt") << "q\n";
  }
  o = Run("translate --embeddings '" + (dir / "emb2.tsv").string() +
          "' --queries '" + (dir / "q2.txt").string() + "' --candidates '" +
          (dir / "c2.txt").string() + "' --k 1 --threshold 0.99");
  CHECK(o.code == 0);
  CHECK(o.out.empty());

  {
    std::ofstream(dir / "none.txt") << "nobody\nnoone\n";
  }
  o = Run("translate --embeddings '" + (dir / "emb.tsv").string() +
          "' --queries '" + (dir / "none.txt").string() + "' --candidates '" +
          (dir / "cands.txt").string() + "'");
  CHECK(o.code == 1);
}

TEST_CASE("translate agrees with batch precision on simulated embeddings") {
  const fs::path dir = Fresh("precision");
  SimConfig config = DefaultSimConfig(3);
  config.n = 600;
  config.rank = 5;
  config.p0 = 0.2;
  config.n_test = 40;
  config.sigma = 0.3;
  const SimReplicate sim = GenerateReplicate(config, 0);
  const CompletionResult result = Complete(sim.sources, config.rank);

  std::vector<std::vector<std::string>> tokens;
  for (EntityId id : result.global_index) tokens.push_back({Token(id)});
  {
    std::ofstream e(dir / "emb.tsv");
    WriteEmbeddings(e, result.embeddings, tokens);
    std::ofstream q(dir / "queries.txt");
    for (int j = 0; j < config.n_test; ++j) {
      q << Token(config.n + config.n_test + j) << '\n';
    }
    std::ofstream c(dir / "cands.txt");
    for (EntityId id : sim.sources[0].indices) c << Token(id) << '\n';
  }
  auto local = [&](EntityId id) {
    return static_cast<Eigen::Index>(
        std::lower_bound(result.global_index.begin(),
                         result.global_index.end(), id) -
        result.global_index.begin());
  };
  std::vector<TestPair> pairs;
  for (int j = 0; j < config.n_test; ++j) {
    pairs.emplace_back(local(config.n + config.n_test + j),
                       local(config.n + j));
  }
  std::vector<Eigen::Index> candidates;
  for (EntityId id : sim.sources[0].indices) candidates.push_back(local(id));

  for (int k : {1, 5, 10}) {
    const Outcome o = Run("translate --embeddings '" +
                          (dir / "emb.tsv").string() + "' --queries '" +
                          (dir / "queries.txt").string() + "' --candidates '" +
                          (dir / "cands.txt").string() + "' --k " +
                          std::to_string(k));
    REQUIRE(o.code == 0);
    std::set<std::string> hits;
    std::istringstream lines(o.out);
    std::string query, rank, candidate, cosine;
    int count = 0;
    while (std::getline(lines, query, '\t') && std::getline(lines, rank, '\t') &&
           std::getline(lines, candidate, '\t') && std::getline(lines, cosine)) {
      ++count;
      const EntityId q = std::stoll(query.substr(1));
      if (candidate == Token(q - config.n_test)) hits.insert(query);
    }
    CHECK(count == k * config.n_test);
    const double batch = PrecisionAtK(result.embeddings, pairs, candidates,
                                      static_cast<std::size_t>(k));
    CHECK(static_cast<double>(hits.size()) / config.n_test ==
          doctest::Approx(batch));
  }
}

}  // namespace
}  // namespace belt
