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

#ifndef BELT_SIMLAB_HPP_
#define BELT_SIMLAB_HPP_

// Seeded synthetic problems and the three simulation drivers: completion
// error versus sampling rate (setting 1), versus source count (setting 2),
// and embedding translation precision versus noise (setting 3).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "belt/baselines.hpp"
#include "belt/metrics.hpp"
#include "belt/model.hpp"
#include "belt/rng.hpp"

namespace belt {

enum class SigmaRule {
  kScaled,    // sigma_s = s * sigma, s = 1..m
  kConstant,  // sigma_s = sigma
};

struct SimConfig {
  int setting = 1;
  std::int64_t n = 2000;
  int rank = 20;
  int m = 2;
  double p0 = 0.1;
  double sigma = 0.1;
  SigmaRule sigma_rule = SigmaRule::kScaled;
  int n_test = 200;
  std::uint64_t seed = 1;
  int replicates = 10;
  // Redraw a source whose overlap with an earlier source is below the rank.
  bool require_overlap = true;
  int threads = 1;

  // Throws ValidationError.
  void Validate() const;
  double SourceSigma(int s) const;  // s is 0-based
};

// Defaults for a setting: sigma rule, m and p0 as in the simulation study,
// at desk scale (N = 2000, r = 20).
SimConfig DefaultSimConfig(int setting);

// Eigenvalues i.i.d. U(sqrt(N), 4 sqrt(N)) sorted descending; singular space
// is the sign-corrected Q factor of an N x r standard Gaussian matrix.
GroundTruth GenerateGroundTruth(std::int64_t n, int r, Rng& rng);
GroundTruth GenerateGroundTruth(std::int64_t n, int r, std::uint64_t seed);

// {i : Bernoulli(p)}; redrawn while smaller than max(min_size, 1), at most
// 100 draws in total. `draws` receives the number of draws used.
std::vector<EntityId> SampleIndexSet(std::int64_t n, double p,
                                     std::size_t min_size, Rng& rng,
                                     int* draws = nullptr);

// W*[population_rows, population_rows] plus symmetric N(0, sigma^2) noise on
// the upper triangle (diagonal included), labelled with `entity_ids`.
SourceObservation ObserveSource(const GroundTruth& truth,
                                const std::vector<EntityId>& population_rows,
                                std::vector<EntityId> entity_ids, double sigma,
                                Rng& rng, std::string label);

// One Bernoulli(p) source with noise level sigma. The index set and the
// noise use separate sub-streams of `seed`.
SourceObservation SampleSource(const GroundTruth& truth, double p,
                               double sigma, std::uint64_t seed);

// Everything generated for one replicate.
struct SimReplicate {
  GroundTruth truth;
  std::vector<SourceObservation> sources;
  // Setting 3: population rows of the test vertices, ascending. The copy of
  // test vertex j in source s has entity id N + s * n_test + j.
  std::vector<EntityId> test_vertices;
  std::int64_t population = 0;
  std::uint64_t seed = 0;

  EntityId PopulationRow(EntityId entity) const;
  // W* restricted to the given entities (duplicated test vertices included).
  Matrix TruthOn(const std::vector<EntityId>& entities) const;
};

std::uint64_t ReplicateSeed(const SimConfig& config, int replicate);
SimReplicate GenerateReplicate(const SimConfig& config, int replicate);

// Setting-3 precision@k (k in {1, 5, 10, 20}) averaged over translations
// from sources 2..m into source 1.
std::map<int, double> TranslationPrecision(const SimReplicate& rep,
                                           const CompletionResult& result,
                                           int n_test);

// One row per (replicate, method), in that order. Estimator failures are
// recorded in the row, not thrown.
std::vector<MetricRow> RunSetting(const SimConfig& config,
                                  std::span<const Method> methods);

}  // namespace belt

#endif  // BELT_SIMLAB_HPP_
