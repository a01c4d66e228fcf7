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

#include "belt/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <string>

#include "belt/completion.hpp"
#include "belt/errors.hpp"
#include "belt/parallel.hpp"

namespace belt {
namespace {

constexpr int kMaxDraws = 1000;

// Sub-stream tags inside a replicate.
constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kMaskStream = 1000;
constexpr std::uint64_t kNoiseStream = 2000;
constexpr std::uint64_t kTestStream = 3000;

std::vector<EntityId> DrawMask(std::int64_t n, double p, Rng& rng) {
  std::vector<EntityId> out;
  for (std::int64_t i = 0; i < n; ++i) {
    if (rng.Bernoulli(p)) out.push_back(i);
  }
  return out;
}

std::size_t OverlapSize(const std::vector<EntityId>& a,
                        const std::vector<EntityId>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

void SimConfig::Validate() const {
  if (setting < 1 || setting > 3) {
    throw ValidationError("setting must be 1, 2 or 3");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) throw ValidationError("p0 must lie in (0, 1)");
  if (rank < 1 || rank >= n) throw ValidationError("rank must lie in [1, N)");
  if (m < 1) throw ValidationError("m must be at least 1");
  if (n_test < 0) throw ValidationError("n_test must be nonnegative");
  if (setting == 3 && n_test == 0) {
    throw ValidationError("setting 3 needs n_test > 0");
  }
  if (setting == 3 && m < 2) {
    throw ValidationError("setting 3 needs at least two sources");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sigma must be a finite nonnegative number");
  }
  if (replicates < 1) throw ValidationError("replicates must be positive");
}

double SimConfig::SourceSigma(int s) const {
  return sigma_rule == SigmaRule::kScaled ? sigma * (s + 1) : sigma;
}

SimConfig DefaultSimConfig(int setting) {
  SimConfig config;
  config.setting = setting;
  switch (setting) {
    case 2:
      config.sigma_rule = SigmaRule::kConstant;
      break;
    case 3:
      config.sigma = 0.3;
      break;
    default:
      break;
  }
  return config;
}

GroundTruth GenerateGroundTruth(std::int64_t n, int r, Rng& rng) {
  if (r < 1 || r > n) {
    throw ValidationError("ground truth: rank " + std::to_string(r) +
                          " outside [1, " + std::to_string(n) + "]");
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> values(static_cast<std::size_t>(r));
  for (double& v : values) v = rng.Uniform(root_n, 4.0 * root_n);
  std::sort(values.begin(), values.end(), std::greater<>());

  Matrix gaussian(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) gaussian(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  // Sign correction makes the Q factor Haar distributed.
  for (Eigen::Index j = 0; j < r; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
  }
  GroundTruth truth;
  truth.singular_space = std::move(q);
  truth.eigenvalues = Eigen::Map<const Vector>(values.data(), r);
  return truth;
}

GroundTruth GenerateGroundTruth(std::int64_t n, int r, std::uint64_t seed) {
  Rng rng(seed);
  return GenerateGroundTruth(n, r, rng);
}

std::vector<EntityId> SampleIndexSet(std::int64_t n, double p,
                                     std::size_t min_size, Rng& rng,
                                     int* draws) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("sampling probability must lie in (0, 1)");
  }
  const std::size_t needed = std::max<std::size_t>(min_size, 1);
  for (int draw = 1; draw <= kMaxDraws; ++draw) {
    std::vector<EntityId> indices = DrawMask(n, p, rng);
    if (indices.size() >= needed) {
      if (draws) *draws = draw;
      if (draw > 1) {
        Warn("index set redrawn " + std::to_string(draw - 1) +
             " time(s) to reach size " + std::to_string(needed));
      }
      return indices;
    }
  }
  throw GenerationError("index set smaller than " + std::to_string(needed) +
                        " after " + std::to_string(kMaxDraws) + " draws (N=" +
                        std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

SourceObservation ObserveSource(const GroundTruth& truth,
                                const std::vector<EntityId>& population_rows,
                                std::vector<EntityId> entity_ids, double sigma,
                                Rng& rng, std::string label) {
  SourceObservation obs;
  obs.matrix = truth.Submatrix(population_rows);
  const auto size = obs.matrix.rows();
  if (sigma > 0.0) {
    for (Eigen::Index j = 0; j < size; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double e = sigma * rng.Normal();
        obs.matrix(i, j) += e;
        if (i != j) obs.matrix(j, i) += e;
      }
    }
  }
  // Exact symmetry regardless of rounding in the product above.
  obs.matrix = obs.matrix.triangularView<Eigen::Upper>();
  obs.matrix.triangularView<Eigen::StrictlyLower>() =
      obs.matrix.transpose().triangularView<Eigen::StrictlyLower>();
  obs.indices = std::move(entity_ids);
  obs.label = std::move(label);
  return obs;
}

SourceObservation SampleSource(const GroundTruth& truth, double p,
                               double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  Rng base(seed);
  Rng mask = base.Split(0);
  Rng noise = base.Split(1);
  std::vector<EntityId> indices =
      SampleIndexSet(truth.dimension(), p,
                     static_cast<std::size_t>(truth.rank()), mask);
  return ObserveSource(truth, indices, indices, sigma, noise, "source");
}

EntityId SimReplicate::PopulationRow(EntityId entity) const {
  if (entity < population) return entity;
  const auto n_test = static_cast<EntityId>(test_vertices.size());
  return test_vertices[static_cast<std::size_t>((entity - population) % n_test)];
}

Matrix SimReplicate::TruthOn(const std::vector<EntityId>& entities) const {
  std::vector<EntityId> rows(entities.size());
  std::transform(entities.begin(), entities.end(), rows.begin(),
                 [this](EntityId e) { return PopulationRow(e); });
  return truth.Submatrix(rows);
}

std::uint64_t ReplicateSeed(const SimConfig& config, int replicate) {
  return DeriveSeed(config.seed, static_cast<std::uint64_t>(replicate));
}

SimReplicate GenerateReplicate(const SimConfig& config, int replicate) {
  config.Validate();
  SimReplicate rep;
  rep.seed = ReplicateSeed(config, replicate);
  rep.population = config.n;
  const Rng base(rep.seed);
  Rng truth_rng = base.Split(kTruthStream);
  rep.truth = GenerateGroundTruth(config.n, config.rank, truth_rng);

  const auto r = static_cast<std::size_t>(config.rank);
  std::vector<std::vector<EntityId>> masks;
  for (int s = 0; s < config.m; ++s) {
    Rng mask_rng = base.Split(kMaskStream + static_cast<std::uint64_t>(s));
    bool accepted = false;
    for (int draw = 1; draw <= kMaxDraws && !accepted; ++draw) {
      std::vector<EntityId> mask = DrawMask(config.n, config.p0, mask_rng);
      accepted = mask.size() >= r;
      if (accepted && config.require_overlap) {
        for (const auto& earlier : masks) {
          if (OverlapSize(mask, earlier) < r) accepted = false;
        }
      }
      if (accepted) masks.push_back(std::move(mask));
    }
    if (!accepted) {
      throw GenerationError(
          "source " + std::to_string(s + 1) + ": no index set of size >= " +
          std::to_string(r) +
          (config.require_overlap ? " overlapping every earlier source on >= " +
                                        std::to_string(r) + " entities"
                                  : std::string()) +
          " in " + std::to_string(kMaxDraws) + " draws");
    }
  }

  if (config.setting == 3) {
    std::vector<EntityId> covered;
    for (const auto& mask : masks) {
      covered.insert(covered.end(), mask.begin(), mask.end());
    }
    std::sort(covered.begin(), covered.end());
    covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
    std::vector<EntityId> free_rows;
    std::int64_t next = 0;
    for (EntityId c : covered) {
      for (; next < c; ++next) free_rows.push_back(next);
      next = c + 1;
    }
    for (; next < config.n; ++next) free_rows.push_back(next);
    if (free_rows.size() < static_cast<std::size_t>(config.n_test)) {
      throw GenerationError("only " + std::to_string(free_rows.size()) +
                            " unobserved vertices for " +
                            std::to_string(config.n_test) + " test vertices");
    }
    // Partial Fisher-Yates.
    Rng test_rng = base.Split(kTestStream);
    for (std::size_t i = 0; i < static_cast<std::size_t>(config.n_test); ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(test_rng.Below(free_rows.size() - i));
      std::swap(free_rows[i], free_rows[j]);
    }
    rep.test_vertices.assign(free_rows.begin(),
                             free_rows.begin() + config.n_test);
    std::sort(rep.test_vertices.begin(), rep.test_vertices.end());
  }

  for (int s = 0; s < config.m; ++s) {
    Rng noise_rng = base.Split(kNoiseStream + static_cast<std::uint64_t>(s));
    std::vector<EntityId> rows = masks[static_cast<std::size_t>(s)];
    std::vector<EntityId> ids = rows;
    for (std::size_t j = 0; j < rep.test_vertices.size(); ++j) {
      rows.push_back(rep.test_vertices[j]);
      ids.push_back(config.n + static_cast<EntityId>(s) * config.n_test +
                    static_cast<EntityId>(j));
    }
    rep.sources.push_back(ObserveSource(rep.truth, rows, std::move(ids),
                                        config.SourceSigma(s), noise_rng,
                                        "source" + std::to_string(s + 1)));
  }
  return rep;
}

std::map<int, double> TranslationPrecision(const SimReplicate& rep,
                                           const CompletionResult& result,
                                           int n_test) {
  const auto& ids = result.global_index;
  auto local = [&ids](EntityId e) {
    auto it = std::lower_bound(ids.begin(), ids.end(), e);
    if (it == ids.end() || *it != e) {
      throw ValidationError("entity " + std::to_string(e) +
                            " missing from the completion");
    }
    return static_cast<Eigen::Index>(it - ids.begin());
  };
  std::vector<Eigen::Index> candidates;
  for (EntityId e : rep.sources.front().indices) candidates.push_back(local(e));

  static constexpr int kKs[] = {1, 5, 10, 20};
  std::map<int, double> mean;
  const int m = static_cast<int>(rep.sources.size());
  for (int s = 1; s < m; ++s) {
    std::vector<TestPair> pairs;
    for (int j = 0; j < n_test; ++j) {
      const EntityId query = rep.population + EntityId{s} * n_test + j;
      const EntityId truth = rep.population + j;
      pairs.emplace_back(local(query), local(truth));
    }
    for (const auto& [k, p] :
         PrecisionAtKs(result.embeddings, pairs, candidates, kKs)) {
      mean[k] += p / static_cast<double>(m - 1);
    }
  }
  return mean;
}

std::vector<MetricRow> RunSetting(const SimConfig& config,
                                  std::span<const Method> methods) {
  config.Validate();
  if (methods.empty()) throw ValidationError("no estimator selected");
  const std::size_t per_rep = methods.size();
  std::vector<MetricRow> rows(static_cast<std::size_t>(config.replicates) *
                              per_rep);
  ParallelFor(static_cast<std::size_t>(config.replicates), config.threads,
              [&](std::size_t rep_index) {
    const int replicate = static_cast<int>(rep_index);
    for (std::size_t t = 0; t < per_rep; ++t) {
      MetricRow& row = rows[rep_index * per_rep + t];
      row.setting = config.setting;
      row.method = methods[t];
      row.n = config.n;
      row.rank = config.rank;
      row.m = config.m;
      row.p0 = config.p0;
      row.sigma = config.sigma;
      row.replicate = replicate;
      row.seed = ReplicateSeed(config, replicate);
    }
    SimReplicate rep;
    try {
      rep = GenerateReplicate(config, replicate);
    } catch (const Error& e) {
      for (std::size_t t = 0; t < per_rep; ++t) {
        rows[rep_index * per_rep + t].error = e.what();
      }
      return;
    }
    for (std::size_t t = 0; t < per_rep; ++t) {
      MetricRow& row = rows[rep_index * per_rep + t];
      const auto start = std::chrono::steady_clock::now();
      try {
        const CompletionResult result =
            RunEstimator(methods[t], rep.sources, config.rank);
        const RelativeErrors err = ComputeRelativeErrors(
            result.LowRank(), rep.TruthOn(result.global_index));
        row.err_f = err.frobenius;
        row.err_2 = err.spectral;
        if (config.setting == 3) {
          row.precision_at = TranslationPrecision(rep, result, config.n_test);
        }
        row.ok = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  });
  return rows;
}

}  // namespace belt
