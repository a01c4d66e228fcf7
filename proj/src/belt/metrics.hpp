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

#ifndef BELT_METRICS_HPP_
#define BELT_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "belt/baselines.hpp"
#include "belt/spectral.hpp"

namespace belt {

struct RelativeErrors {
  double frobenius = 0.0;
  double spectral = 0.0;
};

// ||estimate - truth|| / ||truth|| in Frobenius and spectral norm.
RelativeErrors ComputeRelativeErrors(const Matrix& estimate,
                                     const Matrix& truth);

double CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b);

struct Match {
  Eigen::Index candidate = 0;
  double cosine = 0.0;
};

// Candidates ranked by cosine similarity to row `query` of `embeddings`
// (descending, ties by ascending row), keeping at most k with cosine >=
// threshold. Zero-norm rows are skipped with a warning.
std::vector<Match> Translate(const Matrix& embeddings, Eigen::Index query,
                             std::span<const Eigen::Index> candidates,
                             std::size_t k, double threshold = -1.0);

// (query row, true counterpart row).
using TestPair = std::pair<Eigen::Index, Eigen::Index>;

// Fraction of distinct queries with a true counterpart among their top-k
// candidates. A query listed with several counterparts scores a hit if any
// of them is retrieved.
double PrecisionAtK(const Matrix& embeddings, std::span<const TestPair> pairs,
                    std::span<const Eigen::Index> candidates, std::size_t k);

// Same for several k from a single ranking per query.
std::map<int, double> PrecisionAtKs(const Matrix& embeddings,
                                    std::span<const TestPair> pairs,
                                    std::span<const Eigen::Index> candidates,
                                    std::span<const int> ks);

// One experiment outcome.
struct MetricRow {
  int setting = 0;
  Method method = Method::kBelt;
  std::int64_t n = 0;
  int rank = 0;
  int m = 0;
  double p0 = 0.0;
  double sigma = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double err_f = 0.0;
  double err_2 = 0.0;
  std::map<int, double> precision_at;
  double wall_ms = 0.0;
};

}  // namespace belt

#endif  // BELT_METRICS_HPP_
