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

#ifndef BELT_TESTS_SUPPORT_HPP_
#define BELT_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "belt/model.hpp"
#include "belt/rng.hpp"
#include "belt/simlab.hpp"
#include "belt/spectral.hpp"

namespace belt::testing {

inline Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.Normal();
  }
  return m;
}

inline Matrix RandomSymmetric(Eigen::Index n, Rng& rng) {
  const Matrix a = RandomMatrix(n, n, rng);
  return 0.5 * (a + a.transpose());
}

inline Matrix RandomOrthogonal(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(RandomMatrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

inline double RelativeFrobenius(const Matrix& estimate, const Matrix& truth) {
  return (estimate - truth).norm() / truth.norm();
}

// Two index sets over [0, n) with exactly `overlap` shared entities whose
// union is all of [0, n).
inline std::pair<std::vector<EntityId>, std::vector<EntityId>> SplitCover(
    std::int64_t n, std::int64_t overlap, Rng& rng) {
  std::vector<EntityId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), EntityId{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.Below(i)]);
  }
  const std::int64_t only_a = (n - overlap) / 2;
  std::vector<EntityId> a(order.begin(), order.begin() + only_a + overlap);
  std::vector<EntityId> b(order.begin() + only_a, order.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {a, b};
}

inline SourceObservation Noiseless(const GroundTruth& truth,
                                   std::vector<EntityId> indices,
                                   std::string label = {}) {
  SourceObservation obs;
  obs.matrix = truth.Submatrix(indices);
  obs.indices = std::move(indices);
  obs.label = std::move(label);
  return obs;
}

}  // namespace belt::testing

#endif  // BELT_TESTS_SUPPORT_HPP_
