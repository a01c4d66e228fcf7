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

#include "belt/model.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "belt/errors.hpp"

namespace belt {

Matrix GroundTruth::Submatrix(const std::vector<EntityId>& rows) const {
  Matrix basis(static_cast<Eigen::Index>(rows.size()), rank());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    basis.row(static_cast<Eigen::Index>(i)) = singular_space.row(rows[i]);
  }
  Matrix out = basis * eigenvalues.asDiagonal() * basis.transpose();
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  return out;
}

Matrix GroundTruth::Full() const {
  Matrix out =
      singular_space * eigenvalues.asDiagonal() * singular_space.transpose();
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  return out;
}

void SourceObservation::Validate() const {
  const std::string name = label.empty() ? "source" : "source '" + label + "'";
  if (matrix.rows() != matrix.cols() || matrix.rows() != size()) {
    throw ValidationError(name + ": matrix is " +
                          std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()) + " but has " +
                          std::to_string(indices.size()) + " indices");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0) throw ValidationError(name + ": negative entity id");
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw ValidationError(name + ": indices must be strictly increasing");
    }
  }
  if (!matrix.allFinite()) {
    throw ValidationError(name + ": matrix has non-finite entries");
  }
  if (!IsSymmetric(matrix)) {
    throw ValidationError(name + ": matrix is not symmetric");
  }
}

std::vector<int> AggregatedMatrix::Observers(Eigen::Index i,
                                             Eigen::Index j) const {
  std::vector<int> out;
  const auto& a = entity_sources[static_cast<std::size_t>(i)];
  const auto& b = entity_sources[static_cast<std::size_t>(j)];
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<std::pair<int, double>> AggregatedMatrix::Weights(
    Eigen::Index i, Eigen::Index j) const {
  const std::vector<int> observers = Observers(i, j);
  double total = 0.0;
  for (int s : observers) {
    const double sigma = source_noise[static_cast<std::size_t>(s)];
    total += 1.0 / (sigma * sigma);
  }
  std::vector<std::pair<int, double>> out;
  for (int s : observers) {
    const double sigma = source_noise[static_cast<std::size_t>(s)];
    out.emplace_back(s, 1.0 / (sigma * sigma) / total);
  }
  return out;
}

Eigen::Index AggregatedMatrix::LocalRow(EntityId id) const {
  auto it = std::lower_bound(global_index.begin(), global_index.end(), id);
  if (it == global_index.end() || *it != id) return -1;
  return static_cast<Eigen::Index>(it - global_index.begin());
}

}  // namespace belt
