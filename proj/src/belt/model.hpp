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

#ifndef BELT_MODEL_HPP_
#define BELT_MODEL_HPP_

// Data model shared by the completion pipeline, the baselines and the
// simulation drivers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "belt/spectral.hpp"

namespace belt {

using EntityId = std::int64_t;

// Population matrix W* = U* diag(eigenvalues) U*^T.
struct GroundTruth {
  Matrix singular_space;  // N x r, orthonormal columns
  Vector eigenvalues;     // descending, strictly positive

  Eigen::Index dimension() const { return singular_space.rows(); }
  Eigen::Index rank() const { return singular_space.cols(); }

  // W*[rows, rows] for population indices `rows`.
  Matrix Submatrix(const std::vector<EntityId>& rows) const;
  Matrix Full() const;
};

// One source: the principal submatrix W^s observed on sorted entity ids.
struct SourceObservation {
  std::vector<EntityId> indices;
  Matrix matrix;
  std::string label;

  Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
  // Throws ValidationError when an invariant does not hold.
  void Validate() const;
};

// W-tilde: inverse-variance weighted average of all sources on the union of
// their index sets. Entries no source observes are exactly zero.
struct AggregatedMatrix {
  Matrix matrix;
  // coverage(i, j) = number of sources observing entry (i, j).
  Eigen::MatrixXi coverage;
  std::vector<EntityId> global_index;
  // Local rows of each source, ascending.
  std::vector<std::vector<Eigen::Index>> source_rows;
  // Sources observing each local row, ascending.
  std::vector<std::vector<int>> entity_sources;
  std::vector<double> source_noise;
  std::vector<std::string> labels;

  Eigen::Index size() const { return matrix.rows(); }
  int source_count() const { return static_cast<int>(source_rows.size()); }

  std::vector<int> Observers(Eigen::Index i, Eigen::Index j) const;
  bool IsObserved(Eigen::Index i, Eigen::Index j) const {
    return coverage(i, j) > 0;
  }
  // (source, alpha) for every source observing (i, j); alphas sum to one.
  std::vector<std::pair<int, double>> Weights(Eigen::Index i,
                                              Eigen::Index j) const;
  // Local row of a global entity id, or -1.
  Eigen::Index LocalRow(EntityId id) const;
};

// One pairwise imputation step as recorded in the completion log.
struct ImputationDecision {
  int source_a = 0;
  int source_b = 0;
  double noise_sum = 0.0;
  std::size_t overlap = 0;
  std::size_t block_rows = 0;
  std::size_t block_cols = 0;
  std::size_t entries_assigned = 0;
  std::size_t entries_superseded = 0;  // already filled by a better pair
  std::size_t entries_observed = 0;    // observed by a third source
  std::string status;                  // "imputed", "empty" or "skipped"
};

struct CompletionResult {
  Matrix imputed;  // W-hat before the rank-r step
  EigPair factors;  // U-hat, Sigma-hat with Sigma-hat >= 0
  Matrix embeddings;  // U-hat Sigma-hat^{1/2}
  std::vector<EntityId> global_index;
  std::vector<double> noise_estimates;
  std::vector<ImputationDecision> imputation_log;

  Matrix LowRank() const { return factors.Reconstruct(); }
  int rank() const { return static_cast<int>(factors.rank()); }
};

}  // namespace belt

#endif  // BELT_MODEL_HPP_
