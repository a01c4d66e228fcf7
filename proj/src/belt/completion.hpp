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

#ifndef BELT_COMPLETION_HPP_
#define BELT_COMPLETION_HPP_

// Block-wise missing matrix completion: noise estimation, inverse-variance
// aggregation, pairwise Procrustes imputation and the final rank-r step.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "belt/model.hpp"
#include "belt/spectral.hpp"

namespace belt {

// Floor applied to a zero noise estimate before it is used as a weight.
inline constexpr double kNoiseFloor = 1e-12;
// Eigenvalues below kEigenFloor * lambda_max are raised to that floor before
// taking square roots inside the pairwise imputation.
inline constexpr double kEigenFloor = 1e-12;

// |V_s|^{-1} ||W^s - P_r(W^s)||_F, where P_r is the rank-r eigen-truncation.
double EstimateNoise(const SourceObservation& obs, int r);

// W-tilde with weights alpha^s_ij proportional to noise[s]^{-2}, normalized
// over the sources observing (i, j).
AggregatedMatrix Aggregate(std::span<const SourceObservation> sources,
                           std::span<const double> noise);

// An imputed off-diagonal block, labelled by local rows of the aggregated
// matrix.
struct ImputedBlock {
  std::vector<Eigen::Index> rows;  // V_s \ V_k
  std::vector<Eigen::Index> cols;  // V_k \ V_s
  Matrix values;

  bool empty() const { return rows.empty() || cols.empty(); }
};

// Row partition of a source pair inside the aggregated matrix.
struct PairPartition {
  std::vector<Eigen::Index> only_a;  // V_a \ V_b
  std::vector<Eigen::Index> shared;  // V_a and V_b
  std::vector<Eigen::Index> only_b;  // V_b \ V_a
  // Positions of those rows inside each source's own ordering.
  std::vector<Eigen::Index> only_a_in_a, shared_in_a;
  std::vector<Eigen::Index> shared_in_b, only_b_in_b;
};

PairPartition PartitionPair(const AggregatedMatrix& agg, int a, int b);

// Procrustes imputation of W*[V_s \ V_k, V_k \ V_s] from the rank-r
// eigendecompositions of W-tilde[V_s, V_s] and W-tilde[V_k, V_k].
// Requires |V_s and V_k| >= r unless one difference set is empty.
ImputedBlock ImputePair(const AggregatedMatrix& agg, int s, int k, int r);

// Same computation from precomputed per-source factors (rows in each source's
// ascending order).
Matrix ImputeFromFactors(const EigPair& factors_s, const EigPair& factors_k,
                         const PairPartition& part);

// Strategy for filling the (s\k) x (k\s) blocks inside the pipeline.
class PairImputer {
 public:
  virtual ~PairImputer() = default;
  virtual std::string_view name() const = 0;
  // Smallest overlap for which Impute may be called.
  virtual std::size_t MinOverlap(int r) const = 0;
  // Called once before any Impute call.
  virtual void Prepare(const AggregatedMatrix& agg, int r, int threads) = 0;
  virtual Matrix Impute(const AggregatedMatrix& agg, const PairPartition& part,
                        int s, int k, int r) const = 0;
};

class ProcrustesImputer final : public PairImputer {
 public:
  std::string_view name() const override { return "belt"; }
  std::size_t MinOverlap(int r) const override {
    return static_cast<std::size_t>(r);
  }
  void Prepare(const AggregatedMatrix& agg, int r, int threads) override;
  Matrix Impute(const AggregatedMatrix& agg, const PairPartition& part, int s,
                int k, int r) const override;

 private:
  std::vector<std::optional<EigPair>> factors_;
};

struct CompletionOptions {
  // Workers for per-source eigendecompositions and pair imputations.
  // Output is bit-identical for every value.
  int threads = 1;
};

// Runs noise estimation, aggregation and pairwise imputation with `imputer`,
// then the rank-r step. Throws CompletionError if some unobserved entry is
// not covered by any usable pair.
CompletionResult CompleteWith(std::span<const SourceObservation> sources,
                              int r, PairImputer& imputer,
                              const CompletionOptions& options = {});

// The full BELT pipeline with Procrustes imputation.
CompletionResult Complete(std::span<const SourceObservation> sources, int r,
                          const CompletionOptions& options = {});

// Rank-r eigendecomposition of a completed matrix; negative eigenvalues in
// the leading r are clamped to zero.
CompletionResult LowRankStep(Matrix imputed, int r);

// Rank for ingested data: the smallest r at which at least one overlap block
// W^s[V_s and V_k, V_s and V_k] (from either source of an overlapping pair)
// reaches `threshold` of its eigenvalue mass. With no overlapping pair the
// source matrices themselves are used.
int SelectRankFromOverlaps(std::span<const SourceObservation> sources,
                           double threshold);

// U-hat Sigma-hat^{1/2}.
Matrix EmbeddingsOf(const CompletionResult& result);

}  // namespace belt

#endif  // BELT_COMPLETION_HPP_
