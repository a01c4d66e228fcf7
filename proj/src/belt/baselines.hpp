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

#ifndef BELT_BASELINES_HPP_
#define BELT_BASELINES_HPP_

// Competing estimators: Schur-complement imputation (SMC) and zero-fill
// ("pre-train").

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "belt/completion.hpp"

namespace belt {

// Singular values of the overlap block below this fraction of the largest
// are treated as zero in the truncated pseudo-inverse.
inline constexpr double kPinvTolerance = 1e-10;

// W[s\k, s&k] * pinv_r(W[s&k, s&k]) * W[s&k, k\s] on the aggregated matrix,
// with the pseudo-inverse truncated to at most r singular values.
ImputedBlock SmcImpute(const AggregatedMatrix& agg, int s, int k, int r);

// Rank-r truncated Moore-Penrose inverse.
Matrix TruncatedPseudoInverse(const Matrix& m, int r);

class SchurImputer final : public PairImputer {
 public:
  std::string_view name() const override { return "smc"; }
  std::size_t MinOverlap(int) const override { return 1; }
  void Prepare(const AggregatedMatrix&, int, int) override {}
  Matrix Impute(const AggregatedMatrix& agg, const PairPartition& part, int s,
                int k, int r) const override;
};

// Leaves the missing blocks of W-tilde at zero and runs the rank-r step.
CompletionResult ZeroImpute(const AggregatedMatrix& agg, int r);

enum class Method { kBelt, kSmc, kPretrain };

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

// Noise estimation + aggregation + the method's imputation + rank-r step.
CompletionResult RunEstimator(Method method,
                              std::span<const SourceObservation> sources,
                              int r, const CompletionOptions& options = {});

}  // namespace belt

#endif  // BELT_BASELINES_HPP_
