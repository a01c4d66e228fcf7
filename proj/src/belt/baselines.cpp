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

#include "belt/baselines.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "belt/errors.hpp"
#include "belt/parallel.hpp"

namespace belt {
namespace {

Matrix SchurProduct(const AggregatedMatrix& agg, const PairPartition& part,
                    int r) {
  const Matrix left = Gather(agg.matrix, part.only_a, part.shared);
  const Matrix middle = Gather(agg.matrix, part.shared, part.shared);
  const Matrix right = Gather(agg.matrix, part.shared, part.only_b);
  return left * TruncatedPseudoInverse(middle, r) * right;
}

}  // namespace

Matrix TruncatedPseudoInverse(const Matrix& m, int r) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = kPinvTolerance * sv(0);
  Eigen::Index keep = 0;
  while (keep < sv.size() && keep < r && sv(keep) > cutoff) ++keep;
  if (keep == 0) return Matrix::Zero(m.cols(), m.rows());
  const Vector inverse = sv.head(keep).cwiseInverse();
  return svd.matrixV().leftCols(keep) * inverse.asDiagonal() *
         svd.matrixU().leftCols(keep).transpose();
}

ImputedBlock SmcImpute(const AggregatedMatrix& agg, int s, int k, int r) {
  if (r < 1) throw ValidationError("SmcImpute: rank must be positive");
  if (s == k) throw ValidationError("SmcImpute: source pair must be distinct");
  const PairPartition part = PartitionPair(agg, s, k);
  if (part.shared.empty()) {
    throw PreconditionError("SmcImpute: sources " + std::to_string(s) +
                            " and " + std::to_string(k) + " do not overlap");
  }
  ImputedBlock block;
  block.rows = part.only_a;
  block.cols = part.only_b;
  block.values = SchurProduct(agg, part, r);
  return block;
}

Matrix SchurImputer::Impute(const AggregatedMatrix& agg,
                            const PairPartition& part, int, int,
                            int r) const {
  return SchurProduct(agg, part, r);
}

CompletionResult ZeroImpute(const AggregatedMatrix& agg, int r) {
  CompletionResult result = LowRankStep(agg.matrix, r);
  result.global_index = agg.global_index;
  result.noise_estimates = agg.source_noise;
  return result;
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kBelt:
      return "belt";
    case Method::kSmc:
      return "smc";
    case Method::kPretrain:
      return "pretrain";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  if (name == "belt") return Method::kBelt;
  if (name == "smc") return Method::kSmc;
  if (name == "pretrain") return Method::kPretrain;
  return std::nullopt;
}

CompletionResult RunEstimator(Method method,
                              std::span<const SourceObservation> sources,
                              int r, const CompletionOptions& options) {
  switch (method) {
    case Method::kBelt:
      return Complete(sources, r, options);
    case Method::kSmc: {
      SchurImputer imputer;
      return CompleteWith(sources, r, imputer, options);
    }
    case Method::kPretrain: {
      if (r < 1) throw ValidationError("rank must be positive");
      std::vector<double> noise(sources.size());
      ParallelFor(sources.size(), options.threads, [&](std::size_t s) {
        noise[s] = EstimateNoise(sources[s], r);
      });
      CompletionResult result = ZeroImpute(Aggregate(sources, noise), r);
      result.noise_estimates = std::move(noise);
      return result;
    }
  }
  throw ValidationError("unknown estimator");
}

}  // namespace belt
