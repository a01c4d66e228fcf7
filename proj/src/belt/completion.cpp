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

#include "belt/completion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>

#include "belt/errors.hpp"
#include "belt/parallel.hpp"

namespace belt {
namespace {

Matrix GatherRows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

// Sigma^{1/2} with eigenvalues floored at kEigenFloor * lambda_max.
Vector ClampedSqrt(const Vector& values) {
  const double largest = values.size() > 0 ? values.maxCoeff() : 0.0;
  if (!(largest > 0.0)) {
    throw NumericalError(
        "pairwise imputation: fewer than r positive eigenvalues (largest "
        "eigenvalue is not positive)");
  }
  const double floor = kEigenFloor * largest;
  return values.unaryExpr([floor](double v) { return std::sqrt(std::max(v, floor)); });
}

void CheckSourceId(const AggregatedMatrix& agg, int s) {
  if (s < 0 || s >= agg.source_count()) {
    throw ValidationError("source id " + std::to_string(s) + " outside [0, " +
                          std::to_string(agg.source_count()) + ")");
  }
}

std::string SourceName(const AggregatedMatrix& agg, int s) {
  const std::string& label = agg.labels[static_cast<std::size_t>(s)];
  return label.empty() ? std::to_string(s + 1) : "'" + label + "'";
}

}  // namespace

double EstimateNoise(const SourceObservation& obs, int r) {
  obs.Validate();
  if (r < 1 || r > obs.size()) {
    throw ValidationError("EstimateNoise: rank " + std::to_string(r) +
                          " exceeds source dimension " +
                          std::to_string(obs.size()));
  }
  const EigPair top = TopEig(obs.matrix, r);
  const Matrix residual = obs.matrix - top.Reconstruct();
  return residual.norm() / static_cast<double>(obs.size());
}

AggregatedMatrix Aggregate(std::span<const SourceObservation> sources,
                           std::span<const double> noise) {
  if (sources.empty()) throw ValidationError("Aggregate: no sources");
  if (noise.size() != sources.size()) {
    throw ValidationError("Aggregate: " + std::to_string(noise.size()) +
                          " noise estimates for " +
                          std::to_string(sources.size()) + " sources");
  }
  AggregatedMatrix agg;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    sources[s].Validate();
    if (sources[s].indices.empty()) {
      throw ValidationError("Aggregate: source " + std::to_string(s) +
                            " has an empty index set");
    }
    if (!(noise[s] >= 0.0) || !std::isfinite(noise[s])) {
      throw ValidationError("Aggregate: invalid noise estimate for source " +
                            std::to_string(s));
    }
    agg.global_index.insert(agg.global_index.end(), sources[s].indices.begin(),
                            sources[s].indices.end());
    agg.labels.push_back(sources[s].label);
    agg.source_noise.push_back(std::max(noise[s], kNoiseFloor));
  }
  std::sort(agg.global_index.begin(), agg.global_index.end());
  agg.global_index.erase(
      std::unique(agg.global_index.begin(), agg.global_index.end()),
      agg.global_index.end());

  const auto n = static_cast<Eigen::Index>(agg.global_index.size());
  agg.entity_sources.resize(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < sources.size(); ++s) {
    std::vector<Eigen::Index> rows;
    rows.reserve(sources[s].indices.size());
    for (EntityId id : sources[s].indices) {
      const Eigen::Index row = agg.LocalRow(id);
      rows.push_back(row);
      agg.entity_sources[static_cast<std::size_t>(row)].push_back(
          static_cast<int>(s));
    }
    agg.source_rows.push_back(std::move(rows));
  }

  // Two passes so that alpha = w_s / sum(w) is formed explicitly; a single
  // observer then gets weight exactly one.
  Matrix total_weight = Matrix::Zero(n, n);
  agg.coverage = Eigen::MatrixXi::Zero(n, n);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double sigma = agg.source_noise[s];
    const double w = 1.0 / (sigma * sigma);
    const auto& rows = agg.source_rows[s];
    for (Eigen::Index b : rows) {
      for (Eigen::Index a : rows) {
        total_weight(a, b) += w;
        agg.coverage(a, b) += 1;
      }
    }
  }
  agg.matrix = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double sigma = agg.source_noise[s];
    const double w = 1.0 / (sigma * sigma);
    const auto& rows = agg.source_rows[s];
    const Matrix& src = sources[s].matrix;
    const auto size = static_cast<Eigen::Index>(rows.size());
    for (Eigen::Index j = 0; j < size; ++j) {
      for (Eigen::Index i = 0; i < size; ++i) {
        const double value = i == j ? src(i, i) : 0.5 * (src(i, j) + src(j, i));
        const Eigen::Index a = rows[static_cast<std::size_t>(i)];
        const Eigen::Index b = rows[static_cast<std::size_t>(j)];
        agg.matrix(a, b) += (w / total_weight(a, b)) * value;
      }
    }
  }
  return agg;
}

PairPartition PartitionPair(const AggregatedMatrix& agg, int a, int b) {
  CheckSourceId(agg, a);
  CheckSourceId(agg, b);
  const auto& rows_a = agg.source_rows[static_cast<std::size_t>(a)];
  const auto& rows_b = agg.source_rows[static_cast<std::size_t>(b)];
  PairPartition part;
  std::size_t i = 0, j = 0;
  while (i < rows_a.size() || j < rows_b.size()) {
    if (j == rows_b.size() || (i < rows_a.size() && rows_a[i] < rows_b[j])) {
      part.only_a.push_back(rows_a[i]);
      part.only_a_in_a.push_back(static_cast<Eigen::Index>(i));
      ++i;
    } else if (i == rows_a.size() || rows_b[j] < rows_a[i]) {
      part.only_b.push_back(rows_b[j]);
      part.only_b_in_b.push_back(static_cast<Eigen::Index>(j));
      ++j;
    } else {
      part.shared.push_back(rows_a[i]);
      part.shared_in_a.push_back(static_cast<Eigen::Index>(i));
      part.shared_in_b.push_back(static_cast<Eigen::Index>(j));
      ++i;
      ++j;
    }
  }
  return part;
}

Matrix ImputeFromFactors(const EigPair& factors_s, const EigPair& factors_k,
                         const PairPartition& part) {
  // Block layout: W_s = [s\k ; s&k], W_k = [s&k ; k\s].
  const Matrix vs1 = GatherRows(factors_s.vectors, part.only_a_in_a);
  const Matrix vs2 = GatherRows(factors_s.vectors, part.shared_in_a);
  const Matrix vk1 = GatherRows(factors_k.vectors, part.shared_in_b);
  const Matrix vk2 = GatherRows(factors_k.vectors, part.only_b_in_b);
  const Vector root_s = ClampedSqrt(factors_s.values);
  const Vector root_k = ClampedSqrt(factors_k.values);

  const Matrix cross = root_s.asDiagonal() * (vs2.transpose() * vk1) *
                       root_k.asDiagonal();
  const OrthogonalMap align = ProcrustesMap(cross);
  return (vs1 * root_s.asDiagonal()) * align.matrix *
         (root_k.asDiagonal() * vk2.transpose());
}

ImputedBlock ImputePair(const AggregatedMatrix& agg, int s, int k, int r) {
  if (r < 1) throw ValidationError("ImputePair: rank must be positive");
  if (s == k) throw ValidationError("ImputePair: source pair must be distinct");
  const PairPartition part = PartitionPair(agg, s, k);
  ImputedBlock block;
  block.rows = part.only_a;
  block.cols = part.only_b;
  if (block.empty()) {
    block.values.resize(static_cast<Eigen::Index>(block.rows.size()),
                        static_cast<Eigen::Index>(block.cols.size()));
    return block;
  }
  if (part.shared.size() < static_cast<std::size_t>(r)) {
    throw PreconditionError(
        "ImputePair: sources " + std::to_string(s) + " and " +
        std::to_string(k) + " overlap on " +
        std::to_string(part.shared.size()) + " entities, fewer than rank " +
        std::to_string(r));
  }
  const auto& rows_s = agg.source_rows[static_cast<std::size_t>(s)];
  const auto& rows_k = agg.source_rows[static_cast<std::size_t>(k)];
  const EigPair fs = TopEig(Gather(agg.matrix, rows_s, rows_s), r);
  const EigPair fk = TopEig(Gather(agg.matrix, rows_k, rows_k), r);
  block.values = ImputeFromFactors(fs, fk, part);
  return block;
}

void ProcrustesImputer::Prepare(const AggregatedMatrix& agg, int r,
                                int threads) {
  factors_.assign(static_cast<std::size_t>(agg.source_count()), std::nullopt);
  ParallelFor(factors_.size(), threads, [&](std::size_t s) {
    const auto& rows = agg.source_rows[s];
    // A source smaller than r cannot satisfy the overlap condition.
    if (rows.size() < static_cast<std::size_t>(r)) return;
    factors_[s] = TopEig(Gather(agg.matrix, rows, rows), r);
  });
}

Matrix ProcrustesImputer::Impute(const AggregatedMatrix&,
                                 const PairPartition& part, int s, int k,
                                 int) const {
  const auto& fs = factors_.at(static_cast<std::size_t>(s));
  const auto& fk = factors_.at(static_cast<std::size_t>(k));
  if (!fs || !fk) {
    throw PreconditionError("ProcrustesImputer: missing factors for sources " +
                            std::to_string(s) + " and " + std::to_string(k));
  }
  return ImputeFromFactors(*fs, *fk, part);
}

CompletionResult LowRankStep(Matrix imputed, int r) {
  if (r < 1 || r > imputed.rows()) {
    throw ValidationError("rank " + std::to_string(r) +
                          " outside [1, " + std::to_string(imputed.rows()) +
                          "] for the completed matrix");
  }
  CompletionResult result;
  result.factors = TopEig(imputed, r);
  result.factors.values = result.factors.values.cwiseMax(0.0);
  result.imputed = std::move(imputed);
  result.embeddings = EmbeddingsOf(result);
  return result;
}

int SelectRankFromOverlaps(std::span<const SourceObservation> sources,
                           double threshold) {
  if (sources.empty()) throw ValidationError("no sources given");
  auto rank_of = [threshold](const Matrix& block) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        0.5 * (block + block.transpose()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("rank selection: eigensolver failed on a " +
                           std::to_string(block.rows()) + "x" +
                           std::to_string(block.rows()) + " block");
    }
    std::vector<double> values(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + block.rows());
    std::reverse(values.begin(), values.end());
    return SelectRank(values, threshold);
  };

  std::optional<int> best;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    sources[s].Validate();
    for (std::size_t k = s + 1; k < sources.size(); ++k) {
      std::vector<Eigen::Index> in_s, in_k;
      const auto& a = sources[s].indices;
      const auto& b = sources[k].indices;
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
          ++i;
        } else if (b[j] < a[i]) {
          ++j;
        } else {
          in_s.push_back(static_cast<Eigen::Index>(i++));
          in_k.push_back(static_cast<Eigen::Index>(j++));
        }
      }
      if (in_s.empty()) continue;
      for (int candidate : {rank_of(Gather(sources[s].matrix, in_s, in_s)),
                            rank_of(Gather(sources[k].matrix, in_k, in_k))}) {
        best = best ? std::min(*best, candidate) : candidate;
      }
    }
  }
  if (!best) {
    for (const auto& source : sources) {
      const int candidate = rank_of(source.matrix);
      best = best ? std::min(*best, candidate) : candidate;
    }
  }
  return *best;
}

Matrix EmbeddingsOf(const CompletionResult& result) {
  return result.factors.vectors *
         result.factors.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

CompletionResult CompleteWith(std::span<const SourceObservation> sources,
                              int r, PairImputer& imputer,
                              const CompletionOptions& options) {
  if (r < 1) throw ValidationError("rank must be positive");
  if (sources.empty()) throw ValidationError("no sources given");

  // Step I: noise estimates and aggregation.
  std::vector<double> noise(sources.size());
  ParallelFor(sources.size(), options.threads, [&](std::size_t s) {
    noise[s] = EstimateNoise(sources[s], r);
  });
  const AggregatedMatrix agg = Aggregate(sources, noise);

  // Step II: pairwise imputation.
  imputer.Prepare(agg, r, options.threads);
  const int m = agg.source_count();
  std::vector<ImputationDecision> log;
  std::vector<PairPartition> parts;
  std::vector<std::size_t> runnable;
  for (int s = 0; s < m; ++s) {
    for (int k = s + 1; k < m; ++k) {
      PairPartition part = PartitionPair(agg, s, k);
      ImputationDecision d;
      d.source_a = s;
      d.source_b = k;
      d.noise_sum = noise[static_cast<std::size_t>(s)] +
                    noise[static_cast<std::size_t>(k)];
      d.overlap = part.shared.size();
      d.block_rows = part.only_a.size();
      d.block_cols = part.only_b.size();
      if (part.only_a.empty() || part.only_b.empty()) {
        d.status = "empty";
      } else if (part.shared.size() < imputer.MinOverlap(r)) {
        d.status = "skipped";
      } else {
        d.status = "imputed";
        runnable.push_back(log.size());
      }
      log.push_back(std::move(d));
      parts.push_back(std::move(part));
    }
  }

  std::vector<Matrix> blocks(log.size());
  ParallelFor(runnable.size(), options.threads, [&](std::size_t t) {
    const std::size_t p = runnable[t];
    blocks[p] = imputer.Impute(agg, parts[p], log[p].source_a,
                               log[p].source_b, r);
  });

  // Conflict resolution after the join: smallest noise sum first, then the
  // lexicographically smallest pair.
  std::vector<std::size_t> order = runnable;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return std::tie(log[x].noise_sum, log[x].source_a,
                                     log[x].source_b) <
                            std::tie(log[y].noise_sum, log[y].source_a,
                                     log[y].source_b);
                   });
  Matrix completed = agg.matrix;
  const Eigen::Index n = agg.size();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n,
                                                                    false);
  for (std::size_t p : order) {
    const PairPartition& part = parts[p];
    const Matrix& block = blocks[p];
    ImputationDecision& d = log[p];
    for (std::size_t j = 0; j < part.only_b.size(); ++j) {
      for (std::size_t i = 0; i < part.only_a.size(); ++i) {
        const Eigen::Index a = part.only_a[i];
        const Eigen::Index b = part.only_b[j];
        if (agg.IsObserved(a, b)) {
          ++d.entries_observed;
        } else if (filled(a, b)) {
          ++d.entries_superseded;
        } else {
          const double v =
              block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          completed(a, b) = v;
          completed(b, a) = v;
          filled(a, b) = true;
          filled(b, a) = true;
          ++d.entries_assigned;
        }
      }
    }
  }

  std::size_t uncovered = 0;
  std::ostringstream examples;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (agg.IsObserved(i, j) || filled(i, j)) continue;
      if (uncovered < 10) {
        examples << " (" << agg.global_index[static_cast<std::size_t>(i)]
                 << "," << agg.global_index[static_cast<std::size_t>(j)]
                 << ")";
      }
      ++uncovered;
    }
  }
  if (uncovered > 0) {
    std::ostringstream msg;
    msg << uncovered << " unobserved entity pairs are not covered by any "
        << "source pair with overlap >= " << imputer.MinOverlap(r) << ":"
        << examples.str() << (uncovered > 10 ? " ..." : "");
    for (const auto& d : log) {
      if (d.status == "skipped") {
        msg << "; sources " << SourceName(agg, d.source_a) << " and "
            << SourceName(agg, d.source_b) << " overlap on " << d.overlap
            << " entities, rank is " << r;
      }
    }
    throw CompletionError(msg.str());
  }

  // Step III.
  CompletionResult result = LowRankStep(std::move(completed), r);
  result.global_index = agg.global_index;
  result.noise_estimates = std::move(noise);
  result.imputation_log = std::move(log);
  return result;
}

CompletionResult Complete(std::span<const SourceObservation> sources, int r,
                          const CompletionOptions& options) {
  ProcrustesImputer imputer;
  return CompleteWith(sources, r, imputer, options);
}

}  // namespace belt
