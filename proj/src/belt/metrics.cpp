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

#include "belt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "belt/errors.hpp"

namespace belt {

RelativeErrors ComputeRelativeErrors(const Matrix& estimate,
                                     const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw ValidationError("relative errors: shape mismatch");
  }
  const double truth_f = truth.norm();
  if (!(truth_f > 0.0)) {
    throw ValidationError("relative errors: truth has zero norm");
  }
  const Matrix diff = estimate - truth;
  RelativeErrors out;
  out.frobenius = diff.norm() / truth_f;
  auto spectral = [](const Matrix& m) {
    if (m.rows() == m.cols() && (m - m.transpose()).norm() == 0.0) {
      return SymmetricSpectralNorm(m);
    }
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  };
  out.spectral = spectral(diff) / spectral(truth);
  return out;
}

double CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

std::vector<Match> Translate(const Matrix& embeddings, Eigen::Index query,
                             std::span<const Eigen::Index> candidates,
                             std::size_t k, double threshold) {
  if (candidates.empty()) throw ValidationError("translate: no candidates");
  if (query < 0 || query >= embeddings.rows()) {
    throw ValidationError("translate: query row out of range");
  }
  const Vector q = embeddings.row(query).transpose();
  const double q_norm = q.norm();
  if (q_norm == 0.0) {
    Warn("translate: query row " + std::to_string(query) + " has zero norm");
    return {};
  }
  std::vector<Match> ranked;
  ranked.reserve(candidates.size());
  std::size_t skipped = 0;
  for (Eigen::Index c : candidates) {
    if (c < 0 || c >= embeddings.rows()) {
      throw ValidationError("translate: candidate row out of range");
    }
    const double c_norm = embeddings.row(c).norm();
    if (c_norm == 0.0) {
      ++skipped;
      continue;
    }
    const double cosine = embeddings.row(c).dot(q) / (q_norm * c_norm);
    if (cosine >= threshold) ranked.push_back({c, cosine});
  }
  if (skipped > 0) {
    Warn("translate: skipped " + std::to_string(skipped) +
         " zero-norm candidate rows");
  }
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), [](const Match& a, const Match& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.candidate < b.candidate;
                    });
  ranked.resize(keep);
  return ranked;
}

std::map<int, double> PrecisionAtKs(const Matrix& embeddings,
                                    std::span<const TestPair> pairs,
                                    std::span<const Eigen::Index> candidates,
                                    std::span<const int> ks) {
  if (pairs.empty()) throw ValidationError("precision@k: empty test set");
  if (ks.empty()) return {};
  for (int k : ks) {
    if (k < 1) throw ValidationError("precision@k: k must be positive");
  }
  const int k_max = *std::max_element(ks.begin(), ks.end());

  // Group counterparts by query, keeping first-appearance order.
  std::vector<Eigen::Index> queries;
  std::unordered_map<Eigen::Index, std::set<Eigen::Index>> truths;
  for (const auto& [query, truth] : pairs) {
    auto [it, inserted] = truths.try_emplace(query);
    if (inserted) queries.push_back(query);
    it->second.insert(truth);
  }

  std::map<int, double> hits;
  for (int k : ks) hits[k] = 0.0;
  for (Eigen::Index query : queries) {
    const auto ranked = Translate(embeddings, query, candidates,
                                  static_cast<std::size_t>(k_max), -1.0);
    const auto& truth = truths[query];
    std::size_t first_hit = ranked.size();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (truth.count(ranked[i].candidate)) {
        first_hit = i;
        break;
      }
    }
    for (int k : ks) {
      if (first_hit < static_cast<std::size_t>(k)) hits[k] += 1.0;
    }
  }
  for (auto& [k, value] : hits) value /= static_cast<double>(queries.size());
  return hits;
}

double PrecisionAtK(const Matrix& embeddings, std::span<const TestPair> pairs,
                    std::span<const Eigen::Index> candidates, std::size_t k) {
  const int ks[] = {static_cast<int>(k)};
  return PrecisionAtKs(embeddings, pairs, candidates, ks).at(ks[0]);
}

}  // namespace belt
