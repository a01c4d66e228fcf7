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

#include "belt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "belt/errors.hpp"

namespace belt {

Matrix EigPair::Reconstruct() const {
  Matrix out = vectors * values.asDiagonal() * vectors.transpose();
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  return out;
}

bool IsSymmetric(const Matrix& s, double tolerance) {
  if (s.rows() != s.cols()) return false;
  const double scale = s.norm();
  if (scale == 0.0) return true;
  return (s - s.transpose()).norm() <= tolerance * scale;
}

void ApplySignConvention(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double magnitude = std::abs(vectors(i, j));
      if (magnitude > best) {
        best = magnitude;
        pivot = i;
      }
    }
    if (vectors.rows() > 0 && vectors(pivot, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

EigPair TopEig(const Matrix& s, Eigen::Index r) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n) {
    throw ValidationError("TopEig: matrix is " + std::to_string(s.rows()) +
                          "x" + std::to_string(s.cols()) + ", not square");
  }
  if (r < 1 || r > n) {
    throw ValidationError("TopEig: rank " + std::to_string(r) +
                          " outside [1, " + std::to_string(n) + "]");
  }
  if (!s.allFinite()) {
    throw ValidationError("TopEig: matrix has non-finite entries");
  }
  if (!IsSymmetric(s)) {
    throw ValidationError("TopEig: matrix of dimension " + std::to_string(n) +
                          " is not symmetric");
  }
  const Matrix symmetric = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric,
                                               Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("TopEig: eigensolver did not converge on a " +
                         std::to_string(n) + "x" + std::to_string(n) +
                         " matrix");
  }
  // Eigen returns ascending eigenvalues.
  EigPair pair;
  pair.values.resize(r);
  pair.vectors.resize(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    pair.values(j) = solver.eigenvalues()(n - 1 - j);
    pair.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  ApplySignConvention(pair.vectors);
  return pair;
}

OrthogonalMap ProcrustesMap(const Matrix& c) {
  if (c.rows() != c.cols() || c.rows() == 0) {
    throw ValidationError("ProcrustesMap: input is " +
                          std::to_string(c.rows()) + "x" +
                          std::to_string(c.cols()) + ", not square");
  }
  if (!c.allFinite()) {
    throw ValidationError("ProcrustesMap: input has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (smallest < 1e-10 * largest || largest == 0.0) {
    std::ostringstream msg;
    msg << "ProcrustesMap: " << c.rows() << "x" << c.cols()
        << " input is numerically singular (sigma_min=" << smallest
        << ", sigma_max=" << largest << "); alignment is not unique";
    Warn(msg.str());
  }
  return OrthogonalMap{svd.matrixU() * svd.matrixV().transpose()};
}

int SelectRank(std::span<const double> eigenvalues, double threshold) {
  if (eigenvalues.empty()) {
    throw ValidationError("SelectRank: empty eigenvalue list");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("SelectRank: threshold must lie in (0, 1]");
  }
  std::vector<double> clamped(eigenvalues.size());
  std::transform(eigenvalues.begin(), eigenvalues.end(), clamped.begin(),
                 [](double v) { return std::max(v, 0.0); });
  const double total = std::accumulate(clamped.begin(), clamped.end(), 0.0);
  if (total == 0.0) return static_cast<int>(clamped.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < clamped.size(); ++i) {
    cumulative += clamped[i];
    if (cumulative / total >= threshold - 1e-12) return static_cast<int>(i + 1);
  }
  return static_cast<int>(clamped.size());
}

double Coherence(const Matrix& u) {
  const Eigen::Index n = u.rows();
  const Eigen::Index r = u.cols();
  if (n == 0 || r == 0) throw ValidationError("Coherence: empty basis");
  const Matrix gram = u.transpose() * u;
  if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("Coherence: columns are not orthonormal");
  }
  const double max_row = u.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(n) / static_cast<double>(r) * max_row;
}

double ConditionNumber(std::span<const double> values) {
  if (values.empty()) throw ValidationError("ConditionNumber: empty list");
  if (!(values.back() > 0.0)) {
    throw ValidationError(
        "ConditionNumber: trailing eigenvalue is not positive (effective rank "
        "is below " + std::to_string(values.size()) + ")");
  }
  return values.front() / values.back();
}

Matrix Gather(const Matrix& m, std::span<const Eigen::Index> rows,
              std::span<const Eigen::Index> cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(rows[i], cols[j]);
    }
  }
  return out;
}

double SymmetricSpectralNorm(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("SymmetricSpectralNorm: eigensolver did not converge "
                         "on a " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + " matrix");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace belt
