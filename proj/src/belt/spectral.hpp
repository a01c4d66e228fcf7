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

#ifndef BELT_SPECTRAL_HPP_
#define BELT_SPECTRAL_HPP_

// Dense spectral primitives shared by the completion pipeline, the
// baselines and the diagnostics written to run reports.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace belt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Tolerance used when checking that an input matrix is symmetric:
// ||S - S^T||_F <= kSymmetryTolerance * ||S||_F.
inline constexpr double kSymmetryTolerance = 1e-8;

// Leading eigenpairs of a symmetric matrix. `values` is sorted descending;
// every column of `vectors` has its largest-magnitude entry (lowest row on
// ties) nonnegative.
struct EigPair {
  Matrix vectors;
  Vector values;

  Eigen::Index rank() const { return values.size(); }
  Matrix Reconstruct() const;
};

// An r x r orthogonal matrix.
struct OrthogonalMap {
  Matrix matrix;
};

bool IsSymmetric(const Matrix& s, double tolerance = kSymmetryTolerance);

// Flips column signs so the largest-magnitude entry of each column is
// nonnegative.
void ApplySignConvention(Matrix& vectors);

// The r algebraically largest eigenvalues of `s` with their eigenvectors.
// Throws ValidationError for non-symmetric input or r outside [1, n], and
// NumericalError when the eigensolver fails.
EigPair TopEig(const Matrix& s, Eigen::Index r);

// Orthogonal polar factor H Z^T of C = H Omega Z^T. Emits a warning (but
// still returns the SVD-derived map) when C is numerically singular.
OrthogonalMap ProcrustesMap(const Matrix& c);

// Smallest r whose leading eigenvalue mass reaches `threshold` of the total.
// Negative values count as zero.
int SelectRank(std::span<const double> eigenvalues, double threshold);

// (n / r) * max_i ||U_i.||^2 for a matrix with orthonormal columns.
double Coherence(const Matrix& u);

// lambda_1 / lambda_r for a descending list of positive values.
double ConditionNumber(std::span<const double> values);

// m[rows, cols].
Matrix Gather(const Matrix& m, std::span<const Eigen::Index> rows,
              std::span<const Eigen::Index> cols);

// Largest singular value of a symmetric matrix, i.e. max |lambda_i|.
double SymmetricSpectralNorm(const Matrix& s);

}  // namespace belt

#endif  // BELT_SPECTRAL_HPP_
