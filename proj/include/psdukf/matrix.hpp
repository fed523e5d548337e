// Copyright 2026 The psdukf Authors
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

#pragma once

// Dense symmetric-matrix primitives shared by the filter and the covariance
// repair: Frobenius norm, eigendecomposition, Cholesky square root, PSD test.

#include <filesystem>
#include <istream>
#include <ostream>

#include <Eigen/Dense>

namespace psdukf {

/// Denominator floor for relative Frobenius comparisons.
inline constexpr double kNormFloor = 1e-300;

/// Square, finite, symmetric real matrix. Symmetry is checked on
/// construction to within 1e-10 relative; use `symmetrize` to build one from
/// an arbitrary square matrix.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::MatrixXd values);

  static SymMatrix zero(Eigen::Index n);
  static SymMatrix identity(Eigen::Index n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  Eigen::Index dim() const { return values_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Eigen::MatrixXd& matrix() const { return values_; }

  bool operator==(const SymMatrix& other) const { return values_ == other.values_; }

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd values, Trusted) : values_(std::move(values)) {}
  friend SymMatrix symmetrize(const Eigen::MatrixXd& a);

  Eigen::MatrixXd values_;
};

/// Eigenvalues sorted descending (so `values(0)` is the maximum) with the
/// matching orthonormal eigenvectors as columns of `vectors`.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  Eigen::MatrixXd reconstruct() const;
};

double frobenius_norm(const Eigen::MatrixXd& a);
inline double frobenius_norm(const SymMatrix& a) { return frobenius_norm(a.matrix()); }

/// Throws kConvergenceFailure if the QR iteration does not converge.
EigenDecomposition eig_sym(const SymMatrix& a);

/// Lower-triangular L with L * L^T == A. Throws kNotPositiveDefinite when a
/// pivot is <= 0.
Eigen::MatrixXd chol_sqrt(const SymMatrix& a);

/// (A + A^T) / 2, computed per entry pair so the result is bitwise symmetric.
SymMatrix symmetrize(const Eigen::MatrixXd& a);

/// True iff the smallest eigenvalue is >= -tol * max(1, |largest eigenvalue|).
bool is_psd(const SymMatrix& a, double tol);

/// Relative Frobenius distance ||a - b|| / max(||b||, floor).
double relative_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Plain CSV matrix I/O: one row per line, no header.
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& a);

}  // namespace psdukf
