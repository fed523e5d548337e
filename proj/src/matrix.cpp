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

#include "psdukf/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "psdukf/error.hpp"

namespace psdukf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonFiniteInput: return "NonFiniteInput";
    case ErrorKind::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::kDegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::kSingularInnovation: return "SingularInnovation";
    case ErrorKind::kNetworkSingular: return "NetworkSingular";
    case ErrorKind::kUnknownMachineId: return "UnknownMachineId";
    case ErrorKind::kDegenerateTruth: return "DegenerateTruth";
    case ErrorKind::kScenario: return "ScenarioError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

void require_square_finite(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    ", expected square");
  }
  if (!a.allFinite()) throw Error(ErrorKind::kNonFiniteInput, "matrix has NaN or Inf entries");
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  require_square_finite(values_);
  const double asym = frobenius_norm(values_ - values_.transpose());
  if (asym > 1e-10 * std::max(1.0, frobenius_norm(values_))) {
    throw Error(ErrorKind::kInvalidArgument, "matrix is not symmetric");
  }
}

SymMatrix SymMatrix::zero(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Zero(n, n), Trusted{});
}

SymMatrix SymMatrix::identity(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  if (!d.allFinite()) throw Error(ErrorKind::kNonFiniteInput, "diagonal has NaN or Inf entries");
  return SymMatrix(d.asDiagonal().toDenseMatrix(), Trusted{});
}

Eigen::MatrixXd EigenDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

double frobenius_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) sum += a(i, j) * a(i, j);
  }
  return std::sqrt(sum);
}

EigenDecomposition eig_sym(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kConvergenceFailure, "symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  const Eigen::Index n = a.dim();
  EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  return out;
}

Eigen::MatrixXd chol_sqrt(const SymMatrix& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "Cholesky pivot <= 0");
  }
  return llt.matrixL();
}

SymMatrix symmetrize(const Eigen::MatrixXd& a) {
  require_square_finite(a);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    s(j, j) = a(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  }
  return SymMatrix(std::move(s), SymMatrix::Trusted{});
}

bool is_psd(const SymMatrix& a, double tol) {
  if (a.dim() == 0) return true;
  const auto eig = eig_sym(a);
  const double largest = eig.values(0);
  const double smallest = eig.values(a.dim() - 1);
  return smallest >= -tol * std::max(1.0, std::abs(largest));
}

double relative_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return frobenius_norm(a - b) / std::max(frobenius_norm(b), kNormFloor);
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string::npos) {
        throw Error(ErrorKind::kIo, "empty field on line " + std::to_string(line_no));
      }
      const char* begin = field.data() + first;
      const char* end = field.data() + last + 1;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::kIo, "bad number '" + std::string(begin, end) + "' on line " +
                                        std::to_string(line_no));
      }
      row.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw Error(ErrorKind::kDimensionMismatch, "matrix CSV is empty");
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                      " entries, expected " + std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[i][j];
  }
  return a;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& a) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << a(i, j);
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& a) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  write_matrix_csv(out, a);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace psdukf
