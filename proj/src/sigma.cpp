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

#include "psdukf/sigma.hpp"

#include <cmath>
#include <string>

#include "psdukf/error.hpp"

namespace psdukf {

UtParams::UtParams(int n, double alpha, double beta, double kappa)
    : n_(n), alpha_(alpha), beta_(beta), kappa_(kappa) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "state dimension must be >= 1");
  if (!(alpha > 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta) ||
      !std::isfinite(kappa)) {
    throw Error(ErrorKind::kInvalidArgument, "UT parameters need alpha > 0, beta >= 0, finite kappa");
  }
  lambda_ = alpha * alpha * (n + kappa) - n;
  if (!(n + lambda_ > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "n + lambda must be positive");
  }
  eta_ = std::sqrt(n + lambda_);
}

UtParams UtParams::defaults(int n) {
  const double kappa = 3.0 - n > 0.0 ? 3.0 - n : 0.5;
  return UtParams(n, 1.0, 2.0, kappa);
}

UtWeights compute_weights(const UtParams& p) {
  const int count = 2 * p.n() + 1;
  const double denom = p.n() + p.lambda();
  UtWeights w{Eigen::VectorXd::Constant(count, 1.0 / (2.0 * denom)),
              Eigen::VectorXd::Constant(count, 1.0 / (2.0 * denom))};
  w.wm(0) = p.lambda() / denom;
  w.wc(0) = w.wm(0) + (1.0 - p.alpha() * p.alpha() + p.beta());
  return w;
}

SigmaPointSet sigma_points_from_factor(const Eigen::VectorXd& m, const Eigen::MatrixXd& chol,
                                       const UtParams& p) {
  const Eigen::Index n = m.size();
  if (n != p.n() || chol.rows() != n || chol.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "sigma points: mean has dimension " + std::to_string(n) + ", UT expects " +
                    std::to_string(p.n()));
  }
  auto w = compute_weights(p);
  SigmaPointSet set{Eigen::MatrixXd(n, 2 * n + 1), std::move(w.wm), std::move(w.wc)};
  set.points.col(0) = m;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd offset = p.eta() * chol.col(i);
    set.points.col(1 + i) = m + offset;
    set.points.col(1 + n + i) = m - offset;
  }
  return set;
}

SigmaPointSet generate_sigma_points(const Eigen::VectorXd& m, const SymMatrix& P,
                                    const UtParams& p) {
  if (P.dim() != m.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "covariance and mean dimensions differ");
  }
  return sigma_points_from_factor(m, chol_sqrt(P), p);
}

Moments unscented_moments(const Eigen::MatrixXd& points, const Eigen::VectorXd& wm,
                          const Eigen::VectorXd& cov_weights,
                          const std::optional<Eigen::VectorXd>& center) {
  if (wm.size() != points.cols() || cov_weights.size() != points.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "weight count differs from point count");
  }
  if (center && center->size() != points.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "center override has wrong dimension");
  }
  Eigen::VectorXd mean = points * wm;
  const Eigen::VectorXd& c = center ? *center : mean;
  const Eigen::MatrixXd dev = points.colwise() - c;
  const Eigen::MatrixXd cov = dev * cov_weights.asDiagonal() * dev.transpose();
  return Moments{std::move(mean), symmetrize(cov)};
}

Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& x_points, const Eigen::VectorXd& x_center,
                                 const Eigen::MatrixXd& y_points, const Eigen::VectorXd& y_center,
                                 const Eigen::VectorXd& weights) {
  if (x_points.cols() != y_points.cols() || weights.size() != x_points.cols() ||
      x_center.size() != x_points.rows() || y_center.size() != y_points.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "cross covariance operands disagree");
  }
  const Eigen::MatrixXd dx = x_points.colwise() - x_center;
  const Eigen::MatrixXd dy = y_points.colwise() - y_center;
  return dx * weights.asDiagonal() * dy.transpose();
}

}  // namespace psdukf
