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

#include <optional>

#include <Eigen/Dense>

#include "psdukf/matrix.hpp"

namespace psdukf {

/// Unscented transform scaling. lambda = alpha^2 (n + kappa) - n and
/// eta = sqrt(n + lambda); construction rejects n + lambda <= 0.
class UtParams {
 public:
  UtParams(int n, double alpha, double beta, double kappa);

  /// alpha = 1, beta = 2, kappa = 3 - n, or 0.5 when 3 - n <= 0.
  static UtParams defaults(int n);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  double eta() const { return eta_; }

 private:
  int n_;
  double alpha_;
  double beta_;
  double kappa_;
  double lambda_;
  double eta_;
};

struct UtWeights {
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

/// Points are stored as the 2n+1 columns of `points`.
struct SigmaPointSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

struct Moments {
  Eigen::VectorXd mean;
  SymMatrix covariance;
};

UtWeights compute_weights(const UtParams& p);

/// Column 0 is m, columns 1..n are m + eta * L(:, i), columns n+1..2n are
/// m - eta * L(:, i), with L = chol_sqrt(P). Propagates kNotPositiveDefinite.
SigmaPointSet generate_sigma_points(const Eigen::VectorXd& m, const SymMatrix& P,
                                    const UtParams& p);

/// Same construction from an already computed Cholesky factor.
SigmaPointSet sigma_points_from_factor(const Eigen::VectorXd& m, const Eigen::MatrixXd& chol,
                                       const UtParams& p);

/// Weighted mean (with `wm`) and covariance (with `cov_weights`) of the
/// columns of `points`. The covariance is centred on `center` when given,
/// otherwise on the weighted mean, and symmetrized before return.
Moments unscented_moments(const Eigen::MatrixXd& points, const Eigen::VectorXd& wm,
                          const Eigen::VectorXd& cov_weights,
                          const std::optional<Eigen::VectorXd>& center = std::nullopt);

/// sum_i w_i (x_i - x_center)(y_i - y_center)^T over paired columns.
Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& x_points, const Eigen::VectorXd& x_center,
                                 const Eigen::MatrixXd& y_points, const Eigen::VectorXd& y_center,
                                 const Eigen::VectorXd& weights);

}  // namespace psdukf
