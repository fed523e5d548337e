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

#include "psdukf/nearspd.hpp"

#include <algorithm>
#include <cmath>

#include "psdukf/error.hpp"

namespace psdukf {

void NearSpdConfig::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (i_max < 1) throw Error(ErrorKind::kInvalidArgument, "i_max must be >= 1");
  if (!in_unit(tau_conv) || !in_unit(tau_eig) || !in_unit(tau_posd)) {
    throw Error(ErrorKind::kInvalidArgument, "nearSPD tolerances must lie in (0, 1)");
  }
}

SymMatrix project_psd(const SymMatrix& a, double tau_eig) {
  const auto eig = eig_sym(a);
  const Eigen::Index n = a.dim();
  if (n == 0) return a;
  const double threshold = tau_eig * eig.values(0);
  // Descending order: the kept set is a prefix.
  Eigen::Index keep = 0;
  while (keep < n && eig.values(keep) > threshold) ++keep;
  if (keep == 0) {
    throw Error(ErrorKind::kDegenerateSpectrum, "no eigenvalue above the clipping threshold");
  }
  const auto v = eig.vectors.leftCols(keep);
  const Eigen::MatrixXd scaled = v * eig.values.head(keep).asDiagonal();
  return symmetrize(scaled * v.transpose());
}

namespace {

SymMatrix project_or_zero(const SymMatrix& r, double tau_eig) {
  try {
    return project_psd(r, tau_eig);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateSpectrum) throw;
    return SymMatrix::zero(r.dim());
  }
}

SymMatrix floor_and_rescale(const SymMatrix& x, double tau_posd) {
  const auto eig = eig_sym(x);
  const double max_d = eig.values(0);
  const double eps = max_d > 0.0 ? tau_posd * max_d : tau_posd;

  Eigen::VectorXd d = eig.values;
  for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = std::max(d(j), eps);
  const Eigen::VectorXd diag_before = x.matrix().diagonal();
  Eigen::MatrixXd floored = eig.vectors * d.asDiagonal() * eig.vectors.transpose();

  Eigen::VectorXd scale(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double denom = floored(i, i);
    if (!(denom > 0.0)) denom = eps;
    scale(i) = std::sqrt(std::max(eps, diag_before(i)) / denom);
  }
  floored = scale.asDiagonal() * floored * scale.asDiagonal();
  return symmetrize(floored);
}

}  // namespace

NearSpdResult near_spd(const Eigen::MatrixXd& x0, const NearSpdConfig& cfg) {
  cfg.validate();
  const SymMatrix input = symmetrize(x0);  // throws on non-square / non-finite
  const Eigen::Index n = input.dim();

  NearSpdResult result;
  if (n == 0) {
    result.matrix = input;
    result.converged = true;
    return result;
  }

  SymMatrix x = input;
  Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(n, n);
  double change = 0.0;
  int iter = 0;
  do {
    const SymMatrix y = x;
    ++iter;
    const SymMatrix r = symmetrize(y.matrix() - correction);
    x = project_or_zero(r, cfg.tau_eig);
    correction = x.matrix() - r.matrix();
    change = frobenius_norm(y.matrix() - x.matrix()) /
             std::max(frobenius_norm(x.matrix()), kNormFloor);
  } while (iter < cfg.i_max && change > cfg.tau_conv);

  result.iterations = iter;
  result.converged = change <= cfg.tau_conv;
  result.matrix = floor_and_rescale(x, cfg.tau_posd);
  result.distance = frobenius_norm(result.matrix.matrix() - input.matrix());
  return result;
}

}  // namespace psdukf
