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

#include "psdukf/ukf.hpp"

#include <chrono>
#include <string>

namespace psdukf {

SystemModel::SystemModel(Function f, Function h, SymMatrix Q, SymMatrix R)
    : f_(std::move(f)), h_(std::move(h)), Q_(std::move(Q)), R_(std::move(R)) {
  if (!f_ || !h_) throw Error(ErrorKind::kInvalidArgument, "process and measurement functions required");
  if (Q_.dim() < 1 || R_.dim() < 1) throw Error(ErrorKind::kInvalidArgument, "empty Q or R");
  if (!is_psd(Q_, 1e-12)) throw Error(ErrorKind::kInvalidArgument, "Q is not PSD");
  if (!is_psd(R_, 1e-12)) throw Error(ErrorKind::kInvalidArgument, "R is not PSD");
}

namespace {

SymMatrix repair(const SymMatrix& P, RepairPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  NearSpdResult fixed = policy.solver ? policy.solver(P.matrix(), policy.cfg)
                                      : near_spd(P.matrix(), policy.cfg);
  const auto stop = std::chrono::steady_clock::now();
  policy.repair_time_total += std::chrono::duration<double>(stop - start).count();
  ++policy.repair_count;
  return std::move(fixed.matrix);
}

// Brings P into a factorable state (repairing in place when allowed) and
// returns its Cholesky factor.
Eigen::MatrixXd checked_factor(SymMatrix& P, RepairPolicy& policy, const char* what) {
  if (policy.enabled && policy.check_mode == CheckMode::kEager && !is_psd(P, 0.0)) {
    P = repair(P, policy);
  }
  try {
    return chol_sqrt(P);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNotPositiveDefinite || !policy.enabled) {
      throw Error(e.kind(), std::string(what) + " covariance is not positive definite");
    }
  }
  P = repair(P, policy);
  return chol_sqrt(P);
}

void require_dims(const Eigen::VectorXd& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw Error(ErrorKind::kDimensionMismatch, std::string(what) + " has dimension " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(expected));
  }
}

Eigen::MatrixXd map_columns(const SystemModel::Function& fn, const Eigen::MatrixXd& points,
                            long step, Eigen::Index out_dim, const char* what) {
  Eigen::MatrixXd out(out_dim, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    Eigen::VectorXd v = fn(points.col(i), step);
    require_dims(v, out_dim, what);
    out.col(i) = std::move(v);
  }
  return out;
}

}  // namespace

FilterState predict(const FilterState& s, const SystemModel& model, const UtParams& params,
                    RepairPolicy& policy, const FilterOptions& options) {
  require_dims(s.m, model.n(), "state mean");
  SymMatrix prior = s.P;
  const Eigen::MatrixXd chol = checked_factor(prior, policy, "prior");
  const auto sigma = sigma_points_from_factor(s.m, chol, params);

  const long k = s.step_index + 1;
  const Eigen::MatrixXd propagated = map_columns(model.f(), sigma.points, k, model.n(), "f(x)");
  const Eigen::VectorXd& cov_w =
      options.predicted_cov_weights == CovWeights::kWc ? sigma.wc : sigma.wm;
  const auto moments = unscented_moments(propagated, sigma.wm, cov_w);

  FilterState out{moments.mean, symmetrize(moments.covariance.matrix() + model.Q().matrix()), k};
  checked_factor(out.P, policy, "predicted");
  return out;
}

FilterState update(const FilterState& predicted, const Eigen::VectorXd& y,
                   const SystemModel& model, const UtParams& params, RepairPolicy& policy) {
  require_dims(predicted.m, model.n(), "predicted mean");
  require_dims(y, model.p(), "measurement");
  SymMatrix prior = predicted.P;
  const Eigen::MatrixXd chol = checked_factor(prior, policy, "predicted");
  const auto sigma = sigma_points_from_factor(predicted.m, chol, params);

  const long k = predicted.step_index;
  const Eigen::MatrixXd observed = map_columns(model.h(), sigma.points, k, model.p(), "h(x)");
  const auto innov = unscented_moments(observed, sigma.wm, sigma.wc);
  const SymMatrix p_yy = symmetrize(innov.covariance.matrix() + model.R().matrix());
  const Eigen::MatrixXd p_xy =
      cross_covariance(sigma.points, predicted.m, observed, innov.mean, sigma.wc);

  const auto spectrum = eig_sym(p_yy);
  const double largest = spectrum.values(0);
  const double smallest = spectrum.values(spectrum.values.size() - 1);
  if (!(smallest > 0.0) || largest / smallest > 1e14) {
    throw Error(ErrorKind::kSingularInnovation, "innovation covariance is numerically singular");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p_yy.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularInnovation, "innovation covariance factorization failed");
  }
  const Eigen::MatrixXd gain = llt.solve(p_xy.transpose()).transpose();

  FilterState out{predicted.m + gain * (y - innov.mean),
                  symmetrize(prior.matrix() - gain * p_yy.matrix() * gain.transpose()), k};
  checked_factor(out.P, policy, "updated");
  return out;
}

FilterRun run_filter(const FilterState& initial, const SystemModel& model,
                     const UtParams& params, RepairPolicy& policy,
                     const std::vector<Eigen::VectorXd>& measurements,
                     const FilterOptions& options) {
  FilterRun run;
  run.states.reserve(measurements.size() + 1);
  run.states.push_back(initial);
  for (const auto& y : measurements) {
    const long step = run.states.back().step_index + 1;
    try {
      auto pred = predict(run.states.back(), model, params, policy, options);
      run.states.push_back(update(pred, y, model, params, policy));
    } catch (const FilterError&) {
      throw;
    } catch (const Error& e) {
      throw FilterError(e.kind(), step, e.detail());
    }
  }
  run.repair_count = policy.repair_count;
  run.repair_time_total = policy.repair_time_total;
  return run;
}

}  // namespace psdukf
