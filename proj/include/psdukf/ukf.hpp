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

// Unscented Kalman filter with covariance repair.
//
// Whenever a covariance fails its positive-definiteness check the filter
// replaces it with the nearest SPD matrix before taking a square root, so
// sigma-point generation never fails while repair is enabled.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "psdukf/error.hpp"
#include "psdukf/matrix.hpp"
#include "psdukf/nearspd.hpp"
#include "psdukf/sigma.hpp"

namespace psdukf {

struct FilterState {
  Eigen::VectorXd m;
  SymMatrix P;
  long step_index = 0;
};

/// x_k = f(x_{k-1}, k) + q_{k-1},  y_k = h(x_k, k) + r_k.
///
/// f and h receive the index k of the state they produce or observe so
/// time-varying models (network switching) stay pure functions. Both must be
/// free of hidden state.
class SystemModel {
 public:
  using Function = std::function<Eigen::VectorXd(const Eigen::VectorXd&, long)>;

  /// Q and R must be PSD within 1e-12.
  SystemModel(Function f, Function h, SymMatrix Q, SymMatrix R);

  const Function& f() const { return f_; }
  const Function& h() const { return h_; }
  const SymMatrix& Q() const { return Q_; }
  const SymMatrix& R() const { return R_; }
  Eigen::Index n() const { return Q_.dim(); }
  Eigen::Index p() const { return R_.dim(); }

 private:
  Function f_;
  Function h_;
  SymMatrix Q_;
  SymMatrix R_;
};

/// kLazy repairs only when a Cholesky factorization fails; kEager also runs an
/// eigenvalue check on every covariance.
enum class CheckMode { kLazy, kEager };

/// Weights used for the predicted covariance sum. kWc is the standard form;
/// kWm reproduces the variant that weights P_k^- with the mean weights.
enum class CovWeights { kWc, kWm };

struct RepairPolicy {
  using Solver = std::function<NearSpdResult(const Eigen::MatrixXd&, const NearSpdConfig&)>;

  bool enabled = true;
  NearSpdConfig cfg;
  CheckMode check_mode = CheckMode::kLazy;
  /// Empty means near_spd. Tests inject spies here.
  Solver solver;

  long repair_count = 0;
  double repair_time_total = 0.0;  // seconds, monotonic clock, solver calls only
};

struct FilterOptions {
  CovWeights predicted_cov_weights = CovWeights::kWc;
};

/// Raised by run_filter; keeps the original kind and records the failing step.
class FilterError : public Error {
 public:
  FilterError(ErrorKind kind, long step, const std::string& what)
      : Error(kind, "step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

FilterState predict(const FilterState& s, const SystemModel& model, const UtParams& params,
                    RepairPolicy& policy, const FilterOptions& options = {});

/// Throws kSingularInnovation when the innovation covariance has condition
/// number above 1e14 or is not positive definite.
FilterState update(const FilterState& predicted, const Eigen::VectorXd& y,
                   const SystemModel& model, const UtParams& params, RepairPolicy& policy);

struct FilterRun {
  std::vector<FilterState> states;  // initial state first, then one per measurement
  long repair_count = 0;
  double repair_time_total = 0.0;
};

FilterRun run_filter(const FilterState& initial, const SystemModel& model,
                     const UtParams& params, RepairPolicy& policy,
                     const std::vector<Eigen::VectorXd>& measurements,
                     const FilterOptions& options = {});

}  // namespace psdukf
