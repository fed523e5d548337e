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

// Nearest symmetric positive definite matrix in Frobenius norm.
//
// The repair runs alternating projections onto the PSD cone with a Dykstra
// correction term, then floors the spectrum at tau_posd * max eigenvalue,
// rescales so the diagonal tracks the pre-floor diagonal, and symmetrizes.

#include "psdukf/matrix.hpp"

namespace psdukf {

struct NearSpdConfig {
  int i_max = 100;
  double tau_conv = 1e-6;
  double tau_eig = 1e-7;
  double tau_posd = 1e-7;

  /// Throws kInvalidArgument unless i_max >= 1 and every tolerance is in (0, 1).
  void validate() const;
};

struct NearSpdResult {
  SymMatrix matrix;
  int iterations = 0;
  bool converged = false;
  /// Frobenius distance from the symmetrized input to `matrix`.
  double distance = 0.0;
};

/// Keeps the eigenpairs with d_j > tau_eig * max(d) and rebuilds
/// V_p * diag(d_p) * V_p^T. Throws kDegenerateSpectrum if none survive.
SymMatrix project_psd(const SymMatrix& a, double tau_eig);

/// Accepts any finite square matrix; non-symmetric input is symmetrized
/// first. Non-convergence is reported through `converged`, not thrown.
NearSpdResult near_spd(const Eigen::MatrixXd& x0, const NearSpdConfig& cfg = {});

}  // namespace psdukf
