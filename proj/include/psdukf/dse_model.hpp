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

// Desk-scale synchronous machine models over a Kron-reduced network.
//
// Each machine is either classical (order 2: delta, omega, constant EMF
// behind x'_d) or two-axis (order 4: adds e'_q, e'_d). The network couples
// internal EMF phasors E = (e'_d + j e'_q) e^{j(delta - pi/2)} through
// I = Y_red E. Terminal phasors follow from E_t = E - j x'_d I.

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "psdukf/ukf.hpp"

namespace psdukf::dse {

using Complex = std::complex<double>;

struct GeneratorParams {
  int id = 0;
  int order = 2;
  double H = 0.0;
  double D = 0.0;
  double xd = 0.0;
  double xq = 0.0;
  double xd_prime = 0.0;
  double xq_prime = 0.0;
  double Td0_prime = 0.0;
  double Tq0_prime = 0.0;
  double Pm = 0.0;
  double Efd = 0.0;
  // EMF held constant by classical machines.
  double e_q_fixed = 0.0;

  void validate() const;
};

struct GeneratorState {
  double delta = 0.0;
  double omega = 1.0;
  double e_q_prime = 0.0;
  double e_d_prime = 0.0;
};

struct GeneratorDerivative {
  double delta = 0.0;
  double omega = 0.0;
  double e_q_prime = 0.0;
  double e_d_prime = 0.0;
};

struct PhasorMeasurement {
  int machine_id = 0;
  double e_R = 0.0;
  double e_I = 0.0;
  double i_R = 0.0;
  double i_I = 0.0;
};

/// Pre-fault, fault-on and post-fault admittance among internal nodes. The
/// fault-on variant applies on [t_on, t_off), the post-fault one from t_off.
struct ReducedNetwork {
  Eigen::MatrixXcd y_prefault;
  Eigen::MatrixXcd y_fault;
  Eigen::MatrixXcd y_postfault;
  double t_on = std::numeric_limits<double>::infinity();
  double t_off = std::numeric_limits<double>::infinity();

  /// Network without any switching event.
  static ReducedNetwork steady(Eigen::MatrixXcd y);

  const Eigen::MatrixXcd& at(double t) const;
  void validate(Eigen::Index machines) const;
};

/// Machines plus network. The state vector stacks, per machine in order,
/// (delta, omega) and for order-4 machines also (e'_q, e'_d).
class PowerSystem {
 public:
  PowerSystem(std::vector<GeneratorParams> machines, ReducedNetwork network,
              double frequency_hz = 60.0);

  const std::vector<GeneratorParams>& machines() const { return machines_; }
  const ReducedNetwork& network() const { return network_; }
  double omega_s() const { return omega_s_; }
  Eigen::Index state_dim() const { return state_dim_; }
  Eigen::Index machine_count() const { return static_cast<Eigen::Index>(machines_.size()); }

  /// Offset of machine k's delta in the state vector.
  Eigen::Index offset(Eigen::Index k) const { return offsets_[k]; }
  /// Indices of the rotor angles in the state vector.
  std::vector<Eigen::Index> angle_indices() const;
  /// Index of the machine with the given id; throws kUnknownMachineId.
  Eigen::Index index_of(int machine_id) const;

  std::vector<GeneratorState> unpack(const Eigen::VectorXd& x) const;
  Eigen::VectorXd pack(const std::vector<GeneratorState>& states) const;

  PowerSystem with_network(ReducedNetwork network) const;

 private:
  std::vector<GeneratorParams> machines_;
  ReducedNetwork network_;
  double omega_s_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index state_dim_ = 0;
};

/// P_e = e'_d i_d + e'_q i_q. `i_dq` is the machine-frame current i_d + j i_q.
double electrical_power(const GeneratorState& s, Complex i_dq);

GeneratorDerivative generator_derivatives(const GeneratorState& s, const GeneratorParams& p,
                                          Complex i_dq, double omega_s);

Complex internal_emf(const GeneratorState& s);
Eigen::VectorXcd internal_emfs(const PowerSystem& sys, const std::vector<GeneratorState>& states);

/// Network currents I = Y E for the admittance active at time t.
Eigen::VectorXcd machine_currents(const PowerSystem& sys,
                                  const std::vector<GeneratorState>& states, double t);

Eigen::VectorXd state_derivative(const PowerSystem& sys, const Eigen::VectorXd& x, double t);

/// One RK4 step of size dt from time t. The admittance is chosen at the step
/// midpoint, so switching instants aligned with step boundaries are exact.
/// Throws kNetworkSingular if the network yields non-finite currents.
Eigen::VectorXd step_dynamics(const PowerSystem& sys, const Eigen::VectorXd& x, double dt,
                              double t);

/// `substeps` RK4 steps covering [t, t + interval].
Eigen::VectorXd advance(const PowerSystem& sys, const Eigen::VectorXd& x, double t,
                        double interval, int substeps);

std::vector<PhasorMeasurement> measure_phasors(const PowerSystem& sys, const Eigen::VectorXd& x,
                                               double t, const std::vector<int>& placement);

/// Measurements stacked as (e_R, e_I, i_R, i_I) per placed machine.
Eigen::VectorXd measurement_vector(const PowerSystem& sys, const Eigen::VectorXd& x, double t,
                                   const std::vector<int>& placement);

/// omega within [0.5, 1.5] and all states finite.
bool is_plausible(const PowerSystem& sys, const Eigen::VectorXd& x);

/// Builds the equilibrium consistent with the given internal EMF phasors
/// under the pre-fault network: fills Pm, Efd and the classical EMFs in the
/// returned system and returns the equilibrium state.
struct Equilibrium {
  PowerSystem system;
  Eigen::VectorXd state;
};
Equilibrium initialize_equilibrium(const PowerSystem& sys, const std::vector<Complex>& emf);

/// Wraps the system as a filter model sampled every `interval` seconds:
/// f(x, k) integrates from (k-1)*interval to k*interval and h(x, k) observes
/// at k*interval.
SystemModel make_system_model(const PowerSystem& sys, const std::vector<int>& placement,
                              double interval, int substeps, SymMatrix Q, SymMatrix R);

}  // namespace psdukf::dse
