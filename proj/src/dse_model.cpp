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

#include "psdukf/dse_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "psdukf/error.hpp"

namespace psdukf::dse {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Complex frame_rotation(double delta) { return std::polar(1.0, delta - kHalfPi); }

[[noreturn]] void bad_params(const GeneratorParams& p, const std::string& what) {
  throw Error(ErrorKind::kInvalidArgument, "machine " + std::to_string(p.id) + ": " + what);
}

}  // namespace

void GeneratorParams::validate() const {
  if (order != 2 && order != 4) bad_params(*this, "order must be 2 or 4");
  if (!(H > 0.0)) bad_params(*this, "H must be positive");
  if (!(D >= 0.0)) bad_params(*this, "D must be nonnegative");
  if (!(xd_prime > 0.0) || !(xd >= xd_prime)) bad_params(*this, "need xd >= xd' > 0");
  if (!(xq_prime > 0.0) || !(xq >= xq_prime)) bad_params(*this, "need xq >= xq' > 0");
  if (order == 4 && (!(Td0_prime > 0.0) || !(Tq0_prime > 0.0))) {
    bad_params(*this, "open-circuit time constants must be positive");
  }
}

ReducedNetwork ReducedNetwork::steady(Eigen::MatrixXcd y) {
  ReducedNetwork net;
  net.y_fault = y;
  net.y_postfault = y;
  net.y_prefault = std::move(y);
  return net;
}

const Eigen::MatrixXcd& ReducedNetwork::at(double t) const {
  if (t < t_on) return y_prefault;
  if (t < t_off) return y_fault;
  return y_postfault;
}

void ReducedNetwork::validate(Eigen::Index machines) const {
  for (const auto* y : {&y_prefault, &y_fault, &y_postfault}) {
    if (y->rows() != machines || y->cols() != machines) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "reduced admittance must be " + std::to_string(machines) + "x" +
                      std::to_string(machines));
    }
    if (!y->allFinite()) throw Error(ErrorKind::kNetworkSingular, "admittance has non-finite entries");
  }
  if (!(t_off >= t_on)) throw Error(ErrorKind::kInvalidArgument, "fault window ends before it starts");
}

PowerSystem::PowerSystem(std::vector<GeneratorParams> machines, ReducedNetwork network,
                         double frequency_hz)
    : machines_(std::move(machines)),
      network_(std::move(network)),
      omega_s_(2.0 * std::numbers::pi * frequency_hz) {
  if (machines_.empty()) throw Error(ErrorKind::kInvalidArgument, "system has no machines");
  if (!(frequency_hz > 0.0)) throw Error(ErrorKind::kInvalidArgument, "frequency must be positive");
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    machines_[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (machines_[j].id == machines_[i].id) {
        throw Error(ErrorKind::kInvalidArgument, "duplicate machine id " + std::to_string(machines_[i].id));
      }
    }
    offsets_.push_back(state_dim_);
    state_dim_ += machines_[i].order;
  }
  network_.validate(machine_count());
}

std::vector<Eigen::Index> PowerSystem::angle_indices() const { return offsets_; }

Eigen::Index PowerSystem::index_of(int machine_id) const {
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    if (machines_[i].id == machine_id) return static_cast<Eigen::Index>(i);
  }
  throw Error(ErrorKind::kUnknownMachineId, "no machine with id " + std::to_string(machine_id));
}

std::vector<GeneratorState> PowerSystem::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != state_dim_) {
    throw Error(ErrorKind::kDimensionMismatch, "state vector has dimension " +
                                                   std::to_string(x.size()) + ", expected " +
                                                   std::to_string(state_dim_));
  }
  std::vector<GeneratorState> states(machines_.size());
  for (std::size_t k = 0; k < machines_.size(); ++k) {
    const Eigen::Index o = offsets_[k];
    states[k].delta = x(o);
    states[k].omega = x(o + 1);
    if (machines_[k].order == 4) {
      states[k].e_q_prime = x(o + 2);
      states[k].e_d_prime = x(o + 3);
    } else {
      states[k].e_q_prime = machines_[k].e_q_fixed;
      states[k].e_d_prime = 0.0;
    }
  }
  return states;
}

Eigen::VectorXd PowerSystem::pack(const std::vector<GeneratorState>& states) const {
  if (states.size() != machines_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "one state per machine expected");
  }
  Eigen::VectorXd x(state_dim_);
  for (std::size_t k = 0; k < machines_.size(); ++k) {
    const Eigen::Index o = offsets_[k];
    x(o) = states[k].delta;
    x(o + 1) = states[k].omega;
    if (machines_[k].order == 4) {
      x(o + 2) = states[k].e_q_prime;
      x(o + 3) = states[k].e_d_prime;
    }
  }
  return x;
}

PowerSystem PowerSystem::with_network(ReducedNetwork network) const {
  return PowerSystem(machines_, std::move(network), omega_s_ / (2.0 * std::numbers::pi));
}

double electrical_power(const GeneratorState& s, Complex i_dq) {
  return s.e_d_prime * i_dq.real() + s.e_q_prime * i_dq.imag();
}

GeneratorDerivative generator_derivatives(const GeneratorState& s, const GeneratorParams& p,
                                          Complex i_dq, double omega_s) {
  GeneratorDerivative d;
  const double slip = s.omega - 1.0;
  d.delta = omega_s * slip;
  d.omega = (p.Pm - electrical_power(s, i_dq) - p.D * slip) / (2.0 * p.H);
  if (p.order == 4) {
    d.e_q_prime = (-s.e_q_prime - (p.xd - p.xd_prime) * i_dq.real() + p.Efd) / p.Td0_prime;
    d.e_d_prime = (-s.e_d_prime + (p.xq - p.xq_prime) * i_dq.imag()) / p.Tq0_prime;
  }
  return d;
}

Complex internal_emf(const GeneratorState& s) {
  return Complex(s.e_d_prime, s.e_q_prime) * frame_rotation(s.delta);
}

Eigen::VectorXcd internal_emfs(const PowerSystem& sys, const std::vector<GeneratorState>& states) {
  Eigen::VectorXcd e(sys.machine_count());
  for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = internal_emf(states[k]);
  return e;
}

Eigen::VectorXcd machine_currents(const PowerSystem& sys,
                                  const std::vector<GeneratorState>& states, double t) {
  Eigen::VectorXcd i = sys.network().at(t) * internal_emfs(sys, states);
  if (!i.allFinite()) throw Error(ErrorKind::kNetworkSingular, "network produced non-finite currents");
  return i;
}

Eigen::VectorXd state_derivative(const PowerSystem& sys, const Eigen::VectorXd& x, double t) {
  const auto states = sys.unpack(x);
  const Eigen::VectorXcd currents = machine_currents(sys, states, t);
  Eigen::VectorXd dx(sys.state_dim());
  for (Eigen::Index k = 0; k < sys.machine_count(); ++k) {
    const auto& p = sys.machines()[k];
    const Complex i_dq = currents(k) * std::conj(frame_rotation(states[k].delta));
    const auto d = generator_derivatives(states[k], p, i_dq, sys.omega_s());
    const Eigen::Index o = sys.offset(k);
    dx(o) = d.delta;
    dx(o + 1) = d.omega;
    if (p.order == 4) {
      dx(o + 2) = d.e_q_prime;
      dx(o + 3) = d.e_d_prime;
    }
  }
  return dx;
}

Eigen::VectorXd step_dynamics(const PowerSystem& sys, const Eigen::VectorXd& x, double dt,
                              double t) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "dt must be positive");
  // Freeze the topology for the whole step.
  const double t_net = t + 0.5 * dt;
  const Eigen::VectorXd k1 = state_derivative(sys, x, t_net);
  const Eigen::VectorXd k2 = state_derivative(sys, x + 0.5 * dt * k1, t_net);
  const Eigen::VectorXd k3 = state_derivative(sys, x + 0.5 * dt * k2, t_net);
  const Eigen::VectorXd k4 = state_derivative(sys, x + dt * k3, t_net);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd advance(const PowerSystem& sys, const Eigen::VectorXd& x, double t,
                        double interval, int substeps) {
  if (substeps < 1) throw Error(ErrorKind::kInvalidArgument, "substeps must be >= 1");
  const double dt = interval / substeps;
  Eigen::VectorXd out = x;
  for (int s = 0; s < substeps; ++s) out = step_dynamics(sys, out, dt, t + s * dt);
  return out;
}

std::vector<PhasorMeasurement> measure_phasors(const PowerSystem& sys, const Eigen::VectorXd& x,
                                               double t, const std::vector<int>& placement) {
  if (placement.empty()) throw Error(ErrorKind::kInvalidArgument, "PMU placement is empty");
  std::vector<Eigen::Index> rows;
  rows.reserve(placement.size());
  for (int id : placement) rows.push_back(sys.index_of(id));

  const auto states = sys.unpack(x);
  const Eigen::VectorXcd currents = machine_currents(sys, states, t);
  std::vector<PhasorMeasurement> out;
  out.reserve(placement.size());
  for (std::size_t j = 0; j < placement.size(); ++j) {
    const Eigen::Index k = rows[j];
    const Complex current = currents(k);
    const Complex terminal =
        internal_emf(states[k]) - Complex(0.0, sys.machines()[k].xd_prime) * current;
    out.push_back({placement[j], terminal.real(), terminal.imag(), current.real(), current.imag()});
  }
  return out;
}

Eigen::VectorXd measurement_vector(const PowerSystem& sys, const Eigen::VectorXd& x, double t,
                                   const std::vector<int>& placement) {
  const auto phasors = measure_phasors(sys, x, t, placement);
  Eigen::VectorXd y(4 * static_cast<Eigen::Index>(phasors.size()));
  for (std::size_t j = 0; j < phasors.size(); ++j) {
    const auto o = static_cast<Eigen::Index>(4 * j);
    y(o) = phasors[j].e_R;
    y(o + 1) = phasors[j].e_I;
    y(o + 2) = phasors[j].i_R;
    y(o + 3) = phasors[j].i_I;
  }
  return y;
}

bool is_plausible(const PowerSystem& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.state_dim() || !x.allFinite()) return false;
  for (Eigen::Index k = 0; k < sys.machine_count(); ++k) {
    const double omega = x(sys.offset(k) + 1);
    if (omega < 0.5 || omega > 1.5) return false;
  }
  return true;
}

Equilibrium initialize_equilibrium(const PowerSystem& sys, const std::vector<Complex>& emf) {
  const Eigen::Index count = sys.machine_count();
  if (static_cast<Eigen::Index>(emf.size()) != count) {
    throw Error(ErrorKind::kDimensionMismatch, "one internal EMF per machine expected");
  }
  Eigen::VectorXcd e(count);
  for (Eigen::Index k = 0; k < count; ++k) e(k) = emf[k];
  const Eigen::VectorXcd currents = sys.network().y_prefault * e;

  std::vector<GeneratorParams> machines = sys.machines();
  std::vector<GeneratorState> states(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    auto& p = machines[k];
    auto& s = states[k];
    s.omega = 1.0;
    if (p.order == 2) {
      s.delta = std::arg(e(k));
      s.e_q_prime = std::abs(e(k));
      s.e_d_prime = 0.0;
      p.e_q_fixed = s.e_q_prime;
    } else {
      // The q axis lies along E + j(xq - xq') I, which zeroes de'_d/dt.
      const Complex q_axis = e(k) + Complex(0.0, p.xq - p.xq_prime) * currents(k);
      s.delta = std::arg(q_axis);
      const Complex rot = std::conj(frame_rotation(s.delta));
      const Complex e_dq = e(k) * rot;
      const Complex i_dq = currents(k) * rot;
      s.e_d_prime = e_dq.real();
      s.e_q_prime = e_dq.imag();
      p.Efd = s.e_q_prime + (p.xd - p.xd_prime) * i_dq.real();
    }
    const Complex i_dq = currents(k) * std::conj(frame_rotation(s.delta));
    p.Pm = electrical_power(s, i_dq);
  }
  PowerSystem solved(std::move(machines), sys.network(), sys.omega_s() / (2.0 * std::numbers::pi));
  Eigen::VectorXd x = solved.pack(states);
  return Equilibrium{std::move(solved), std::move(x)};
}

SystemModel make_system_model(const PowerSystem& sys, const std::vector<int>& placement,
                              double interval, int substeps, SymMatrix Q, SymMatrix R) {
  if (!(interval > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sample interval must be positive");
  if (R.dim() != 4 * static_cast<Eigen::Index>(placement.size())) {
    throw Error(ErrorKind::kDimensionMismatch, "R must have four rows per placed PMU");
  }
  for (int id : placement) sys.index_of(id);
  auto f = [sys, interval, substeps](const Eigen::VectorXd& x, long k) {
    return advance(sys, x, static_cast<double>(k - 1) * interval, interval, substeps);
  };
  auto h = [sys, placement, interval](const Eigen::VectorXd& x, long k) {
    return measurement_vector(sys, x, static_cast<double>(k) * interval, placement);
  };
  return SystemModel(std::move(f), std::move(h), std::move(Q), std::move(R));
}

}  // namespace psdukf::dse
