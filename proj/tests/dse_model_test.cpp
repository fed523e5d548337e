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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "psdukf/dse_model.hpp"
#include "psdukf/error.hpp"
#include "psdukf/scenario.hpp"

namespace psdukf::dse {
namespace {

constexpr double kOmegaS = 2.0 * std::numbers::pi * 60.0;

harness::Scenario wscc9() {
  return harness::load_scenario(std::string(PSDUKF_SOURCE_DIR) + "/scenarios/wscc9.json");
}

GeneratorParams classical(int id, double H, double D, double Pm) {
  GeneratorParams p;
  p.id = id;
  p.order = 2;
  p.H = H;
  p.D = D;
  p.xd = p.xq = 0.3;
  p.xd_prime = p.xq_prime = 0.3;
  p.Pm = Pm;
  return p;
}

GeneratorParams two_axis(int id) {
  GeneratorParams p;
  p.id = id;
  p.order = 4;
  p.H = 5.0;
  p.D = 1.0;
  p.xd = 1.0;
  p.xd_prime = 0.2;
  p.xq = 0.9;
  p.xq_prime = 0.3;
  p.Td0_prime = 5.0;
  p.Tq0_prime = 0.5;
  p.Efd = 1.5;
  return p;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

TEST(GeneratorDerivativesTest, SpeedDeviationDrivesAngle) {
  const GeneratorParams p = classical(1, 5.0, 0.0, 1.0);
  GeneratorState s;
  s.omega = 1.001;
  s.e_q_prime = 1.0;
  const auto d = generator_derivatives(s, p, Complex(0.0, 1.0), kOmegaS);
  EXPECT_NEAR(d.delta, kOmegaS * 0.001, 1e-12);
  EXPECT_NEAR(d.delta, 0.377, 1e-3);
  EXPECT_NEAR(d.omega, 0.0, 1e-15);
}

TEST(GeneratorDerivativesTest, PowerImbalanceDrivesSpeed) {
  const GeneratorParams p = classical(1, 5.0, 0.0, 1.0);
  GeneratorState s;
  s.e_q_prime = 1.0;
  const auto d = generator_derivatives(s, p, Complex(0.0, 0.0), kOmegaS);
  EXPECT_NEAR(d.omega, 0.1, 1e-15);
  EXPECT_EQ(d.delta, 0.0);
}

TEST(GeneratorDerivativesTest, TransientEmfEquations) {
  const GeneratorParams p = two_axis(1);
  GeneratorState s;
  s.e_q_prime = 1.0;
  s.e_d_prime = 0.1;
  // i_d = 0.5, i_q = 0.4
  const auto d = generator_derivatives(s, p, Complex(0.5, 0.4), kOmegaS);
  EXPECT_NEAR(d.e_q_prime, (-1.0 - 0.8 * 0.5 + 1.5) / 5.0, 1e-15);
  EXPECT_NEAR(d.e_q_prime, 0.02, 1e-15);
  EXPECT_NEAR(d.e_d_prime, 0.28, 1e-15);
  EXPECT_NEAR(electrical_power(s, Complex(0.5, 0.4)), 0.1 * 0.5 + 1.0 * 0.4, 1e-15);
}

TEST(GeneratorParamsTest, Validation) {
  auto rejects = [](GeneratorParams p) {
    try {
      p.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::kInvalidArgument;
    }
    return false;
  };
  GeneratorParams p = two_axis(1);
  EXPECT_NO_THROW(p.validate());
  p.H = 0.0;
  EXPECT_TRUE(rejects(p));
  p = two_axis(1);
  p.xd = 0.1;
  EXPECT_TRUE(rejects(p));
  p = two_axis(1);
  p.xq_prime = 0.0;
  EXPECT_TRUE(rejects(p));
  p = two_axis(1);
  p.Tq0_prime = 0.0;
  EXPECT_TRUE(rejects(p));
  p.order = 3;
  EXPECT_TRUE(rejects(p));
}

TEST(PowerSystemTest, LayoutAndLookup) {
  const auto sc = wscc9();
  const auto eq = sc.equilibrium();
  const auto& sys = eq.system;
  EXPECT_EQ(sys.machine_count(), 3);
  EXPECT_EQ(sys.state_dim(), 8);
  EXPECT_EQ(sys.angle_indices(), (std::vector<Eigen::Index>{0, 2, 6}));
  EXPECT_EQ(sys.index_of(2), 1);
  EXPECT_EQ(sys.pack(sys.unpack(eq.state)), eq.state);
  try {
    sys.index_of(99);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownMachineId);
  }
  try {
    sys.unpack(Eigen::VectorXd::Zero(5));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
  try {
    PowerSystem({classical(1, 1, 0, 0)}, ReducedNetwork::steady(Eigen::MatrixXcd::Zero(2, 2)));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST(ReducedNetworkTest, SelectsVariantByTime) {
  ReducedNetwork net;
  net.y_prefault = Eigen::MatrixXcd::Constant(1, 1, Complex(1, 0));
  net.y_fault = Eigen::MatrixXcd::Constant(1, 1, Complex(2, 0));
  net.y_postfault = Eigen::MatrixXcd::Constant(1, 1, Complex(3, 0));
  net.t_on = 0.1;
  net.t_off = 0.2;
  EXPECT_EQ(net.at(0.0999)(0, 0), Complex(1, 0));
  EXPECT_EQ(net.at(0.1)(0, 0), Complex(2, 0));
  EXPECT_EQ(net.at(0.1999)(0, 0), Complex(2, 0));
  EXPECT_EQ(net.at(0.2)(0, 0), Complex(3, 0));
}

TEST(EquilibriumTest, DerivativeVanishes) {
  const auto eq = wscc9().equilibrium();
  EXPECT_LE(max_abs(state_derivative(eq.system, eq.state, 0.0)), 1e-10);
  EXPECT_TRUE(is_plausible(eq.system, eq.state));
}

TEST(EquilibriumTest, HeldByIntegrator) {
  const auto eq = wscc9().equilibrium();
  Eigen::VectorXd x = eq.state;
  const double dt = 1.0 / 120.0;
  for (int k = 0; k < 120; ++k) x = step_dynamics(eq.system, x, dt, k * dt);
  EXPECT_LE(max_abs(x - eq.state), 1e-9);
}

Eigen::VectorXd integrate(const PowerSystem& sys, Eigen::VectorXd x, double dt, double horizon) {
  const int steps = static_cast<int>(std::lround(horizon / dt));
  for (int k = 0; k < steps; ++k) x = step_dynamics(sys, x, dt, k * dt);
  return x;
}

TEST(StepDynamicsTest, FourthOrderSelfConvergence) {
  const auto sc = wscc9();
  const auto eq = sc.equilibrium();
  const PowerSystem sys = sc.faulted(eq.system, sc.fault_cases.front());
  const Eigen::VectorXd a = integrate(sys, eq.state, 0.005, 5.0);
  const Eigen::VectorXd b = integrate(sys, eq.state, 0.0025, 5.0);
  const Eigen::VectorXd c = integrate(sys, eq.state, 0.00125, 5.0);
  const double ratio = (a - b).norm() / (b - c).norm();
  EXPECT_NEAR(ratio, 16.0, 3.0);
}

TEST(StepDynamicsTest, RejectsNonPositiveStep) {
  const auto eq = wscc9().equilibrium();
  EXPECT_THROW(step_dynamics(eq.system, eq.state, 0.0, 0.0), Error);
}

TEST(StepDynamicsTest, NonFiniteNetworkIsSingular) {
  auto y = Eigen::MatrixXcd::Constant(1, 1, Complex(1, 0)).eval();
  PowerSystem sys({classical(1, 1, 0, 0)}, ReducedNetwork::steady(y));
  Eigen::VectorXd x(2);
  x << 0.0, 1.0;
  ReducedNetwork bad = ReducedNetwork::steady(y);
  bad.y_fault(0, 0) = Complex(INFINITY, 0);
  bad.t_on = 0.0;
  bad.t_off = 1.0;
  try {
    PowerSystem(sys.machines(), bad);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNetworkSingular);
  }
}

TEST(StepDynamicsTest, FaultOnSwitchesElectricalPower) {
  const auto sc = wscc9();
  const auto eq = sc.equilibrium();
  const auto& fault = sc.fault_cases.front();
  const PowerSystem sys = sc.faulted(eq.system, fault);
  const auto states = sys.unpack(eq.state);
  const Eigen::VectorXcd before = machine_currents(sys, states, fault.t_on - 1e-9);
  const Eigen::VectorXcd during = machine_currents(sys, states, fault.t_on);
  double jump = 0.0;
  for (Eigen::Index k = 0; k < sys.machine_count(); ++k) {
    const Complex rot = std::polar(1.0, -(states[k].delta - std::numbers::pi / 2.0));
    jump = std::max(jump, std::abs(electrical_power(states[k], during(k) * rot) -
                                   electrical_power(states[k], before(k) * rot)));
    EXPECT_NEAR(electrical_power(states[k], before(k) * rot), sys.machines()[k].Pm, 1e-10);
  }
  EXPECT_GT(jump, 1e-2);
}

TEST(StepDynamicsTest, DampedSwingSettles) {
  // A uniform angle shift is itself an equilibrium of the reduced network, so
  // distance is measured to that family: angles with their mean offset removed.
  const auto eq = wscc9().equilibrium();
  const auto& sys = eq.system;
  const auto angles = sys.angle_indices();
  Eigen::VectorXd x = eq.state;
  x(angles[0]) += 0.1;
  x(angles[2] + 1) -= 2e-3;
  const double dt = 0.01;
  double previous = INFINITY;
  for (int window = 0; window < 10; ++window) {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      x = step_dynamics(sys, x, dt, (window * 100 + s) * dt);
      Eigen::VectorXd dd(angles.size()), dw(angles.size());
      for (std::size_t i = 0; i < angles.size(); ++i) {
        dd(i) = x(angles[i]) - eq.state(angles[i]);
        dw(i) = x(angles[i] + 1) - 1.0;
      }
      dd.array() -= dd.mean();
      worst = std::max(worst, std::sqrt(dd.squaredNorm() + dw.squaredNorm()));
    }
    EXPECT_LE(worst, previous) << "window " << window;
    previous = worst;
  }
}

TEST(MeasurePhasorsTest, InternalPhasorRotation) {
  // The q axis sits at angle delta: e'_q = 1 maps to 1 at delta = 0 and to j
  // at delta = pi/2.
  GeneratorState s;
  s.e_q_prime = 1.0;
  s.delta = 0.0;
  Complex e = internal_emf(s);
  EXPECT_NEAR(e.real(), 1.0, 1e-15);
  EXPECT_NEAR(e.imag(), 0.0, 1e-15);
  s.delta = std::numbers::pi / 2.0;
  e = internal_emf(s);
  EXPECT_NEAR(e.real(), 0.0, 1e-15);
  EXPECT_NEAR(e.imag(), 1.0, 1e-15);
  s.e_q_prime = 0.0;
  s.e_d_prime = 1.0;
  e = internal_emf(s);
  EXPECT_NEAR(e.real(), 1.0, 1e-15);
  EXPECT_NEAR(e.imag(), 0.0, 1e-15);
}

TEST(MeasurePhasorsTest, IslandedMachineSeesInternalEmf) {
  PowerSystem sys({two_axis(7), classical(8, 3.0, 0.0, 0.0)},
                  ReducedNetwork::steady(Eigen::MatrixXcd::Zero(2, 2)));
  Eigen::VectorXd x(6);
  x << 0.3, 1.0, 1.1, 0.2, -0.4, 1.0;
  const auto m = measure_phasors(sys, x, 0.0, {7});
  ASSERT_EQ(m.size(), 1u);
  const Complex expected = Complex(0.2, 1.1) * std::polar(1.0, 0.3 - std::numbers::pi / 2.0);
  EXPECT_EQ(m[0].machine_id, 7);
  EXPECT_NEAR(m[0].e_R, expected.real(), 1e-15);
  EXPECT_NEAR(m[0].e_I, expected.imag(), 1e-15);
  EXPECT_EQ(m[0].i_R, 0.0);
  EXPECT_EQ(m[0].i_I, 0.0);
}

TEST(MeasurePhasorsTest, TerminalDropAcrossTransientReactance) {
  GeneratorParams p = classical(1, 3.0, 0.0, 0.0);
  p.e_q_fixed = 1.2;
  const Complex y(0.5, -2.0);
  PowerSystem sys({p}, ReducedNetwork::steady(Eigen::MatrixXcd::Constant(1, 1, y)));
  Eigen::VectorXd x(2);
  x << 0.7, 1.0;
  const Complex e = std::polar(1.2, 0.7);
  const Complex i = y * e;
  const Complex et = e - Complex(0.0, 0.3) * i;
  const Eigen::VectorXd v = measurement_vector(sys, x, 0.0, {1});
  EXPECT_NEAR(v(0), et.real(), 1e-14);
  EXPECT_NEAR(v(1), et.imag(), 1e-14);
  EXPECT_NEAR(v(2), i.real(), 1e-14);
  EXPECT_NEAR(v(3), i.imag(), 1e-14);
}

TEST(MeasurePhasorsTest, PlacementOrderAndPurity) {
  const auto eq = wscc9().equilibrium();
  const Eigen::VectorXd a = measurement_vector(eq.system, eq.state, 0.0, {3, 1});
  const Eigen::VectorXd b = measurement_vector(eq.system, eq.state, 0.0, {3, 1});
  const Eigen::VectorXd later = measurement_vector(eq.system, eq.state, 3.0, {3, 1});
  ASSERT_EQ(a.size(), 8);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, later);
  const Eigen::VectorXd only1 = measurement_vector(eq.system, eq.state, 0.0, {1});
  EXPECT_EQ(Eigen::VectorXd(a.tail(4)), only1);
}

TEST(MeasurePhasorsTest, Errors) {
  const auto eq = wscc9().equilibrium();
  try {
    measure_phasors(eq.system, eq.state, 0.0, {1, 42});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownMachineId);
  }
  EXPECT_THROW(measure_phasors(eq.system, eq.state, 0.0, {}), Error);
}

TEST(SystemModelAdapterTest, SamplesAtIntervalBoundaries) {
  const auto sc = wscc9();
  const auto eq = sc.equilibrium();
  const PowerSystem sys = sc.faulted(eq.system, sc.fault_cases.front());
  const double dt = 1.0 / 60.0;
  const auto model = make_system_model(sys, {1, 2}, dt, 2, SymMatrix::identity(8),
                                       SymMatrix::identity(8));
  Eigen::VectorXd x = eq.state;
  for (long k = 1; k <= 12; ++k) {
    const Eigen::VectorXd next = model.f()(x, k);
    EXPECT_EQ(next, advance(sys, x, (k - 1) * dt, dt, 2));
    EXPECT_EQ(model.h()(next, k), measurement_vector(sys, next, k * dt, {1, 2}));
    x = next;
  }
  EXPECT_GT(max_abs(x - eq.state), 1e-4);
  EXPECT_THROW(make_system_model(sys, {1}, dt, 2, SymMatrix::identity(8), SymMatrix::identity(8)),
               Error);
}

}  // namespace
}  // namespace psdukf::dse
