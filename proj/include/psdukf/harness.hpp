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

// Estimation harness: truth simulation, PMU noise, convergence scoring and
// the placement x fault x seed sweep.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "psdukf/report.hpp"
#include "psdukf/scenario.hpp"

namespace psdukf::harness {

struct TruthTrajectory {
  std::vector<double> times;               // t_0 = 0 .. t_N
  std::vector<Eigen::VectorXd> states;     // one per time
  /// Clean phasors of every machine (system order) at t_1 .. t_N.
  std::vector<std::vector<dse::PhasorMeasurement>> phasors;
};

/// Integrates the faulted system from the pre-fault equilibrium. Process
/// noise with the scenario's per-state std is injected once per sample,
/// drawn from a stream derived from `seed`.
TruthTrajectory simulate_truth(const Scenario& sc, const FaultCase& fault, std::uint64_t seed);

/// Stacks (e_R, e_I, i_R, i_I) of the placed machines for every sample.
std::vector<Eigen::VectorXd> select_measurements(const TruthTrajectory& truth,
                                                 const dse::PowerSystem& sys,
                                                 const std::vector<int>& placement);

std::vector<Eigen::VectorXd> add_noise(const std::vector<Eigen::VectorXd>& clean, double std_dev,
                                       std::uint64_t seed);

struct ConvergenceResult {
  std::vector<bool> converged;   // per angle, in state order
  std::vector<bool> degenerate;  // |true| < 1e-9 somewhere in the window
  int converged_count = 0;
  int total_count = 0;           // excludes degenerate angles
  double ratio = 0.0;
};

/// An angle converges when |est - true| < 0.05 |true| on every sample with
/// t >= t_end - 0.5 (kPerSample), or on the window means (kMean).
/// Throws kDegenerateTruth if every angle is degenerate.
ConvergenceResult convergence_metric(const std::vector<Eigen::VectorXd>& estimate,
                                     const std::vector<Eigen::VectorXd>& truth,
                                     const std::vector<double>& times,
                                     const std::vector<Eigen::Index>& angle_indices,
                                     Criterion criterion = Criterion::kPerSample);

struct RunOutcome {
  RunRecord record;
  std::vector<FilterState> estimates;  // empty on failure
  TruthTrajectory truth;
};

/// One estimation; filter failures are captured in the record, not thrown.
RunOutcome run_single(const Scenario& sc, int n_pmu, std::size_t fault_index, std::uint64_t seed);

struct RunOptions {
  std::optional<bool> repair_override;
  int parallel = 1;
};

/// Runs every (n_pmu, fault, seed) combination. With kRandom fault
/// selection each seed draws one fault case. Output is independent of
/// `parallel`.
EstimationReport run_scenario(const Scenario& sc, const RunOptions& options = {});

struct BenchResult {
  int size = 0;
  int trials = 0;
  double mean_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  bool all_psd = true;
};

/// Times near_spd on random symmetric indefinite matrices with entries
/// uniform in [-1, 1].
BenchResult bench_near_spd(int size, int trials, std::uint64_t seed = 7);

}  // namespace psdukf::harness
