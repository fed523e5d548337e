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

// Scenario description for the estimation harness and its JSON schema.
//
// Top-level keys (unknown keys anywhere are rejected):
//   name                   string
//   system                 {frequency_hz, machines[], y_prefault}
//   duration_s             > 0, default 5
//   sample_hz              > 0, default 60
//   substeps               RK4 steps per sample, default 2
//   meas_noise_std         >= 0, default 0.01
//   process_noise_std      per-state array, default 1e-6 everywhere
//   initial_std            per-state array, default 0.1 rad / 1e-3 pu / 0.1 pu
//   initial_mean_offset    per-state array added to the pre-fault mean
//   pmu_placements         {"<n_pmu>": [machine ids]}
//   fault_cases            [{name, window: [t_on, t_off], y_fault?, y_postfault?}]
//   fault_selection        "enumerate" (every case per seed) | "random"
//   seeds                  [uint]
//   ut                     {alpha, beta, kappa?}
//   nearspd                {i_max, tau_conv, tau_eig, tau_posd}
//   repair_enabled         bool
//   check_mode             "lazy" | "eager"
//   predicted_cov_weights  "wc" | "wm"
//   criterion              "per_sample" | "mean"
//   filter_network         "unmodeled_fault" | "known_switching"
//
// Machine entries: id, order, H, D, xd, xq, xd_prime, xq_prime, Td0_prime,
// Tq0_prime, internal_emf {magnitude, angle_deg}. Complex matrices are
// nested arrays of [re, im] pairs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psdukf/dse_model.hpp"
#include "psdukf/nearspd.hpp"
#include "psdukf/sigma.hpp"
#include "psdukf/ukf.hpp"

namespace psdukf::harness {

struct FaultCase {
  std::string name;
  double t_on = 0.1;
  double t_off = 0.2;
  Eigen::MatrixXcd y_fault;
  Eigen::MatrixXcd y_postfault;
};

enum class FaultSelection { kEnumerate, kRandom };
enum class Criterion { kPerSample, kMean };
/// kUnmodeledFault: the filter's network stays pre-fault through the fault-on
/// interval and switches to post-fault at clearing. kKnownSwitching: the
/// filter sees the same switching as the truth.
enum class FilterNetwork { kUnmodeledFault, kKnownSwitching };

struct UtSettings {
  double alpha = 1.0;
  double beta = 2.0;
  std::optional<double> kappa;

  UtParams params(int n) const;
};

struct Scenario {
  std::string name = "scenario";
  double frequency_hz = 60.0;
  std::vector<dse::GeneratorParams> machines;
  std::vector<dse::Complex> internal_emf;
  Eigen::MatrixXcd y_prefault;

  double duration_s = 5.0;
  double sample_hz = 60.0;
  int substeps = 2;
  double meas_noise_std = 0.01;
  std::optional<Eigen::VectorXd> process_noise_std;
  std::optional<Eigen::VectorXd> initial_std;
  std::optional<Eigen::VectorXd> initial_mean_offset;

  std::map<int, std::vector<int>> pmu_placements;
  std::vector<FaultCase> fault_cases;
  FaultSelection fault_selection = FaultSelection::kEnumerate;
  std::vector<std::uint64_t> seeds;

  UtSettings ut;
  NearSpdConfig nearspd;
  bool repair_enabled = true;
  CheckMode check_mode = CheckMode::kLazy;
  CovWeights predicted_cov_weights = CovWeights::kWc;
  Criterion criterion = Criterion::kPerSample;
  FilterNetwork filter_network = FilterNetwork::kUnmodeledFault;

  /// Throws kScenario describing the first violated constraint.
  void validate() const;

  int sample_count() const;
  double sample_interval() const { return 1.0 / sample_hz; }

  /// Pre-fault equilibrium: machines with Pm, Efd and classical EMFs filled.
  dse::Equilibrium equilibrium() const;
  /// The truth system for one fault case.
  dse::PowerSystem faulted(const dse::PowerSystem& base, const FaultCase& fault) const;
  /// The network the filter's process model uses for one fault case.
  dse::PowerSystem filter_view(const dse::PowerSystem& base, const FaultCase& fault) const;

  Eigen::VectorXd process_std(const dse::PowerSystem& sys) const;
  Eigen::VectorXd prior_std(const dse::PowerSystem& sys) const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace psdukf::harness
