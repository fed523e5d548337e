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

#include "psdukf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "psdukf/error.hpp"

namespace psdukf::harness {

namespace {

enum class Stream : std::uint32_t { kProcess = 1, kMeasurement = 2, kFaultChoice = 3, kBench = 4 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::vector<int> all_ids(const dse::PowerSystem& sys) {
  std::vector<int> ids;
  for (const auto& m : sys.machines()) ids.push_back(m.id);
  return ids;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TruthTrajectory simulate_truth(const Scenario& sc, const FaultCase& fault, std::uint64_t seed) {
  const auto eq = sc.equilibrium();
  const auto sys = sc.faulted(eq.system, fault);
  const auto ids = all_ids(sys);
  const Eigen::VectorXd q_std = sc.process_std(sys);
  const double interval = sc.sample_interval();
  const int samples = sc.sample_count();

  auto rng = make_rng(seed, Stream::kProcess);
  std::normal_distribution<double> normal(0.0, 1.0);

  TruthTrajectory truth;
  truth.times.reserve(samples + 1);
  truth.states.reserve(samples + 1);
  truth.phasors.reserve(samples);
  truth.times.push_back(0.0);
  truth.states.push_back(eq.state);
  Eigen::VectorXd x = eq.state;
  for (int k = 1; k <= samples; ++k) {
    x = dse::advance(sys, x, (k - 1) * interval, interval, sc.substeps);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += q_std(i) * normal(rng);
    if (!dse::is_plausible(sys, x)) {
      throw Error(ErrorKind::kScenario, "truth trajectory for fault '" + fault.name +
                                            "' left the plausible range at sample " +
                                            std::to_string(k));
    }
    const double t = k * interval;
    truth.times.push_back(t);
    truth.states.push_back(x);
    truth.phasors.push_back(dse::measure_phasors(sys, x, t, ids));
  }
  return truth;
}

std::vector<Eigen::VectorXd> select_measurements(const TruthTrajectory& truth,
                                                 const dse::PowerSystem& sys,
                                                 const std::vector<int>& placement) {
  std::vector<Eigen::Index> rows;
  for (int id : placement) rows.push_back(sys.index_of(id));
  std::vector<Eigen::VectorXd> out;
  out.reserve(truth.phasors.size());
  for (const auto& sample : truth.phasors) {
    Eigen::VectorXd y(4 * static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& ph = sample.at(rows[j]);
      y.segment<4>(4 * static_cast<Eigen::Index>(j)) << ph.e_R, ph.e_I, ph.i_R, ph.i_I;
    }
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<Eigen::VectorXd> add_noise(const std::vector<Eigen::VectorXd>& clean, double std_dev,
                                       std::uint64_t seed) {
  if (!(std_dev >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "noise std must be >= 0");
  std::vector<Eigen::VectorXd> noisy = clean;
  if (std_dev == 0.0) return noisy;
  auto rng = make_rng(seed, Stream::kMeasurement);
  std::normal_distribution<double> normal(0.0, std_dev);
  for (auto& y : noisy) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
  }
  return noisy;
}

ConvergenceResult convergence_metric(const std::vector<Eigen::VectorXd>& estimate,
                                     const std::vector<Eigen::VectorXd>& truth,
                                     const std::vector<double>& times,
                                     const std::vector<Eigen::Index>& angle_indices,
                                     Criterion criterion) {
  if (estimate.size() != truth.size() || truth.size() != times.size() || times.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "estimate, truth and times must be aligned");
  }
  const double window_start = times.back() - 0.5 - 1e-9;
  std::vector<std::size_t> window;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= window_start) window.push_back(k);
  }

  ConvergenceResult out;
  for (Eigen::Index idx : angle_indices) {
    bool degenerate = false;
    bool ok = true;
    double est_sum = 0.0;
    double true_sum = 0.0;
    for (std::size_t k : window) {
      const double t = truth[k](idx);
      const double e = estimate[k](idx);
      if (std::abs(t) < 1e-9) degenerate = true;
      if (!(std::abs(e - t) < 0.05 * std::abs(t))) ok = false;
      est_sum += e;
      true_sum += t;
    }
    if (criterion == Criterion::kMean) {
      const double n = static_cast<double>(window.size());
      ok = std::abs(est_sum / n - true_sum / n) < 0.05 * std::abs(true_sum / n);
    }
    out.degenerate.push_back(degenerate);
    out.converged.push_back(!degenerate && ok);
    if (!degenerate) {
      ++out.total_count;
      if (ok) ++out.converged_count;
    }
  }
  if (out.total_count == 0) {
    throw Error(ErrorKind::kDegenerateTruth, "every rotor angle is ~0 in the evaluation window");
  }
  out.ratio = static_cast<double>(out.converged_count) / out.total_count;
  return out;
}

RunOutcome run_single(const Scenario& sc, int n_pmu, std::size_t fault_index, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  auto& rec = out.record;
  const auto& fault = sc.fault_cases.at(fault_index);
  rec.n_pmu = n_pmu;
  rec.fault_index = fault_index;
  rec.fault_name = fault.name;
  rec.seed = seed;

  const auto& placement = sc.pmu_placements.at(n_pmu);
  const auto eq = sc.equilibrium();
  RepairPolicy policy;
  policy.enabled = sc.repair_enabled;
  policy.cfg = sc.nearspd;
  policy.check_mode = sc.check_mode;

  try {
    out.truth = simulate_truth(sc, fault, seed);
    // Noise is drawn for full coverage and then subset, so a machine's PMU
    // sees the same noise whatever the placement.
    const auto ids = all_ids(eq.system);
    const auto full = add_noise(select_measurements(out.truth, eq.system, ids),
                                sc.meas_noise_std, seed);
    std::vector<Eigen::Index> rows;
    for (int id : placement) rows.push_back(eq.system.index_of(id));
    std::vector<Eigen::VectorXd> measurements;
    measurements.reserve(full.size());
    for (const auto& y : full) {
      Eigen::VectorXd sub(4 * static_cast<Eigen::Index>(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) {
        sub.segment<4>(4 * static_cast<Eigen::Index>(j)) = y.segment<4>(4 * rows[j]);
      }
      measurements.push_back(std::move(sub));
    }

    const auto filter_sys = sc.filter_view(eq.system, fault);
    const Eigen::Index n = filter_sys.state_dim();
    const Eigen::VectorXd q_std = sc.process_std(filter_sys);
    const Eigen::VectorXd p_std = sc.prior_std(filter_sys);
    const double r_var = sc.meas_noise_std * sc.meas_noise_std;
    auto model = dse::make_system_model(
        filter_sys, placement, sc.sample_interval(), sc.substeps,
        SymMatrix::diagonal(q_std.array().square().matrix()),
        SymMatrix::diagonal(Eigen::VectorXd::Constant(4 * static_cast<Eigen::Index>(placement.size()), r_var)));

    FilterState initial{eq.state, SymMatrix::diagonal(p_std.array().square().matrix()), 0};
    if (sc.initial_mean_offset) initial.m += *sc.initial_mean_offset;

    FilterOptions options;
    options.predicted_cov_weights = sc.predicted_cov_weights;
    const auto params = sc.ut.params(static_cast<int>(n));
    auto run = run_filter(initial, model, params, policy, measurements, options);

    std::vector<Eigen::VectorXd> means;
    means.reserve(run.states.size());
    for (const auto& s : run.states) means.push_back(s.m);
    const auto conv = convergence_metric(means, out.truth.states, out.truth.times,
                                         filter_sys.angle_indices(), sc.criterion);
    rec.converged_angle_count = conv.converged_count;
    rec.total_angle_count = conv.total_count;
    rec.degenerate_angle_count =
        static_cast<int>(std::count(conv.degenerate.begin(), conv.degenerate.end(), true));
    rec.conv_ratio = conv.ratio;
    out.estimates = std::move(run.states);
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure_kind = std::string(to_string(e.kind()));
    rec.failure_message = e.what();
    rec.expected_failure = !sc.repair_enabled && e.kind() == ErrorKind::kNotPositiveDefinite;
  }
  rec.nearspd_count = policy.repair_count;
  rec.nearspd_time_s = policy.repair_time_total;
  rec.wall_time_s = seconds_since(start);
  return out;
}

EstimationReport run_scenario(const Scenario& sc, const RunOptions& options) {
  Scenario effective = sc;
  if (options.repair_override) effective.repair_enabled = *options.repair_override;
  effective.validate();

  struct Job {
    int n_pmu;
    std::size_t fault_index;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& [n_pmu, placement] : effective.pmu_placements) {
    for (std::size_t s = 0; s < effective.seeds.size(); ++s) {
      const auto seed = effective.seeds[s];
      if (effective.fault_selection == FaultSelection::kRandom) {
        auto rng = make_rng(seed, Stream::kFaultChoice);
        std::uniform_int_distribution<std::size_t> pick(0, effective.fault_cases.size() - 1);
        jobs.push_back({n_pmu, pick(rng), seed});
      } else {
        for (std::size_t f = 0; f < effective.fault_cases.size(); ++f) jobs.push_back({n_pmu, f, seed});
      }
    }
  }
  // Canonical order: (n_pmu, fault index, seed index).
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.n_pmu != b.n_pmu ? a.n_pmu < b.n_pmu : a.fault_index < b.fault_index;
  });

  EstimationReport report;
  report.scenario = effective.name;
  report.repair_enabled = effective.repair_enabled;
  report.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      report.runs[i] = run_single(effective, job.n_pmu, job.fault_index, job.seed).record;
    }
  };
  const int threads = std::clamp(options.parallel, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  aggregate(report);
  return report;
}

BenchResult bench_near_spd(int size, int trials, std::uint64_t seed) {
  if (size < 1 || trials < 1) throw Error(ErrorKind::kInvalidArgument, "size and trials must be >= 1");
  auto rng = make_rng(seed, Stream::kBench);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  BenchResult out;
  out.size = size;
  out.trials = trials;
  out.min_s = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd a(size, size);
    for (int j = 0; j < size; ++j) {
      for (int i = 0; i <= j; ++i) a(i, j) = a(j, i) = uniform(rng);
    }
    const auto start = std::chrono::steady_clock::now();
    const auto result = near_spd(a);
    const double elapsed = seconds_since(start);
    total += elapsed;
    out.min_s = std::min(out.min_s, elapsed);
    out.max_s = std::max(out.max_s, elapsed);
    const auto eig = eig_sym(result.matrix);
    if (eig.values(size - 1) < -1e-12) out.all_psd = false;
  }
  out.mean_s = total / trials;
  return out;
}

}  // namespace psdukf::harness
