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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "oracles/oracles.hpp"
#include "psdukf/error.hpp"
#include "psdukf/harness.hpp"
#include "psdukf/nearspd.hpp"
#include "psdukf/sigma.hpp"
#include "psdukf/ukf.hpp"

namespace {

using namespace psdukf;
using Clock = std::chrono::steady_clock;

const std::string kSource = PSDUKF_SOURCE_DIR;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Verdict guarantee_suite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  int total = 0, converged = 0, asymmetric = 0, not_psd = 0;
  double worst_min_eig = INFINITY;
  for (int n : {2, 5, 10, 50, 150}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto r = near_spd(oracle::random_symmetric(rng, n));
      ++total;
      if (r.converged) ++converged;
      if (r.matrix.matrix() != r.matrix.matrix().transpose()) ++asymmetric;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.matrix.matrix(), Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      worst_min_eig = std::min(worst_min_eig, lo);
      if (lo < -1e-12) ++not_psd;
    }
  }
  const double elapsed = seconds_since(start);
  const double rate = static_cast<double>(converged) / total;
  const bool pass = total == 500 && asymmetric == 0 && not_psd == 0 && rate >= 0.99 && elapsed < 60.0;
  return {pass, fmt("%d matrices, asymmetric=%d, min eig=%.3e (non-PSD=%d), converged=%.1f%%, %.2f s",
                    total, asymmetric, worst_min_eig, not_psd, 100.0 * rate, elapsed)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    const Eigen::MatrixXd x = oracle::random_symmetric(rng, n);
    const double err = (near_spd(x).matrix.matrix() - oracle::clip_floor_oracle(x)).norm() /
                       std::max(1.0, x.norm());
    worst = std::max(worst, err);
  }
  return {worst <= 1e-5, fmt("200 matrices n<=8, worst ||X - oracle|| / max(1, ||X0||) = %.3e (tol 1e-5)", worst)};
}

Verdict bench_timing() {
  const std::string cmd = std::string(PSDUKF_CLI) + " bench --size 150 --trials 20";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {false, "could not launch " + cmd};
  std::string out;
  char buf[1024];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  try {
    const auto j = nlohmann::json::parse(out);
    const double mean = j.at("mean_s").get<double>();
    const bool psd = j.at("all_psd").get<bool>();
    return {status == 0 && psd && mean < 1.0,
            fmt("bench 150x150 x20: mean %.4f s (max %.4f s), all PSD=%s (limit 1.0 s)", mean,
                j.at("max_s").get<double>(), psd ? "yes" : "no")};
  } catch (const std::exception& e) {
    return {false, "unparseable bench output: " + out};
  }
}

Verdict kalman_equivalence() {
  std::mt19937_64 rng(404);
  oracle::LinearKalman kf;
  kf.A = 0.9 * Eigen::Matrix3d::Identity() + 0.1 * oracle::random_general(rng, 3, 3);
  kf.H = oracle::random_general(rng, 2, 3);
  kf.Q = 0.01 * oracle::random_spd(rng, 3, 0.1);
  kf.R = 0.1 * oracle::random_spd(rng, 2, 0.5);
  const Eigen::MatrixXd A = kf.A, H = kf.H;
  const SystemModel model([A](const Eigen::VectorXd& x, long) -> Eigen::VectorXd { return A * x; },
                          [H](const Eigen::VectorXd& x, long) -> Eigen::VectorXd { return H * x; },
                          symmetrize(kf.Q), symmetrize(kf.R));
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x = oracle::random_vector(rng, 3);
  std::vector<Eigen::VectorXd> ys;
  for (int k = 0; k < 100; ++k) {
    x = A * x + 0.1 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    ys.push_back(H * x + 0.3 * Eigen::Vector2d(gauss(rng), gauss(rng)));
  }
  Eigen::VectorXd m = oracle::random_vector(rng, 3);
  Eigen::MatrixXd P = 2.0 * Eigen::Matrix3d::Identity();
  RepairPolicy policy;
  const auto run = run_filter({m, SymMatrix(P), 0}, model, UtParams::defaults(3), policy, ys);
  double mean_err = 0.0, cov_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    kf.predict(m, P);
    kf.update(m, P, ys[k]);
    mean_err = std::max(mean_err, (run.states[k + 1].m - m).cwiseAbs().maxCoeff());
    cov_err = std::max(cov_err, relative_distance(run.states[k + 1].P.matrix(), P));
  }
  return {mean_err <= 1e-8 && cov_err <= 1e-8,
          fmt("100 steps: max |mean err| = %.3e, max relative cov err = %.3e (tol 1e-8)", mean_err, cov_err)};
}

Verdict ut_exactness() {
  std::mt19937_64 rng(505);
  double recon_mean = 0.0, recon_cov = 0.0, affine_mean = 0.0, affine_cov = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 10, q = 1 + (trial * 7) % 6;
    const Eigen::VectorXd m = oracle::random_vector(rng, n);
    const SymMatrix P = symmetrize(oracle::random_spd(rng, n));
    const auto s = generate_sigma_points(m, P, UtParams::defaults(n));
    const auto back = unscented_moments(s.points, s.wm, s.wc);
    recon_mean = std::max(recon_mean, (back.mean - m).norm() / std::max(m.norm(), kNormFloor));
    recon_cov = std::max(recon_cov, relative_distance(back.covariance.matrix(), P.matrix()));

    const Eigen::MatrixXd A = oracle::random_general(rng, q, n);
    const Eigen::VectorXd b = oracle::random_vector(rng, q);
    const Eigen::MatrixXd y = (A * s.points).colwise() + b;
    const auto mom = unscented_moments(y, s.wm, s.wc);
    const Eigen::VectorXd mean = A * m + b;
    affine_mean = std::max(affine_mean, (mom.mean - mean).norm() / std::max(mean.norm(), kNormFloor));
    affine_cov = std::max(affine_cov,
                          relative_distance(mom.covariance.matrix(), A * P.matrix() * A.transpose()));
  }
  const bool pass = recon_mean <= 1e-12 && recon_cov <= 1e-12 && affine_mean <= 1e-10 && affine_cov <= 1e-10;
  return {pass, fmt("50 cases: reconstruction mean %.2e cov %.2e (tol 1e-12); affine mean %.2e cov %.2e (tol 1e-10)",
                    recon_mean, recon_cov, affine_mean, affine_cov)};
}

Verdict end_to_end() {
  const auto sc = harness::load_scenario(kSource + "/scenarios/wscc9.json");
  const int full = sc.pmu_placements.rbegin()->first;
  const auto& fault = sc.fault_cases.front();
  const auto start = Clock::now();
  const auto out = harness::run_single(sc, full, 0, sc.seeds.front());
  const double elapsed = seconds_since(start);
  const auto& r = out.record;
  const bool pass = !r.failed && r.total_angle_count == 3 && r.converged_angle_count == 3 &&
                    fault.t_on == 0.1 && fault.t_off == 0.2 && sc.meas_noise_std == 0.01 &&
                    sc.duration_s == 5.0 && sc.sample_hz == 60.0 && elapsed < 30.0;
  return {pass, fmt("%s, %d PMUs, window [%.1f, %.1f] s: %d/%d angles converged%s, %.2f s",
                    fault.name.c_str(), full, fault.t_on, fault.t_off, r.converged_angle_count,
                    r.total_angle_count, r.failed ? (" FAILED: " + r.failure_message).c_str() : "",
                    elapsed)};
}

Verdict repair_necessity() {
  auto sc = harness::load_scenario(kSource + "/tests/fixtures/indefinite_covariance.json");
  const int n_pmu = sc.pmu_placements.begin()->first;
  const auto seed = sc.seeds.front();
  sc.repair_enabled = false;
  const auto off = harness::run_single(sc, n_pmu, 0, seed);
  sc.repair_enabled = true;
  const auto on = harness::run_single(sc, n_pmu, 0, seed);
  int not_psd = 0;
  for (const auto& s : on.estimates) {
    if (!is_psd(s.P, 1e-12)) ++not_psd;
  }
  const bool pass = off.record.failed && off.record.failure_kind == "NotPositiveDefinite" &&
                    !on.record.failed && !on.estimates.empty() && not_psd == 0;
  return {pass, fmt("repair off: %s; repair on: %s, %zu covariances, non-PSD=%d, nearSPD calls=%ld",
                    off.record.failed ? off.record.failure_kind.c_str() : "completed",
                    on.record.failed ? on.record.failure_kind.c_str() : "completed",
                    on.estimates.size(), not_psd, on.record.nearspd_count)};
}

Verdict directional_trend() {
  const auto sc = harness::load_scenario(kSource + "/scenarios/wscc9.json");
  const auto report = harness::run_scenario(sc, {std::nullopt, 4});
  const auto& one = report.summary.front();
  const auto& full = report.summary.back();
  const bool pass = one.n_pmu == 1 && one.runs >= 20 && full.runs >= 20 &&
                    full.mean_conv_ratio >= one.mean_conv_ratio &&
                    full.mean_nearspd_count <= one.mean_nearspd_count;
  return {pass, fmt("N_PMU=%d: ratio %.3f, nearSPD %.2f (%d runs); N_PMU=%d: ratio %.3f, nearSPD %.2f (%d runs)",
                    one.n_pmu, one.mean_conv_ratio, one.mean_nearspd_count, one.runs, full.n_pmu,
                    full.mean_conv_ratio, full.mean_nearspd_count, full.runs)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*check)();
  };
  const Criterion criteria[] = {
      {"nearSPD guarantee suite", guarantee_suite},
      {"oracle equivalence", oracle_equivalence},
      {"timing sanity", bench_timing},
      {"Kalman equivalence", kalman_equivalence},
      {"UT exactness", ut_exactness},
      {"end-to-end DSE", end_to_end},
      {"repair necessity regression", repair_necessity},
      {"directional PMU trend", directional_trend},
  };
  int failures = 0;
  int index = 1;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("[%s] criterion %d: %s: %s\n", v.pass ? "PASS" : "FAIL", index++, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
