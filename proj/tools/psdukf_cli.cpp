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

// Command-line front end:
//   psdukf_cli run --scenario <file> --out <dir> [--repair on|off] [--parallel N]
//   psdukf_cli nearspd --in <matrix.csv> --out <matrix.csv> [--imax --tconv --teig --tposd]
//   psdukf_cli bench --size 150 --trials 20

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "psdukf/error.hpp"
#include "psdukf/harness.hpp"
#include "psdukf/nearspd.hpp"

namespace {

int run_command(const std::string& scenario_path, const std::string& out_dir,
                const std::string& repair, int parallel) {
  using namespace psdukf::harness;
  const auto sc = load_scenario(scenario_path);
  RunOptions options;
  options.parallel = parallel;
  if (repair == "on") options.repair_override = true;
  if (repair == "off") options.repair_override = false;

  const auto report = run_scenario(sc, options);
  const auto files = emit_report(report, out_dir);
  for (const auto& s : report.summary) {
    std::cout << "n_pmu=" << s.n_pmu << " runs=" << s.runs << " failed=" << s.failed_runs
              << " conv_ratio=" << s.mean_conv_ratio << " nearspd_count=" << s.mean_nearspd_count
              << " nearspd_time_s=" << s.mean_nearspd_time_s << '\n';
  }
  std::cout << "wrote " << files.json.string() << " and " << files.csv.string() << '\n';
  return report.has_unexpected_failure() ? 1 : 0;
}

int nearspd_command(const std::string& in, const std::string& out,
                    const psdukf::NearSpdConfig& cfg) {
  const auto result = psdukf::near_spd(psdukf::read_matrix_csv(std::filesystem::path(in)), cfg);
  psdukf::write_matrix_csv(std::filesystem::path(out), result.matrix.matrix());
  nlohmann::json summary{{"iterations", result.iterations},
                         {"converged", result.converged},
                         {"distance", result.distance}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int bench_command(int size, int trials, std::uint64_t seed) {
  const auto r = psdukf::harness::bench_near_spd(size, trials, seed);
  nlohmann::json summary{{"size", r.size},     {"trials", r.trials}, {"mean_s", r.mean_s},
                         {"min_s", r.min_s},   {"max_s", r.max_s},   {"all_psd", r.all_psd}};
  std::cout << summary.dump() << '\n';
  return r.all_psd ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UKF with nearest-SPD covariance repair: estimation harness and tools"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, repair = "scenario";
  int parallel = 1;
  auto* run = app.add_subcommand("run", "Run a scenario sweep and write report.json / fig1.csv");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--repair", repair, "Override repair: on|off")->check(CLI::IsMember({"on", "off", "scenario"}));
  run->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  std::string in_csv, out_csv;
  psdukf::NearSpdConfig cfg;
  auto* near = app.add_subcommand("nearspd", "Repair a matrix read from CSV");
  near->add_option("--in", in_csv, "Input matrix CSV")->required()->check(CLI::ExistingFile);
  near->add_option("--out", out_csv, "Output matrix CSV")->required();
  near->add_option("--imax", cfg.i_max, "Maximum iterations");
  near->add_option("--tconv", cfg.tau_conv, "Relative convergence tolerance");
  near->add_option("--teig", cfg.tau_eig, "Relative eigenvalue clipping threshold");
  near->add_option("--tposd", cfg.tau_posd, "Relative positive-definite floor");

  int size = 150, trials = 20;
  std::uint64_t seed = 7;
  auto* bench = app.add_subcommand("bench", "Time near_spd on random indefinite matrices");
  bench->add_option("--size", size, "Matrix dimension")->check(CLI::PositiveNumber);
  bench->add_option("--trials", trials, "Number of matrices")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(scenario_path, out_dir, repair, parallel);
    if (*near) return nearspd_command(in_csv, out_csv, cfg);
    if (*bench) return bench_command(size, trials, seed);
  } catch (const psdukf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
