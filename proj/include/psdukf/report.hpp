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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace psdukf::harness {

/// One (placement, fault case, seed) estimation.
struct RunRecord {
  int n_pmu = 0;
  std::size_t fault_index = 0;
  std::string fault_name;
  std::uint64_t seed = 0;
  bool failed = false;
  /// A failure is expected when repair is disabled and the filter lost
  /// positive definiteness.
  bool expected_failure = false;
  std::string failure_kind;
  std::string failure_message;
  int converged_angle_count = 0;
  int total_angle_count = 0;
  int degenerate_angle_count = 0;
  double conv_ratio = 0.0;
  long nearspd_count = 0;
  double nearspd_time_s = 0.0;
  double wall_time_s = 0.0;

  bool operator==(const RunRecord&) const = default;
};

/// Per-N_PMU averages over completed runs.
struct PmuSummary {
  int n_pmu = 0;
  int runs = 0;
  int failed_runs = 0;
  double mean_conv_ratio = 0.0;
  double mean_nearspd_count = 0.0;
  double mean_nearspd_time_s = 0.0;
  double mean_wall_time_s = 0.0;

  bool operator==(const PmuSummary&) const = default;
};

struct EstimationReport {
  std::string scenario;
  bool repair_enabled = true;
  /// How convergence ratios are pooled: each run's ratio, then the mean.
  std::string aggregation = "mean_of_run_ratios";
  std::vector<RunRecord> runs;
  std::vector<PmuSummary> summary;

  bool has_unexpected_failure() const;
  bool operator==(const EstimationReport&) const = default;
};

/// Fills `summary` from `runs`, ordered by n_pmu.
void aggregate(EstimationReport& report);

std::string to_json(const EstimationReport& report);
EstimationReport report_from_json(const std::string& text);

/// Columns: n_pmu, mean_conv_ratio, mean_nearspd_count, mean_nearspd_time_s.
void write_summary_csv(std::ostream& out, const EstimationReport& report);

struct ReportFiles {
  std::filesystem::path json;
  std::filesystem::path csv;
};

/// Writes report.json and fig1.csv into `dir` (created if missing).
ReportFiles emit_report(const EstimationReport& report, const std::filesystem::path& dir);

}  // namespace psdukf::harness
