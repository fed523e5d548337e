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

#include "psdukf/report.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "json.hpp"
#include "psdukf/error.hpp"

namespace psdukf::harness {

using nlohmann::json;

bool EstimationReport::has_unexpected_failure() const {
  for (const auto& r : runs) {
    if (r.failed && !r.expected_failure) return true;
  }
  return false;
}

void aggregate(EstimationReport& report) {
  std::map<int, PmuSummary> by_pmu;
  for (const auto& r : report.runs) {
    auto& s = by_pmu[r.n_pmu];
    s.n_pmu = r.n_pmu;
    ++s.runs;
    if (r.failed) {
      ++s.failed_runs;
      continue;
    }
    s.mean_conv_ratio += r.conv_ratio;
    s.mean_nearspd_count += static_cast<double>(r.nearspd_count);
    s.mean_nearspd_time_s += r.nearspd_time_s;
    s.mean_wall_time_s += r.wall_time_s;
  }
  report.summary.clear();
  for (auto& [n_pmu, s] : by_pmu) {
    const int completed = s.runs - s.failed_runs;
    if (completed > 0) {
      s.mean_conv_ratio /= completed;
      s.mean_nearspd_count /= completed;
      s.mean_nearspd_time_s /= completed;
      s.mean_wall_time_s /= completed;
    }
    report.summary.push_back(s);
  }
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunRecord, n_pmu, fault_index, fault_name, seed, failed,
                                   expected_failure, failure_kind, failure_message,
                                   converged_angle_count, total_angle_count,
                                   degenerate_angle_count, conv_ratio, nearspd_count,
                                   nearspd_time_s, wall_time_s)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PmuSummary, n_pmu, runs, failed_runs, mean_conv_ratio,
                                   mean_nearspd_count, mean_nearspd_time_s, mean_wall_time_s)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EstimationReport, scenario, repair_enabled, aggregation, runs,
                                   summary)

std::string to_json(const EstimationReport& report) { return json(report).dump(2); }

EstimationReport report_from_json(const std::string& text) {
  try {
    return json::parse(text).get<EstimationReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, std::string("malformed report JSON: ") + e.what());
  }
}

void write_summary_csv(std::ostream& out, const EstimationReport& report) {
  out << "n_pmu,mean_conv_ratio,mean_nearspd_count,mean_nearspd_time_s\n";
  out << std::setprecision(17);
  for (const auto& s : report.summary) {
    out << s.n_pmu << ',' << s.mean_conv_ratio << ',' << s.mean_nearspd_count << ','
        << s.mean_nearspd_time_s << '\n';
  }
}

ReportFiles emit_report(const EstimationReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

  ReportFiles files{dir / "report.json", dir / "fig1.csv"};
  {
    std::ofstream out(files.json);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + files.json.string());
    out << to_json(report) << '\n';
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + files.json.string());
  }
  {
    std::ofstream out(files.csv);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + files.csv.string());
    write_summary_csv(out, report);
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + files.csv.string());
  }
  return files;
}

}  // namespace psdukf::harness
