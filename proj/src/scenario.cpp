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

#include "psdukf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "psdukf/error.hpp"

namespace psdukf::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::kScenario, what); }

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail("missing key '" + std::string(key) + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

Eigen::MatrixXcd complex_matrix(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) fail(where + " must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(value.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = value[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      fail(where + " must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& entry = row[j];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        fail(where + " entries must be [re, im] pairs");
      }
      m(i, j) = dse::Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

std::optional<Eigen::VectorXd> vector_or_none(const json& obj, const char* key,
                                              const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  const auto values = get<std::vector<double>>(obj, key, where);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

template <typename E>
E choice(const json& obj, const char* key, E fallback,
         std::initializer_list<std::pair<std::string_view, E>> options, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto text = get<std::string>(obj, key, where);
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  fail("unsupported value '" + text + "' for '" + key + "' in " + where);
}

dse::GeneratorParams parse_machine(const json& m, std::size_t index, dse::Complex& emf) {
  const std::string where = "system.machines[" + std::to_string(index) + "]";
  check_keys(m, {"id", "order", "H", "D", "xd", "xq", "xd_prime", "xq_prime", "Td0_prime",
                 "Tq0_prime", "internal_emf"},
             where);
  dse::GeneratorParams p;
  p.id = get<int>(m, "id", where);
  p.order = get<int>(m, "order", where);
  p.H = get<double>(m, "H", where);
  p.D = get_or<double>(m, "D", 0.0, where);
  p.xd = get<double>(m, "xd", where);
  p.xq = get<double>(m, "xq", where);
  p.xd_prime = get<double>(m, "xd_prime", where);
  p.xq_prime = get<double>(m, "xq_prime", where);
  p.Td0_prime = get_or<double>(m, "Td0_prime", 0.0, where);
  p.Tq0_prime = get_or<double>(m, "Tq0_prime", 0.0, where);
  const auto& e = m.contains("internal_emf") ? m.at("internal_emf") : json();
  if (e.is_null()) fail("missing key 'internal_emf' in " + where);
  check_keys(e, {"magnitude", "angle_deg"}, where + ".internal_emf");
  emf = std::polar(get<double>(e, "magnitude", where),
                   get<double>(e, "angle_deg", where) * std::numbers::pi / 180.0);
  return p;
}

}  // namespace

UtParams UtSettings::params(int n) const {
  const double k = kappa.value_or(3.0 - n > 0.0 ? 3.0 - n : 0.5);
  return UtParams(n, alpha, beta, k);
}

int Scenario::sample_count() const {
  return static_cast<int>(std::llround(duration_s * sample_hz));
}

void Scenario::validate() const {
  if (machines.empty()) fail("system needs at least one machine");
  if (internal_emf.size() != machines.size()) fail("one internal EMF per machine required");
  const auto count = static_cast<Eigen::Index>(machines.size());
  if (y_prefault.rows() != count || y_prefault.cols() != count) {
    fail("y_prefault dimension must equal the machine count");
  }
  if (!(duration_s > 0.0)) fail("duration_s must be positive");
  if (!(sample_hz > 0.0)) fail("sample_hz must be positive");
  if (sample_count() < 1) fail("duration shorter than one sample");
  if (substeps < 1) fail("substeps must be >= 1");
  if (!(meas_noise_std >= 0.0)) fail("meas_noise_std must be nonnegative");
  if (pmu_placements.empty()) fail("pmu_placements must not be empty");
  for (const auto& [n_pmu, ids] : pmu_placements) {
    if (ids.empty()) fail("placement for n_pmu=" + std::to_string(n_pmu) + " is empty");
    for (int id : ids) {
      if (std::none_of(machines.begin(), machines.end(), [id](const auto& m) { return m.id == id; })) {
        fail("placement for n_pmu=" + std::to_string(n_pmu) + " names unknown machine " +
             std::to_string(id));
      }
    }
  }
  if (fault_cases.empty()) fail("fault_cases must not be empty");
  for (const auto& f : fault_cases) {
    if (f.y_fault.rows() != count || f.y_postfault.rows() != count) {
      fail("fault case '" + f.name + "' admittance dimension mismatch");
    }
    if (!(f.t_on >= 0.0) || !(f.t_off >= f.t_on)) fail("fault case '" + f.name + "' has a bad window");
  }
  if (seeds.empty()) fail("seeds must not be empty");
  int n = 0;
  for (const auto& m : machines) n += m.order;
  auto check_len = [n](const std::optional<Eigen::VectorXd>& v, const char* what) {
    if (v && v->size() != n) fail(std::string(what) + " must have one entry per state");
    if (v && !v->allFinite()) fail(std::string(what) + " must be finite");
  };
  check_len(process_noise_std, "process_noise_std");
  check_len(initial_std, "initial_std");
  check_len(initial_mean_offset, "initial_mean_offset");
  if (process_noise_std && (process_noise_std->array() < 0.0).any()) fail("process_noise_std must be >= 0");
  if (initial_std && (initial_std->array() <= 0.0).any()) fail("initial_std must be > 0");
  try {
    ut.params(n);
    nearspd.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

dse::Equilibrium Scenario::equilibrium() const {
  dse::PowerSystem base(machines, dse::ReducedNetwork::steady(y_prefault), frequency_hz);
  return dse::initialize_equilibrium(base, internal_emf);
}

dse::PowerSystem Scenario::faulted(const dse::PowerSystem& base, const FaultCase& fault) const {
  dse::ReducedNetwork net;
  net.y_prefault = y_prefault;
  net.y_fault = fault.y_fault;
  net.y_postfault = fault.y_postfault;
  net.t_on = fault.t_on;
  net.t_off = fault.t_off;
  return base.with_network(std::move(net));
}

dse::PowerSystem Scenario::filter_view(const dse::PowerSystem& base, const FaultCase& fault) const {
  if (filter_network == FilterNetwork::kKnownSwitching) return faulted(base, fault);
  dse::ReducedNetwork net;
  net.y_prefault = y_prefault;
  net.y_fault = y_prefault;
  net.y_postfault = fault.y_postfault;
  net.t_on = fault.t_on;
  net.t_off = fault.t_off;
  return base.with_network(std::move(net));
}

Eigen::VectorXd Scenario::process_std(const dse::PowerSystem& sys) const {
  if (process_noise_std) return *process_noise_std;
  return Eigen::VectorXd::Constant(sys.state_dim(), 1e-6);
}

Eigen::VectorXd Scenario::prior_std(const dse::PowerSystem& sys) const {
  if (initial_std) return *initial_std;
  Eigen::VectorXd s(sys.state_dim());
  for (Eigen::Index k = 0; k < sys.machine_count(); ++k) {
    const Eigen::Index o = sys.offset(k);
    s(o) = 0.1;
    s(o + 1) = 1e-3;
    if (sys.machines()[k].order == 4) {
      s(o + 2) = 0.1;
      s(o + 3) = 0.1;
    }
  }
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  const std::string top = "scenario";
  check_keys(doc, {"name", "system", "duration_s", "sample_hz", "substeps", "meas_noise_std",
                   "process_noise_std", "initial_std", "initial_mean_offset", "pmu_placements",
                   "fault_cases", "fault_selection", "seeds", "ut", "nearspd", "repair_enabled",
                   "check_mode", "predicted_cov_weights", "criterion", "filter_network"},
             top);
  Scenario sc;
  sc.name = get_or<std::string>(doc, "name", sc.name, top);

  if (!doc.contains("system")) fail("missing key 'system'");
  const auto& sys = doc.at("system");
  check_keys(sys, {"frequency_hz", "machines", "y_prefault"}, "system");
  sc.frequency_hz = get_or<double>(sys, "frequency_hz", 60.0, "system");
  if (!sys.contains("machines") || !sys.at("machines").is_array()) fail("system.machines must be an array");
  for (std::size_t i = 0; i < sys.at("machines").size(); ++i) {
    dse::Complex emf;
    sc.machines.push_back(parse_machine(sys.at("machines")[i], i, emf));
    sc.internal_emf.push_back(emf);
  }
  if (!sys.contains("y_prefault")) fail("missing key 'y_prefault' in system");
  sc.y_prefault = complex_matrix(sys.at("y_prefault"), "system.y_prefault");

  sc.duration_s = get_or<double>(doc, "duration_s", sc.duration_s, top);
  sc.sample_hz = get_or<double>(doc, "sample_hz", sc.sample_hz, top);
  sc.substeps = get_or<int>(doc, "substeps", sc.substeps, top);
  sc.meas_noise_std = get_or<double>(doc, "meas_noise_std", sc.meas_noise_std, top);
  sc.process_noise_std = vector_or_none(doc, "process_noise_std", top);
  sc.initial_std = vector_or_none(doc, "initial_std", top);
  sc.initial_mean_offset = vector_or_none(doc, "initial_mean_offset", top);

  if (!doc.contains("pmu_placements") || !doc.at("pmu_placements").is_object()) {
    fail("pmu_placements must be an object");
  }
  for (const auto& [key, ids] : doc.at("pmu_placements").items()) {
    int n_pmu = 0;
    try {
      std::size_t used = 0;
      n_pmu = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      fail("pmu_placements key '" + key + "' is not an integer");
    }
    try {
      sc.pmu_placements[n_pmu] = ids.get<std::vector<int>>();
    } catch (const json::exception&) {
      fail("pmu_placements['" + key + "'] must be a list of machine ids");
    }
  }

  if (!doc.contains("fault_cases") || !doc.at("fault_cases").is_array()) fail("fault_cases must be an array");
  for (std::size_t i = 0; i < doc.at("fault_cases").size(); ++i) {
    const auto& f = doc.at("fault_cases")[i];
    const std::string where = "fault_cases[" + std::to_string(i) + "]";
    check_keys(f, {"name", "window", "y_fault", "y_postfault"}, where);
    FaultCase fc;
    fc.name = get_or<std::string>(f, "name", "fault" + std::to_string(i), where);
    const auto window = get<std::vector<double>>(f, "window", where);
    if (window.size() != 2) fail(where + ".window must be [t_on, t_off]");
    fc.t_on = window[0];
    fc.t_off = window[1];
    fc.y_fault = f.contains("y_fault") ? complex_matrix(f.at("y_fault"), where + ".y_fault") : sc.y_prefault;
    fc.y_postfault = f.contains("y_postfault")
                         ? complex_matrix(f.at("y_postfault"), where + ".y_postfault")
                         : sc.y_prefault;
    sc.fault_cases.push_back(std::move(fc));
  }
  sc.fault_selection = choice(doc, "fault_selection", sc.fault_selection,
                              {{"enumerate", FaultSelection::kEnumerate},
                               {"random", FaultSelection::kRandom}},
                              top);
  sc.seeds = get<std::vector<std::uint64_t>>(doc, "seeds", top);

  if (doc.contains("ut")) {
    const auto& ut = doc.at("ut");
    check_keys(ut, {"alpha", "beta", "kappa"}, "ut");
    sc.ut.alpha = get_or<double>(ut, "alpha", sc.ut.alpha, "ut");
    sc.ut.beta = get_or<double>(ut, "beta", sc.ut.beta, "ut");
    if (ut.contains("kappa")) sc.ut.kappa = get<double>(ut, "kappa", "ut");
  }
  if (doc.contains("nearspd")) {
    const auto& ns = doc.at("nearspd");
    check_keys(ns, {"i_max", "tau_conv", "tau_eig", "tau_posd"}, "nearspd");
    sc.nearspd.i_max = get_or<int>(ns, "i_max", sc.nearspd.i_max, "nearspd");
    sc.nearspd.tau_conv = get_or<double>(ns, "tau_conv", sc.nearspd.tau_conv, "nearspd");
    sc.nearspd.tau_eig = get_or<double>(ns, "tau_eig", sc.nearspd.tau_eig, "nearspd");
    sc.nearspd.tau_posd = get_or<double>(ns, "tau_posd", sc.nearspd.tau_posd, "nearspd");
  }
  sc.repair_enabled = get_or<bool>(doc, "repair_enabled", sc.repair_enabled, top);
  sc.check_mode = choice(doc, "check_mode", sc.check_mode,
                         {{"lazy", CheckMode::kLazy}, {"eager", CheckMode::kEager}}, top);
  sc.predicted_cov_weights = choice(doc, "predicted_cov_weights", sc.predicted_cov_weights,
                                    {{"wc", CovWeights::kWc}, {"wm", CovWeights::kWm}}, top);
  sc.criterion = choice(doc, "criterion", sc.criterion,
                        {{"per_sample", Criterion::kPerSample}, {"mean", Criterion::kMean}}, top);
  sc.filter_network = choice(doc, "filter_network", sc.filter_network,
                             {{"unmodeled_fault", FilterNetwork::kUnmodeledFault},
                              {"known_switching", FilterNetwork::kKnownSwitching}},
                             top);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open scenario " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace psdukf::harness
