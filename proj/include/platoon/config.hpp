// Copyright 2026 The Platoon Authors.
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

// Flat `key = value` configuration with dotted sections, e.g.
//
//   seed = 7
//   trucks.K = 400
//   fuel.F1 = 0.0125
//   clustering.variants = total-greedy, pairwise-greedy
//
// Lines starting with '#' are comments. Unknown keys are rejected.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/error.hpp"
#include "platoon/experiments.hpp"
#include "platoon/rng.hpp"

namespace platoon {

using ConfigMap = std::map<std::string, std::string>;

namespace config_detail {

inline std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

inline double ToDouble(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  Require(used == v.size() && !v.empty(), ErrorKind::kConfigInvalid,
          key + ": not a number: '" + v + "'");
  return x;
}

inline std::uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    Require(!v.empty() && v.front() != '-', ErrorKind::kConfigInvalid, key);
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  Require(used == v.size() && !v.empty(), ErrorKind::kConfigInvalid,
          key + ": not a non-negative integer: '" + v + "'");
  return x;
}

inline bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Fail(ErrorKind::kConfigInvalid, key + ": not a boolean: '" + v + "'");
}

inline ClusteringConfig ParseVariant(const std::string& name) {
  ClusteringConfig c;
  const auto dash = name.find('-');
  Require(dash != std::string::npos, ErrorKind::kConfigInvalid,
          "clustering.variants: bad variant '" + name + "'");
  const std::string gain = name.substr(0, dash);
  const std::string selection = name.substr(dash + 1);
  if (gain == "total") {
    c.gain = GainKind::kTotal;
  } else if (gain == "pairwise") {
    c.gain = GainKind::kPairwise;
  } else {
    Fail(ErrorKind::kConfigInvalid, "clustering.variants: bad gain in '" + name + "'");
  }
  if (selection == "greedy") {
    c.selection = Selection::kGreedy;
  } else if (selection == "random") {
    c.selection = Selection::kRandom;
  } else {
    Fail(ErrorKind::kConfigInvalid, "clustering.variants: bad selection in '" + name + "'");
  }
  return c;
}

}  // namespace config_detail

inline const std::vector<std::string>& KnownConfigKeys() {
  static const std::vector<std::string> keys = {
      "seed",
      "replicates",
      "threads",
      "network.num_locations",
      "network.side_length",
      "network.detour_factor",
      "network.per_replicate",
      "trucks.K",
      "trucks.start_time_interval",
      "trucks.terminal_subset_size",
      "trucks.nominal_speed",
      "trucks.redraw_terminals",
      "fuel.F0",
      "fuel.F1",
      "fuel.Fp0",
      "fuel.Fp1",
      "band.v_min",
      "band.v_max",
      "clustering.variants",
      "clustering.rho_l",
      "clustering.max_iterations",
      "spontaneous.time_gap",
      "sweep.K",
      "sweep.band_widths",
  };
  return keys;
}

inline void SetConfigValue(ConfigMap& map, const std::string& key, const std::string& value) {
  bool known = false;
  for (const auto& k : KnownConfigKeys()) known = known || k == key;
  Require(known, ErrorKind::kConfigInvalid, "unknown config key '" + key + "'");
  map[key] = value;
}

inline void ParseConfigLine(ConfigMap& map, const std::string& raw, const std::string& where) {
  // '#' starts a comment anywhere on the line.
  const std::string line = config_detail::Trim(raw.substr(0, raw.find('#')));
  if (line.empty()) return;
  const auto eq = line.find('=');
  Require(eq != std::string::npos, ErrorKind::kConfigInvalid, where + ": expected key = value");
  const std::string key = config_detail::Trim(line.substr(0, eq));
  const std::string value = config_detail::Trim(line.substr(eq + 1));
  Require(!key.empty(), ErrorKind::kConfigInvalid, where + ": empty key");
  SetConfigValue(map, key, value);
}

inline ConfigMap ParseConfig(std::istream& in) {
  ConfigMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ParseConfigLine(map, line, "config line " + std::to_string(line_no));
  }
  return map;
}

// `key=value` from the command line.
inline void ApplyOverride(ConfigMap& map, const std::string& assignment) {
  ParseConfigLine(map, assignment, "override '" + assignment + "'");
}

struct ResolvedConfig {
  ExperimentConfig experiment;
  SweepSpec sweep;
};

inline ResolvedConfig ResolveConfig(const ConfigMap& map) {
  using namespace config_detail;
  ResolvedConfig r;
  ExperimentConfig& c = r.experiment;
  double f0 = c.fuel.f0(), f1 = c.fuel.f1(), fp0 = c.fuel.fp0(), fp1 = c.fuel.fp1();
  double rho_l = 0.5;
  std::size_t max_iterations = ClusteringConfig{}.max_iterations;
  std::vector<std::string> variant_names = {"total-greedy", "total-random", "pairwise-greedy",
                                            "pairwise-random"};
  for (const auto& [key, v] : map) {
    if (key == "seed") c.seed = ToUnsigned(key, v);
    else if (key == "replicates") c.replicates = ToUnsigned(key, v);
    else if (key == "threads") c.threads = static_cast<unsigned>(ToUnsigned(key, v));
    else if (key == "network.num_locations") c.network.num_locations = ToUnsigned(key, v);
    else if (key == "network.side_length") c.network.side_length = ToDouble(key, v);
    else if (key == "network.detour_factor") c.network.detour_factor = ToDouble(key, v);
    else if (key == "network.per_replicate") c.network_per_replicate = ToBool(key, v);
    else if (key == "trucks.K") c.trucks.count = ToUnsigned(key, v);
    else if (key == "trucks.start_time_interval") c.trucks.start_time_interval = ToDouble(key, v);
    else if (key == "trucks.terminal_subset_size") c.trucks.terminal_subset_size = ToUnsigned(key, v);
    else if (key == "trucks.nominal_speed") c.trucks.nominal_speed = ToDouble(key, v);
    else if (key == "trucks.redraw_terminals") c.trucks.redraw_terminals = ToBool(key, v);
    else if (key == "fuel.F0") f0 = ToDouble(key, v);
    else if (key == "fuel.F1") f1 = ToDouble(key, v);
    else if (key == "fuel.Fp0") fp0 = ToDouble(key, v);
    else if (key == "fuel.Fp1") fp1 = ToDouble(key, v);
    else if (key == "band.v_min") c.band.min = ToDouble(key, v);
    else if (key == "band.v_max") c.band.max = ToDouble(key, v);
    else if (key == "clustering.variants") variant_names = SplitList(v);
    else if (key == "clustering.rho_l") rho_l = ToDouble(key, v);
    else if (key == "clustering.max_iterations") max_iterations = ToUnsigned(key, v);
    else if (key == "spontaneous.time_gap") c.spontaneous_time_gap = ToDouble(key, v);
    else if (key == "sweep.K") {
      for (const auto& item : SplitList(v)) r.sweep.truck_counts.push_back(ToUnsigned(key, item));
    } else if (key == "sweep.band_widths") {
      for (const auto& item : SplitList(v)) r.sweep.band_widths.push_back(ToDouble(key, item));
    } else {
      Fail(ErrorKind::kConfigInvalid, "unknown config key '" + key + "'");
    }
  }
  try {
    c.fuel = FuelParams(f1, f0, fp1, fp0);
  } catch (const Error& e) {
    Fail(ErrorKind::kConfigInvalid, std::string("fuel: ") + e.what());
  }
  c.variants.clear();
  for (const auto& name : variant_names) {
    ClusteringConfig v = ParseVariant(name);
    v.rho_l = rho_l;
    v.max_iterations = max_iterations;
    c.variants.push_back(v);
  }
  c.Validate();
  for (double w : r.sweep.band_widths) {
    Require(w >= 0.0 && c.trucks.nominal_speed - w / 2.0 > 0.0, ErrorKind::kConfigInvalid,
            "sweep.band_widths: widths must be >= 0 and keep v_min > 0");
  }
  return r;
}

// Every key with its resolved value; the command and RNG description go in
// comments so a manifest can be fed back as a config file.
inline void WriteManifest(std::ostream& out, const std::string& command,
                          const ResolvedConfig& r) {
  const ExperimentConfig& c = r.experiment;
  const auto old_precision = out.precision(17);
  auto join = [](const auto& values) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
    return s.str();
  };
  std::vector<std::string> names;
  for (const auto& v : c.variants) names.push_back(VariantName(v));
  out << "# run-manifest\n";
  out << "# command = " << command << '\n';
  out << "# rng = " << kRngAlgorithm << '\n';
  out << "seed = " << c.seed << '\n';
  out << "replicates = " << c.replicates << '\n';
  out << "threads = " << c.threads << '\n';
  out << "network.num_locations = " << c.network.num_locations << '\n';
  out << "network.side_length = " << c.network.side_length << '\n';
  out << "network.detour_factor = " << c.network.detour_factor << '\n';
  out << "network.per_replicate = " << (c.network_per_replicate ? "true" : "false") << '\n';
  out << "trucks.K = " << c.trucks.count << '\n';
  out << "trucks.start_time_interval = " << c.trucks.start_time_interval << '\n';
  out << "trucks.terminal_subset_size = " << c.trucks.terminal_subset_size << '\n';
  out << "trucks.nominal_speed = " << c.trucks.nominal_speed << '\n';
  out << "trucks.redraw_terminals = " << (c.trucks.redraw_terminals ? "true" : "false") << '\n';
  out << "fuel.F0 = " << c.fuel.f0() << '\n';
  out << "fuel.F1 = " << c.fuel.f1() << '\n';
  out << "fuel.Fp0 = " << c.fuel.fp0() << '\n';
  out << "fuel.Fp1 = " << c.fuel.fp1() << '\n';
  out << "band.v_min = " << c.band.min << '\n';
  out << "band.v_max = " << c.band.max << '\n';
  out << "clustering.variants = " << join(names) << '\n';
  out << "clustering.rho_l = " << (c.variants.empty() ? 0.5 : c.variants.front().rho_l) << '\n';
  out << "clustering.max_iterations = "
      << (c.variants.empty() ? 0 : c.variants.front().max_iterations) << '\n';
  out << "spontaneous.time_gap = " << c.spontaneous_time_gap << '\n';
  out << "sweep.K = " << join(r.sweep.truck_counts) << '\n';
  out << "sweep.band_widths = " << join(r.sweep.band_widths) << '\n';
  out.precision(old_precision);
}

}  // namespace platoon
