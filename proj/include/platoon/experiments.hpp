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

// Monte Carlo experiments: random trucks on a random network, the
// spontaneous-platooning baseline, the four clustering variants and the
// per-replicate metrics behind the savings / |delta d| / leader-count /
// iteration plots.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "platoon/clustering.hpp"
#include "platoon/coordination_graph.hpp"
#include "platoon/error.hpp"
#include "platoon/parallel.hpp"
#include "platoon/rng.hpp"
#include "platoon/road_network.hpp"
#include "platoon/trucking.hpp"

namespace platoon {

struct TruckParams {
  std::size_t count = 400;
  double start_time_interval = 1.0;  // start times ~ U[0, interval]
  std::size_t terminal_subset_size = 10;
  double nominal_speed = 80.0;
  bool redraw_terminals = true;  // new terminal subset per replicate
};

inline std::vector<ClusteringConfig> DefaultVariants(double rho_l = 0.5) {
  std::vector<ClusteringConfig> variants;
  for (GainKind gain : {GainKind::kTotal, GainKind::kPairwise}) {
    for (Selection selection : {Selection::kGreedy, Selection::kRandom}) {
      ClusteringConfig c;
      c.gain = gain;
      c.selection = selection;
      c.rho_l = rho_l;
      variants.push_back(c);
    }
  }
  return variants;
}

struct ExperimentConfig {
  NetworkParams network;
  bool network_per_replicate = false;
  TruckParams trucks;
  FuelParams fuel = FuelParams::Reference();
  SpeedBand band{70.0, 90.0};
  std::vector<ClusteringConfig> variants = DefaultVariants();
  double spontaneous_time_gap = 0.01;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void Validate() const {
    auto check = [](bool ok, const std::string& field, const std::string& why) {
      Require(ok, ErrorKind::kConfigInvalid, field + ": " + why);
    };
    check(network.num_locations >= 2, "network.num_locations", "must be >= 2");
    check(network.side_length > 0.0, "network.side_length", "must be > 0");
    check(network.detour_factor > 1.0, "network.detour_factor", "must be > 1");
    check(trucks.count >= 1, "trucks.K", "must be >= 1");
    check(trucks.start_time_interval >= 0.0, "trucks.start_time_interval", "must be >= 0");
    check(trucks.terminal_subset_size >= 2, "trucks.terminal_subset_size", "must be >= 2");
    check(trucks.terminal_subset_size <= network.num_locations, "trucks.terminal_subset_size",
          "exceeds network.num_locations");
    check(band.min > 0.0 && band.max >= band.min, "band", "needs 0 < v_min <= v_max");
    check(band.Contains(trucks.nominal_speed), "trucks.nominal_speed", "outside [v_min, v_max]");
    check(fuel.FollowingSavesOn(band), "fuel", "following must save fuel on the whole band");
    check(spontaneous_time_gap >= 0.0, "spontaneous.time_gap", "must be >= 0");
    check(replicates >= 1, "replicates", "must be >= 1");
    check(!variants.empty(), "clustering.variants", "at least one variant needed");
    for (const auto& v : variants) {
      Require(v.rho_l > 0.0 && v.rho_l < 1.0, ErrorKind::kConfigInvalid,
              "clustering.rho_l: must lie in (0, 1)");
      Require(v.max_iterations >= 1, ErrorKind::kConfigInvalid,
              "clustering.max_iterations: must be >= 1");
    }
  }
};

// `count` distinct nodes, uniformly (partial Fisher-Yates).
inline std::vector<NodeId> DrawTerminals(const RoadNetwork& net, std::size_t count,
                                         std::uint64_t seed) {
  Require(count >= 2 && count <= net.node_count(), ErrorKind::kInvalidArgument,
          "terminal subset size must be in [2, node count]");
  Rng rng(seed);
  std::vector<NodeId> nodes(net.node_count());
  for (NodeId n = 0; n < nodes.size(); ++n) nodes[n] = n;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.Index(nodes.size() - i);
    std::swap(nodes[i], nodes[j]);
  }
  nodes.resize(count);
  return nodes;
}

// Trucks 0..K-1 between uniformly drawn distinct terminals, starting
// uniformly in [0, interval] and due at the nominal speed.
inline std::vector<TransportAssignment> GenerateTrucks(const RoadNetwork& net,
                                                       const TruckParams& params,
                                                       const std::vector<NodeId>& terminals,
                                                       std::uint64_t seed) {
  Require(terminals.size() >= 2, ErrorKind::kInvalidArgument, "need two terminals");
  Require(params.nominal_speed > 0.0, ErrorKind::kInvalidArgument, "nominal speed must be > 0");
  Rng rng(seed);
  std::map<std::pair<NodeId, NodeId>, Path> paths;
  std::vector<TransportAssignment> trucks;
  trucks.reserve(params.count);
  for (std::size_t k = 0; k < params.count; ++k) {
    TransportAssignment a;
    a.truck_id = static_cast<TruckId>(k);
    a.start_time = rng.Uniform(0.0, params.start_time_interval);
    a.start_node = terminals[rng.Index(terminals.size())];
    do {
      a.dest_node = terminals[rng.Index(terminals.size())];
    } while (a.dest_node == a.start_node);
    auto it = paths.find({a.start_node, a.dest_node});
    if (it == paths.end()) {
      it = paths.emplace(std::make_pair(a.start_node, a.dest_node),
                         ShortestPath(net, a.start_node, a.dest_node))
               .first;
    }
    a.path = it->second;
    a.arrival_time = a.start_time + a.path.total_length() / params.nominal_speed;
    trucks.push_back(std::move(a));
  }
  return trucks;
}

struct SpontaneousResult {
  double relative_saving = 0.0;
  double total_fuel = 0.0;
  double baseline_fuel = 0.0;
};

// Uncoordinated baseline: every truck keeps its default speed. On each road
// segment the trucks are sorted by entry time and grouped greedily, a group
// spanning at most `time_gap` from its first member. In groups of two or
// more the first member leads and the rest drive as platoon followers over
// the whole segment.
inline SpontaneousResult SpontaneousPlatooning(const std::vector<TransportAssignment>& trucks,
                                               const FuelParams& params, double time_gap) {
  struct Passage {
    double entry_time;
    TruckId truck;
    double length;
    double speed;
  };
  std::map<std::pair<NodeId, NodeId>, std::vector<Passage>> segments;
  for (const auto& a : trucks) {
    const double v = a.default_speed();
    for (std::size_t i = 0; i < a.path.size(); ++i) {
      const Edge& e = a.path.edge(i);
      segments[{e.from, e.to}].push_back(
          {a.start_time + a.path.cumulative(i) / v, a.truck_id, e.weight, v});
    }
  }
  SpontaneousResult r;
  for (auto& [edge, passages] : segments) {
    std::sort(passages.begin(), passages.end(), [](const Passage& x, const Passage& y) {
      return std::tie(x.entry_time, x.truck) < std::tie(y.entry_time, y.truck);
    });
    std::size_t begin = 0;
    while (begin < passages.size()) {
      std::size_t end = begin + 1;
      while (end < passages.size() &&
             passages[end].entry_time - passages[begin].entry_time <= time_gap) {
        ++end;
      }
      for (std::size_t k = begin; k < end; ++k) {
        const auto& p = passages[k];
        const bool follows = k > begin;
        r.total_fuel += p.length * (follows ? params.Follower(p.speed) : params.Solo(p.speed));
        r.baseline_fuel += p.length * params.Solo(p.speed);
      }
      begin = end;
    }
  }
  r.relative_saving = r.baseline_fuel > 0.0 ? 1.0 - r.total_fuel / r.baseline_fuel : 0.0;
  return r;
}

struct VariantMetrics {
  double relative_saving = 0.0;
  double total_fuel = 0.0;
  double baseline_fuel = 0.0;
  double objective = 0.0;       // f_ce of the reported leader set
  double identity_error = 0.0;  // |saving - f_ce / baseline|
  std::optional<double> mean_abs_delta_d_start;  // absent without CL-CF pairs
  std::size_t num_leaders = 0;
  std::size_t iterations = 0;
  Termination termination = Termination::kEquilibrium;
};

// Fuel of the whole fleet under a clustering result: leaders and unassigned
// trucks drive their default profile, followers their adapted plan.
inline VariantMetrics EvaluateVariant(const CoordinationGraph& g, const ClusteringResult& result) {
  const auto& fuel = g.default_fuel();
  Require(fuel.size() == g.node_count(), ErrorKind::kInvalidArgument,
          "graph carries no per-truck fuel data");
  VariantMetrics m;
  double delta_sum = 0.0;
  std::size_t pairs = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    m.baseline_fuel += fuel[i];
    const auto& leader = result.assignment[i];
    if (!leader) {
      m.total_fuel += fuel[i];
      continue;
    }
    const auto pos = g.ArcPosition(i, *leader);
    Require(pos.has_value(), ErrorKind::kInvalidArgument, "assignment uses a missing edge");
    const ArcData& data = g.out_data(i)[*pos];
    m.total_fuel += data.fuel_adapted;
    delta_sum += std::abs(data.delta_d_start);
    ++pairs;
  }
  m.relative_saving = m.baseline_fuel > 0.0 ? 1.0 - m.total_fuel / m.baseline_fuel : 0.0;
  m.objective = result.objective;
  m.identity_error = m.baseline_fuel > 0.0
                         ? std::abs(m.relative_saving - result.objective / m.baseline_fuel)
                         : std::abs(result.objective);
  if (pairs > 0) m.mean_abs_delta_d_start = delta_sum / static_cast<double>(pairs);
  m.num_leaders = result.leaders.size();
  m.iterations = result.iterations;
  m.termination = result.termination;
  return m;
}

struct ExperimentRow {
  std::size_t replicate = 0;
  std::string variant;
  std::size_t trucks = 0;
  SpeedBand band;
  double rho_l = 0.0;
  VariantMetrics metrics;
  double spontaneous_saving = 0.0;
};

// Everything one replicate needs, derived from the experiment seed and the
// replicate index only.
struct ReplicateInstance {
  RoadNetwork network;
  std::vector<NodeId> terminals;
  std::vector<TransportAssignment> trucks;
};

inline RoadNetwork ExperimentNetwork(const ExperimentConfig& cfg, std::size_t replicate) {
  const std::size_t index = cfg.network_per_replicate ? replicate : 0;
  return GenerateRandomNetwork(cfg.network, DeriveSeed(cfg.seed, index, "network"));
}

inline std::vector<TransportAssignment> ReplicateTrucks(const ExperimentConfig& cfg,
                                                        const RoadNetwork& net,
                                                        std::size_t replicate) {
  const std::size_t terminal_index = cfg.trucks.redraw_terminals ? replicate : 0;
  const auto terminals = DrawTerminals(net, cfg.trucks.terminal_subset_size,
                                       DeriveSeed(cfg.seed, terminal_index, "terminals"));
  return GenerateTrucks(net, cfg.trucks, terminals, DeriveSeed(cfg.seed, replicate, "trucks"));
}

inline std::vector<ExperimentRow> RunReplicate(const ExperimentConfig& cfg,
                                               const RoadNetwork& net, std::size_t replicate,
                                               unsigned build_threads) {
  const auto trucks = ReplicateTrucks(cfg, net, replicate);
  BuildOptions options;
  options.keep_plans = false;
  options.threads = build_threads;
  const CoordinationGraph graph = BuildCoordinationGraph(trucks, cfg.fuel, cfg.band, options);
  const double spontaneous =
      SpontaneousPlatooning(trucks, cfg.fuel, cfg.spontaneous_time_gap).relative_saving;
  std::vector<ExperimentRow> rows;
  for (const auto& variant : cfg.variants) {
    ClusteringConfig run_cfg = variant;
    run_cfg.seed = DeriveSeed(cfg.seed, replicate, "cluster:" + VariantName(variant));
    const ClusteringResult result = RunClustering(graph, run_cfg);
    ExperimentRow row;
    row.replicate = replicate;
    row.variant = VariantName(variant);
    row.trucks = trucks.size();
    row.band = cfg.band;
    row.rho_l = variant.rho_l;
    row.metrics = EvaluateVariant(graph, result);
    row.spontaneous_saving = spontaneous;
    rows.push_back(std::move(row));
  }
  return rows;
}

// One row per replicate x variant, ordered by replicate then variant.
inline std::vector<ExperimentRow> RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  std::optional<RoadNetwork> shared_net;
  if (!cfg.network_per_replicate) shared_net = ExperimentNetwork(cfg, 0);
  std::vector<std::vector<ExperimentRow>> per_replicate(cfg.replicates);
  const bool parallel_replicates = cfg.replicates > 1;
  ParallelFor(cfg.replicates, parallel_replicates ? cfg.threads : 1, [&](std::size_t r) {
    const RoadNetwork net = shared_net ? *shared_net : ExperimentNetwork(cfg, r);
    per_replicate[r] = RunReplicate(cfg, net, r, parallel_replicates ? 1 : cfg.threads);
  });
  std::vector<ExperimentRow> rows;
  for (auto& block : per_replicate) {
    for (auto& row : block) rows.push_back(std::move(row));
  }
  return rows;
}

// Sweep over truck counts or band widths (band centred on the nominal speed).
struct SweepSpec {
  std::vector<std::size_t> truck_counts;
  std::vector<double> band_widths;
};

struct SweepRow {
  std::string key_name;  // "K" or "band_width"
  double key = 0.0;
  ExperimentRow row;
};

inline std::vector<SweepRow> RunSweep(const ExperimentConfig& base, const SweepSpec& sweep) {
  std::vector<SweepRow> out;
  for (std::size_t k : sweep.truck_counts) {
    ExperimentConfig cfg = base;
    cfg.trucks.count = k;
    for (auto& row : RunExperiment(cfg)) {
      out.push_back({"K", static_cast<double>(k), std::move(row)});
    }
  }
  for (double width : sweep.band_widths) {
    ExperimentConfig cfg = base;
    cfg.band = SpeedBand{base.trucks.nominal_speed - width / 2.0,
                         base.trucks.nominal_speed + width / 2.0};
    for (auto& row : RunExperiment(cfg)) {
      out.push_back({"band_width", width, std::move(row)});
    }
  }
  return out;
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 below two samples
  std::size_t count = 0;
};

inline Summary Summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct AggregateRow {
  std::string key_name;
  double key = 0.0;
  std::string variant;
  std::size_t replicates = 0;
  Summary relative_saving;
  Summary spontaneous_saving;
  Summary mean_abs_delta_d_start;
  Summary num_leaders;
  Summary iterations;
};

// Means and standard deviations per (key, variant), in first-seen order.
inline std::vector<AggregateRow> Aggregate(const std::vector<SweepRow>& rows) {
  struct Samples {
    std::vector<double> saving, spontaneous, delta, leaders, iterations;
  };
  std::vector<std::tuple<std::string, double, std::string>> order;
  std::map<std::tuple<std::string, double, std::string>, Samples> groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.key_name, r.key, r.row.variant);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Samples& s = it->second;
    s.saving.push_back(r.row.metrics.relative_saving);
    s.spontaneous.push_back(r.row.spontaneous_saving);
    if (r.row.metrics.mean_abs_delta_d_start) {
      s.delta.push_back(*r.row.metrics.mean_abs_delta_d_start);
    }
    s.leaders.push_back(static_cast<double>(r.row.metrics.num_leaders));
    s.iterations.push_back(static_cast<double>(r.row.metrics.iterations));
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const Samples& s = groups.at(key);
    AggregateRow a;
    a.key_name = std::get<0>(key);
    a.key = std::get<1>(key);
    a.variant = std::get<2>(key);
    a.replicates = s.saving.size();
    a.relative_saving = Summarize(s.saving);
    a.spontaneous_saving = Summarize(s.spontaneous);
    a.mean_abs_delta_d_start = Summarize(s.delta);
    a.num_leaders = Summarize(s.leaders);
    a.iterations = Summarize(s.iterations);
    out.push_back(std::move(a));
  }
  return out;
}

inline constexpr const char* kRowCsvHeader =
    "replicate,variant,K,v_min,v_max,rho_l,relative_saving,spontaneous_saving,"
    "mean_abs_delta_d_start,num_leaders,iterations,termination";

inline void WriteRowsCsv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  const auto old_precision = out.precision(17);
  out << kRowCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.replicate << ',' << r.variant << ',' << r.trucks << ',' << r.band.min << ','
        << r.band.max << ',' << r.rho_l << ',' << r.metrics.relative_saving << ','
        << r.spontaneous_saving << ',';
    if (r.metrics.mean_abs_delta_d_start) out << *r.metrics.mean_abs_delta_d_start;
    out << ',' << r.metrics.num_leaders << ',' << r.metrics.iterations << ','
        << TerminationName(r.metrics.termination) << '\n';
  }
  out.precision(old_precision);
}

inline void WriteAggregateCsv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  const auto old_precision = out.precision(17);
  out << "key_name,key,variant,replicates,mean_relative_saving,std_relative_saving,"
         "mean_spontaneous_saving,std_spontaneous_saving,mean_abs_delta_d_start,"
         "std_abs_delta_d_start,mean_num_leaders,std_num_leaders,mean_iterations,"
         "std_iterations\n";
  for (const auto& a : rows) {
    out << a.key_name << ',' << a.key << ',' << a.variant << ',' << a.replicates << ','
        << a.relative_saving.mean << ',' << a.relative_saving.stddev << ','
        << a.spontaneous_saving.mean << ',' << a.spontaneous_saving.stddev << ',';
    if (a.mean_abs_delta_d_start.count > 0) {
      out << a.mean_abs_delta_d_start.mean << ',' << a.mean_abs_delta_d_start.stddev;
    } else {
      out << ',';
    }
    out << ',' << a.num_leaders.mean << ',' << a.num_leaders.stddev << ','
        << a.iterations.mean << ',' << a.iterations.stddev << '\n';
  }
  out.precision(old_precision);
}

}  // namespace platoon
