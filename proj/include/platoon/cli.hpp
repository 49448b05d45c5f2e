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

// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// error, 2 runtime error.

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "platoon/clustering.hpp"
#include "platoon/config.hpp"
#include "platoon/coordination_graph.hpp"
#include "platoon/error.hpp"
#include "platoon/experiments.hpp"
#include "platoon/pairwise_planner.hpp"
#include "platoon/road_network.hpp"
#include "platoon/trucking.hpp"

namespace platoon {

namespace cli_detail {

namespace fs = std::filesystem;

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string network_path;
  std::string trucks_path;
  std::string graph_path;
  std::optional<std::uint32_t> leader;
  std::optional<std::uint32_t> follower;
  bool trace = false;
};

class Session {
 public:
  Session(Options opts, std::ostream& out, std::ostream& err)
      : opts_(std::move(opts)), out_(out), err_(err) {}

  int Run() {
    resolved_ = LoadConfig();
    fs::create_directories(opts_.out_dir);
    const std::string& cmd = opts_.command;
    for (const std::string& name : PlannedOutputs()) OutputPath(name);
    if (cmd == "gen-network") return GenNetwork();
    if (cmd == "plan-pair") return PlanPair();
    if (cmd == "build-graph") return BuildGraph();
    if (cmd == "cluster") return Cluster();
    if (cmd == "experiment") return Experiment();
    if (cmd == "sweep") return Sweep();
    Fail(ErrorKind::kConfigInvalid, "unknown command '" + cmd + "'");
  }

 private:
  ResolvedConfig LoadConfig() const {
    ConfigMap map;
    if (!opts_.config_path.empty()) {
      std::ifstream in(opts_.config_path);
      Require(in.good(), ErrorKind::kConfigInvalid, "cannot read config " + opts_.config_path);
      map = ParseConfig(in);
    }
    for (const auto& o : opts_.overrides) ApplyOverride(map, o);
    if (opts_.seed) map["seed"] = std::to_string(*opts_.seed);
    return ResolveConfig(map);
  }

  const ExperimentConfig& cfg() const { return resolved_.experiment; }

  // Files the command will write, checked before any is written.
  std::vector<std::string> PlannedOutputs() const {
    const std::string& cmd = opts_.command;
    std::vector<std::string> names = {"run-manifest.txt"};
    const bool generates_graph =
        cmd == "build-graph" || (cmd == "cluster" && opts_.graph_path.empty());
    if (cmd == "gen-network" ||
        ((cmd == "plan-pair" || generates_graph) && opts_.network_path.empty())) {
      names.push_back("network.txt");
    }
    if ((cmd == "plan-pair" || generates_graph) && opts_.trucks_path.empty()) {
      names.push_back("trucks.txt");
    }
    if (cmd == "build-graph") names.push_back("graph.txt");
    if (cmd == "experiment") {
      names.push_back("experiment_rows.csv");
      names.push_back("experiment_aggregate.csv");
    }
    if (cmd == "sweep") {
      names.push_back("sweep_rows.csv");
      names.push_back("sweep_aggregate.csv");
    }
    return names;
  }

  // Output path inside out_dir; refuses to clobber any input file.
  std::string OutputPath(const std::string& name) const {
    const fs::path target = fs::weakly_canonical(fs::path(opts_.out_dir) / name);
    for (const std::string& input :
         {opts_.config_path, opts_.network_path, opts_.trucks_path, opts_.graph_path}) {
      if (input.empty()) continue;
      Require(fs::weakly_canonical(input) != target, ErrorKind::kConfigInvalid,
              "output " + target.string() + " would overwrite an input");
    }
    return target.string();
  }

  std::ofstream OpenOutput(const std::string& name) {
    const std::string path = OutputPath(name);
    std::ofstream file(path);
    Require(file.good(), ErrorKind::kInvalidArgument, "cannot write " + path);
    written_.push_back(path);
    return file;
  }

  void WriteRunManifest() {
    auto file = OpenOutput("run-manifest.txt");
    WriteManifest(file, opts_.command, resolved_);
  }

  RoadNetwork LoadNetwork() {
    if (!opts_.network_path.empty()) {
      std::ifstream in(opts_.network_path);
      Require(in.good(), ErrorKind::kConfigInvalid, "cannot read " + opts_.network_path);
      return ReadNetwork(in);
    }
    RoadNetwork net = ExperimentNetwork(cfg(), 0);
    auto file = OpenOutput("network.txt");
    WriteNetwork(file, net);
    return net;
  }

  std::vector<TransportAssignment> LoadTrucks(const RoadNetwork& net) {
    if (!opts_.trucks_path.empty()) {
      std::ifstream in(opts_.trucks_path);
      Require(in.good(), ErrorKind::kConfigInvalid, "cannot read " + opts_.trucks_path);
      return ReadAssignments(in, net);
    }
    Require(opts_.network_path.empty(), ErrorKind::kConfigInvalid,
            "--network given without --trucks");
    auto trucks = ReplicateTrucks(cfg(), net, 0);
    auto file = OpenOutput("trucks.txt");
    WriteAssignments(file, trucks);
    return trucks;
  }

  CoordinationGraph LoadGraph() {
    if (!opts_.graph_path.empty()) {
      std::ifstream in(opts_.graph_path);
      Require(in.good(), ErrorKind::kConfigInvalid, "cannot read " + opts_.graph_path);
      return ReadGraphDump(in);
    }
    return GenerateGraph();
  }

  CoordinationGraph GenerateGraph() {
    const RoadNetwork net = LoadNetwork();
    const auto trucks = LoadTrucks(net);
    BuildOptions options;
    options.keep_plans = false;
    options.threads = cfg().threads;
    return BuildCoordinationGraph(trucks, cfg().fuel, cfg().band, options);
  }

  void ListOutputs() {
    for (const auto& p : written_) out_ << "wrote " << p << '\n';
  }

  // gen-network and build-graph always generate; an input passed alongside is
  // only protected from being overwritten.
  int GenNetwork() {
    const RoadNetwork net = ExperimentNetwork(cfg(), 0);
    {
      auto file = OpenOutput("network.txt");
      WriteNetwork(file, net);
    }
    WriteRunManifest();
    out_ << "network " << net.node_count() << " nodes " << net.edge_count() << " edges\n";
    ListOutputs();
    return 0;
  }

  int PlanPair() {
    Require(opts_.leader && opts_.follower, ErrorKind::kConfigInvalid,
            "plan-pair needs --leader and --follower");
    const RoadNetwork net = LoadNetwork();
    const auto trucks = LoadTrucks(net);
    auto find = [&](std::uint32_t id) -> const TransportAssignment& {
      for (const auto& t : trucks) {
        if (t.truck_id == id) return t;
      }
      Fail(ErrorKind::kConfigInvalid, "no truck with id " + std::to_string(id));
    };
    const auto& leader = find(*opts_.leader);
    const auto& follower = find(*opts_.follower);
    ValidateAssignment(leader, cfg().band);
    ValidateAssignment(follower, cfg().band);
    const auto plan = AdaptedPlan(leader, follower, cfg().fuel, cfg().band);
    const auto old_precision = out_.precision(12);
    if (!plan) {
      out_ << "no plan: truck " << follower.truck_id << " cannot save fuel behind truck "
           << leader.truck_id << '\n';
    } else {
      const auto& p = *plan;
      out_ << "plan leader " << p.leader_id << " follower " << p.follower_id << '\n'
           << "leader_speed " << p.leader_speed << '\n'
           << "v_merge " << p.v_merge << '\n'
           << "v_split " << p.v_split << '\n'
           << "t_merge " << p.t_merge << '\n'
           << "t_split " << p.t_split << '\n'
           << "merge_pos " << p.merge_pos.edge_index << ' ' << p.merge_pos.offset << '\n'
           << "split_pos " << p.split_pos.edge_index << ' ' << p.split_pos.offset << '\n'
           << "d_merge " << p.d_merge << '\n'
           << "d_tail " << p.d_tail << '\n'
           << "delta_d_start " << p.delta_d_start << '\n'
           << "delta_d_end " << p.delta_d_end << '\n'
           << "fuel_default " << p.fuel_default << '\n'
           << "fuel_adapted " << p.fuel_adapted << '\n'
           << "saving " << p.saving() << '\n';
      for (const auto& phase : MaterializeProfile(p, follower).phases) {
        out_ << "phase " << phase.begin << ' ' << phase.end << ' ' << phase.speed << ' '
             << (phase.platoon_follower ? "platoon" : "solo") << '\n';
      }
    }
    out_.precision(old_precision);
    WriteRunManifest();
    return 0;
  }

  int BuildGraph() {
    const CoordinationGraph g = GenerateGraph();
    {
      auto file = OpenOutput("graph.txt");
      WriteGraphDump(file, g);
    }
    WriteRunManifest();
    out_ << "coordination graph " << g.node_count() << " nodes " << g.edge_count()
         << " edges\n";
    ListOutputs();
    return 0;
  }

  int Cluster() {
    const CoordinationGraph g = LoadGraph();
    const auto old_precision = out_.precision(12);
    for (const auto& variant : cfg().variants) {
      ClusteringConfig run_cfg = variant;
      run_cfg.seed = DeriveSeed(cfg().seed, 0, "cluster:" + VariantName(variant));
      run_cfg.record_trace = opts_.trace;
      const ClusteringResult r = RunClustering(g, run_cfg);
      for (const auto& it : r.trace) {
        out_ << "iter " << it.iteration << ' ' << it.node << ' ' << it.delta_u << ' '
             << it.objective << '\n';
      }
      out_ << "result " << VariantName(variant) << ' ' << TerminationName(r.termination)
           << " iterations " << r.iterations << " leaders " << r.leaders.size()
           << " objective " << r.objective << '\n';
      out_ << "leaders";
      for (NodeIndex n : r.leaders.Members()) out_ << ' ' << n;
      out_ << '\n';
    }
    out_.precision(old_precision);
    WriteRunManifest();
    return 0;
  }

  int Experiment() {
    const auto rows = RunExperiment(cfg());
    {
      auto file = OpenOutput("experiment_rows.csv");
      WriteRowsCsv(file, rows);
    }
    std::vector<SweepRow> keyed;
    for (const auto& r : rows) keyed.push_back({"K", static_cast<double>(r.trucks), r});
    {
      auto file = OpenOutput("experiment_aggregate.csv");
      WriteAggregateCsv(file, Aggregate(keyed));
    }
    WriteRunManifest();
    ListOutputs();
    return 0;
  }

  int Sweep() {
    const SweepSpec& spec = resolved_.sweep;
    Require(!spec.truck_counts.empty() || !spec.band_widths.empty(), ErrorKind::kConfigInvalid,
            "sweep needs sweep.K or sweep.band_widths");
    const auto rows = RunSweep(cfg(), spec);
    std::vector<ExperimentRow> plain;
    plain.reserve(rows.size());
    for (const auto& r : rows) plain.push_back(r.row);
    {
      auto file = OpenOutput("sweep_rows.csv");
      WriteRowsCsv(file, plain);
    }
    {
      auto file = OpenOutput("sweep_aggregate.csv");
      WriteAggregateCsv(file, Aggregate(rows));
    }
    WriteRunManifest();
    ListOutputs();
    return 0;
  }

  Options opts_;
  std::ostream& out_;
  std::ostream& err_;
  ResolvedConfig resolved_;
  std::vector<std::string> written_;
};

}  // namespace cli_detail

inline int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  cli_detail::Options opts;
  CLI::App app{"Truck platooning coordination simulator"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("-c,--config", opts.config_path, "key = value configuration file");
  app.add_option("-o,--out", opts.out_dir, "output directory");
  app.add_option("-s,--set", opts.overrides, "config override key=value (repeatable)");
  app.add_option("--seed", opts.seed, "experiment seed override");
  app.add_option("--network", opts.network_path, "network file (node/edge lines)");
  app.add_option("--trucks", opts.trucks_path, "assignment file (truck lines)");
  app.add_option("--graph", opts.graph_path, "coordination graph dump (cluster)");
  app.add_option("--leader", opts.leader, "leader truck id (plan-pair)");
  app.add_option("--follower", opts.follower, "follower truck id (plan-pair)");
  app.add_flag("--trace", opts.trace, "print one line per clustering iteration");
  for (const char* name : {"gen-network", "plan-pair", "build-graph", "cluster", "experiment",
                           "sweep"}) {
    app.add_subcommand(name)->callback([&opts, name] { opts.command = name; });
  }
  app.get_subcommand("gen-network")->description("generate a random road network");
  app.get_subcommand("plan-pair")->description("fuel-optimal plan of one follower behind one leader");
  app.get_subcommand("build-graph")->description("build and dump the coordination graph");
  app.get_subcommand("cluster")->description("select coordination leaders");
  app.get_subcommand("experiment")->description("Monte Carlo replicates of all variants");
  app.get_subcommand("sweep")->description("experiments over sweep.K and sweep.band_widths");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    cli_detail::Session session(opts, out, err);
    return session.Run();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool config_error = e.kind() == ErrorKind::kConfigInvalid || e.kind() == ErrorKind::kParse;
    return config_error ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return RunCli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace platoon
