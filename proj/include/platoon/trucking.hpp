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

// Trucks: transport assignments, piecewise-constant speed profiles, hybrid
// trajectories and the first-order fuel model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/error.hpp"
#include "platoon/road_network.hpp"

namespace platoon {

using TruckId = std::uint32_t;

// Admissible speed interval [min, max], min > 0.
struct SpeedBand {
  double min = 70.0;
  double max = 90.0;

  bool Contains(double v) const { return v >= min && v <= max; }
  double width() const { return max - min; }
};

inline void ValidateBand(const SpeedBand& band) {
  Require(band.min > 0.0 && band.max >= band.min, ErrorKind::kInvalidArgument,
          "speed band needs 0 < v_min <= v_max");
}

// Fuel per distance: f0(v) = F1 v + F0 driving alone or as platoon leader,
// fp(v) = Fp1 v + Fp0 as platoon follower.
class FuelParams {
 public:
  FuelParams(double f1, double f0, double fp1, double fp0)
      : f1_(f1), f0_(f0), fp1_(fp1), fp0_(fp0) {
    Require(f1 > fp1 && fp1 > 0.0, ErrorKind::kInvalidArgument,
            "fuel model needs F1 > Fp1 > 0");
  }

  // F0 = 1, F1 = 1/80, follower coefficients scaled by 0.9.
  static FuelParams Reference() { return FuelParams(1.0 / 80.0, 1.0, 0.9 / 80.0, 0.9); }

  double f1() const { return f1_; }
  double f0() const { return f0_; }
  double fp1() const { return fp1_; }
  double fp0() const { return fp0_; }
  double delta_f0() const { return f0_ - fp0_; }

  double Solo(double v) const { return f1_ * v + f0_; }
  double Follower(double v) const { return fp1_ * v + fp0_; }

  // Linear models, so checking both band ends covers the whole band.
  bool FollowingSavesOn(const SpeedBand& band) const {
    return Solo(band.min) > Follower(band.min) && Solo(band.max) > Follower(band.max);
  }

 private:
  double f1_;
  double f0_;
  double fp1_;
  double fp0_;
};

struct TransportAssignment {
  TruckId truck_id = 0;
  NodeId start_node = 0;
  NodeId dest_node = 0;
  double start_time = 0.0;
  double arrival_time = 0.0;
  Path path;

  double length() const { return path.total_length(); }
  double duration() const { return arrival_time - start_time; }
  double default_speed() const { return length() / duration(); }
};

inline TransportAssignment MakeAssignment(const RoadNetwork& net, TruckId id,
                                          NodeId start, NodeId dest,
                                          double start_time, double arrival_time) {
  TransportAssignment a;
  a.truck_id = id;
  a.start_node = start;
  a.dest_node = dest;
  a.start_time = start_time;
  a.arrival_time = arrival_time;
  a.path = ShortestPath(net, start, dest);
  return a;
}

inline void ValidateAssignment(const TransportAssignment& a, const SpeedBand& band) {
  const std::string who = "truck " + std::to_string(a.truck_id);
  Require(a.arrival_time > a.start_time, ErrorKind::kInvalidArgument,
          who + ": arrival must be after start");
  Require(!a.path.empty() && a.path.start() == a.start_node &&
              a.path.destination() == a.dest_node,
          ErrorKind::kInvalidArgument, who + ": path does not match endpoints");
  const double v = a.default_speed();
  Require(band.Contains(v), ErrorKind::kSpeedBoundViolation,
          who + ": default speed " + std::to_string(v) + " outside band");
}

struct SpeedPhase {
  double begin = 0.0;
  double end = 0.0;
  double speed = 0.0;
  bool platoon_follower = false;
  std::optional<TruckId> platoon_leader;

  double duration() const { return end - begin; }
  double distance() const { return (end - begin) * speed; }
};

struct SpeedProfile {
  std::vector<SpeedPhase> phases;

  double DistanceCovered() const {
    double d = 0.0;
    for (const auto& p : phases) d += p.distance();
    return d;
  }
};

inline SpeedProfile DefaultProfile(const TransportAssignment& a) {
  return SpeedProfile{{SpeedPhase{a.start_time, a.arrival_time, a.default_speed(),
                                  false, std::nullopt}}};
}

// Checks contiguity, coverage of [t_start, t_arrive), the speed band and
// that the profile travels the full path length (1e-9 relative).
inline void ValidateProfile(const TransportAssignment& a, const SpeedProfile& s,
                            const SpeedBand& band) {
  Require(!s.phases.empty(), ErrorKind::kInvalidArgument, "empty speed profile");
  Require(s.phases.front().begin == a.start_time &&
              s.phases.back().end == a.arrival_time,
          ErrorKind::kInvalidArgument, "profile does not cover the assignment");
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    const auto& p = s.phases[i];
    Require(p.end > p.begin, ErrorKind::kInvalidArgument, "empty speed phase");
    if (i > 0) {
      Require(s.phases[i - 1].end == p.begin, ErrorKind::kInvalidArgument,
              "speed phases are not contiguous");
    }
    if (!band.Contains(p.speed)) {
      Fail(ErrorKind::kSpeedBoundViolation,
           "phase speed " + std::to_string(p.speed) + " outside band");
    }
  }
  const double covered = s.DistanceCovered();
  Require(std::abs(covered - a.length()) <= 1e-9 * a.length(),
          ErrorKind::kInvalidArgument, "profile does not travel the path length");
}

// Hybrid trajectory of a truck following a piecewise-constant speed profile
// along its path. Edge transitions happen at the jump times.
class Trajectory {
 public:
  Trajectory(const TransportAssignment& a, SpeedProfile profile, const SpeedBand& band)
      : path_(a.path), profile_(std::move(profile)) {
    for (const auto& p : profile_.phases) {
      if (!band.Contains(p.speed)) {
        Fail(ErrorKind::kSpeedBoundViolation,
             "phase speed " + std::to_string(p.speed) + " outside band");
      }
    }
    ValidateProfile(a, profile_, band);
    phase_arc_.reserve(profile_.phases.size() + 1);
    phase_arc_.push_back(0.0);
    for (const auto& p : profile_.phases) phase_arc_.push_back(phase_arc_.back() + p.distance());
    jump_times_.reserve(path_.size() + 1);
    jump_times_.push_back(a.start_time);
    for (std::size_t i = 1; i < path_.size(); ++i) {
      jump_times_.push_back(TimeAt(path_.cumulative(i)));
    }
    jump_times_.push_back(a.arrival_time);
  }

  const std::vector<double>& jump_times() const { return jump_times_; }
  const SpeedProfile& profile() const { return profile_; }

  // Arc length travelled by time t, clamped to [start, arrival].
  double ArcLengthAt(double t) const {
    const auto& phases = profile_.phases;
    if (t <= phases.front().begin) return 0.0;
    if (t >= phases.back().end) return path_.total_length();
    auto it = std::upper_bound(phases.begin(), phases.end(), t,
                               [](double time, const SpeedPhase& p) { return time < p.end; });
    const auto k = static_cast<std::size_t>(it - phases.begin());
    return std::min(phase_arc_[k] + (t - it->begin) * it->speed, path_.total_length());
  }

  // First time at which arc length `arc` is reached (inverse of ArcLengthAt).
  double TimeAt(double arc) const {
    const auto& phases = profile_.phases;
    if (arc <= 0.0) return phases.front().begin;
    auto it = std::lower_bound(phase_arc_.begin() + 1, phase_arc_.end(), arc);
    if (it == phase_arc_.end()) return phases.back().end;
    const auto k = static_cast<std::size_t>(it - phase_arc_.begin()) - 1;
    return phases[k].begin + (arc - phase_arc_[k]) / phases[k].speed;
  }

  // State (offset, edge) at time t. At t_arrive the truck sits at the end of
  // its final edge.
  PathPosition PositionAt(double t) const {
    if (t >= jump_times_.back()) {
      return PathPosition{path_.size() - 1, path_.edges().back().weight};
    }
    auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
    std::size_t edge = it == jump_times_.begin()
                           ? 0
                           : static_cast<std::size_t>(it - jump_times_.begin()) - 1;
    edge = std::min(edge, path_.size() - 1);
    const double offset = std::clamp(ArcLengthAt(t) - path_.cumulative(edge), 0.0,
                                     path_.edge(edge).weight);
    return PathPosition{edge, offset};
  }

 private:
  Path path_;
  SpeedProfile profile_;
  std::vector<double> phase_arc_;
  std::vector<double> jump_times_;
};

inline Trajectory MakeTrajectory(const TransportAssignment& a, const SpeedProfile& s,
                                 const SpeedBand& band) {
  return Trajectory(a, s, band);
}

// Total fuel of a profile: per phase, distance times fuel per distance at
// the phase speed, with the follower model while platooning as a follower.
inline double FuelConsumption(const SpeedProfile& s, const FuelParams& params) {
  double fuel = 0.0;
  for (const auto& p : s.phases) {
    const double per_distance =
        p.platoon_follower ? params.Follower(p.speed) : params.Solo(p.speed);
    fuel += p.distance() * per_distance;
  }
  return fuel;
}

inline double DefaultFuel(const TransportAssignment& a, const FuelParams& params) {
  return FuelConsumption(DefaultProfile(a), params);
}

// Text format: `truck <id> <start_node> <dest_node> <t_start> <t_arrive>`.
inline void WriteAssignments(std::ostream& out,
                             const std::vector<TransportAssignment>& trucks) {
  const auto old_precision = out.precision(17);
  for (const auto& a : trucks) {
    out << "truck " << a.truck_id << ' ' << a.start_node << ' ' << a.dest_node << ' '
        << a.start_time << ' ' << a.arrival_time << '\n';
  }
  out.precision(old_precision);
}

inline std::vector<TransportAssignment> ReadAssignments(std::istream& in,
                                                        const RoadNetwork& net) {
  std::vector<TransportAssignment> trucks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag.front() == '#') continue;
    const std::string where = "truck line " + std::to_string(line_no);
    Require(tag == "truck", ErrorKind::kParse, where + ": unknown record '" + tag + "'");
    std::uint64_t id, start, dest;
    double t0, t1;
    Require(static_cast<bool>(fields >> id >> start >> dest >> t0 >> t1),
            ErrorKind::kParse, where);
    Require(start < net.node_count() && dest < net.node_count() && start != dest,
            ErrorKind::kParse, where + ": bad start/destination");
    Require(t1 > t0, ErrorKind::kParse, where + ": arrival must follow start");
    trucks.push_back(MakeAssignment(net, static_cast<TruckId>(id),
                                    static_cast<NodeId>(start),
                                    static_cast<NodeId>(dest), t0, t1));
  }
  return trucks;
}

}  // namespace platoon
