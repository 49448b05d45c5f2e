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

// Fuel-optimal speed adaptation of a coordination follower (CF) that joins a
// coordination leader (CL) driving at constant speed.
//
// The CF drives three constant-speed phases: a rendezvous phase until it
// merges with the CL, a platoon phase behind the CL at the CL's speed, and a
// final phase after the split that brings it to its destination on time.
// Merging and splitting are only possible on the road segments both trucks'
// shortest paths share.

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "platoon/error.hpp"
#include "platoon/road_network.hpp"
#include "platoon/trucking.hpp"

namespace platoon {

// Rendezvous speed minimising rendezvous-plus-platoon fuel when ignoring the
// speed band: v0 (1 -/+ sqrt(1 - Fp1/F1 + dF0/(F1 v0))), minus when the CF
// has to fall back (delta_d < 0), plus when it has to catch up.
inline double UnconstrainedRendezvousSpeed(double v0, double delta_d,
                                           const FuelParams& params) {
  if (delta_d == 0.0) return v0;
  const double radicand =
      1.0 - params.fp1() / params.f1() + params.delta_f0() / (params.f1() * v0);
  if (!(radicand > 0.0)) {
    Fail(ErrorKind::kNoFuelAdvantage,
         "platooning saves no fuel at speed " + std::to_string(v0));
  }
  const double root = std::sqrt(radicand);
  return delta_d > 0.0 ? v0 * (1.0 + root) : v0 * (1.0 - root);
}

// The unconstrained optimum clamped into the band. Only the gap sign and the
// fuel model matter; path lengths never enter.
inline double OptimalRendezvousSpeed(double v0, double delta_d, const FuelParams& params,
                                     const SpeedBand& band) {
  Require(band.Contains(v0), ErrorKind::kInvalidArgument,
          "leader speed outside the band");
  const double v = UnconstrainedRendezvousSpeed(v0, delta_d, params);
  if (delta_d < 0.0) return std::max(v, band.min);
  if (delta_d > 0.0) return std::min(v, band.max);
  return v0;
}

namespace internal {

inline void RequireCatchupSigns(double v_s, double v0, double delta_d) {
  const bool ok = (delta_d > 0.0 && v_s > v0) || (delta_d < 0.0 && v_s < v0);
  if (!ok) {
    Fail(ErrorKind::kSignMismatch,
         "speed difference and position gap must have the same nonzero sign");
  }
}

}  // namespace internal

// Distance the CF covers at constant speed v_s until it meets a leader moving
// at v0 that starts delta_d ahead of it.
inline double CatchupDistance(double v_s, double v0, double delta_d) {
  internal::RequireCatchupSigns(v_s, v0, delta_d);
  return v_s / (v_s - v0) * delta_d;
}

// Speed-dependent part of the CF's fuel up to any point past the merge:
// (f0(v_s) - fp(v0)) times the catch-up distance.
inline double ResidualFuel(double v_s, double v0, double delta_d, const FuelParams& params) {
  internal::RequireCatchupSigns(v_s, v0, delta_d);
  return (params.f1() * v_s - params.fp1() * v0 + params.delta_f0()) *
         (v_s / (v_s - v0)) * delta_d;
}

// Where the two paths meet, expressed in the follower's arc length, and when
// the leader passes there.
struct PairGeometry {
  double leader_speed = 0.0;      // v0
  double follower_to_meet = 0.0;  // follower start -> F along the follower path
  double leader_to_meet = 0.0;    // leader start -> F along the leader path
  double follower_split_arc = 0.0;  // arc of L on the follower path
  double split_to_follower_end = 0.0;  // L -> follower destination
  double leader_time_at_meet = 0.0;    // t_F
  double leader_time_at_split = 0.0;   // t_L
};

inline PairGeometry MakePairGeometry(const TransportAssignment& leader,
                                     const TransportAssignment& follower,
                                     const PathOverlap& overlap) {
  PairGeometry g;
  g.leader_speed = leader.default_speed();
  g.follower_to_meet = follower.path.cumulative(overlap.first_edge_p1);
  g.leader_to_meet = leader.path.cumulative(overlap.first_edge_p0);
  g.follower_split_arc =
      follower.path.cumulative(overlap.first_edge_p1 + overlap.edge_count);
  g.split_to_follower_end = follower.length() - g.follower_split_arc;
  const double leader_split_arc =
      leader.path.cumulative(overlap.first_edge_p0 + overlap.edge_count);
  g.leader_time_at_meet = leader.start_time + g.leader_to_meet / g.leader_speed;
  g.leader_time_at_split = leader.start_time + leader_split_arc / g.leader_speed;
  return g;
}

struct VirtualGaps {
  double start = 0.0;  // > 0: the CF must speed up to catch the CL
  double end = 0.0;    // > 0: the CF must speed up after the split
};

// Virtual position differences at the start and end of the CF's trip,
// measured against a virtual CL extended along the follower's path.
inline VirtualGaps ComputeVirtualGaps(const TransportAssignment& leader,
                                      const TransportAssignment& follower,
                                      const PathOverlap& overlap, double v0) {
  PairGeometry g = MakePairGeometry(leader, follower, overlap);
  g.leader_speed = v0;
  VirtualGaps gaps;
  gaps.start = g.follower_to_meet - g.leader_to_meet +
               v0 * (follower.start_time - leader.start_time);
  const double t_split =
      leader.start_time +
      leader.path.cumulative(overlap.first_edge_p0 + overlap.edge_count) / v0;
  gaps.end = g.split_to_follower_end - v0 * (follower.arrival_time - t_split);
  return gaps;
}

struct PairwisePlan {
  TruckId leader_id = 0;
  TruckId follower_id = 0;
  double leader_speed = 0.0;  // v0, also the platoon speed
  double v_merge = 0.0;
  double v_split = 0.0;
  double t_merge = 0.0;
  double t_split = 0.0;
  PathPosition merge_pos;  // on the follower's path
  PathPosition split_pos;
  double d_merge = 0.0;  // follower start -> merge point
  double d_tail = 0.0;   // split point -> follower destination
  double delta_d_start = 0.0;
  double delta_d_end = 0.0;
  bool merge_clamped = false;  // merge moved to the first shared node
  bool split_clamped = false;  // split moved to the last shared node
  double fuel_adapted = 0.0;
  double fuel_default = 0.0;

  double saving() const { return fuel_default - fuel_adapted; }
};

// Three-phase profile the plan prescribes; zero-length end phases are dropped.
inline SpeedProfile MaterializeProfile(const PairwisePlan& plan,
                                       const TransportAssignment& follower) {
  SpeedProfile s;
  if (plan.t_merge > follower.start_time) {
    s.phases.push_back({follower.start_time, plan.t_merge, plan.v_merge, false, std::nullopt});
  }
  s.phases.push_back({plan.t_merge, plan.t_split, plan.leader_speed, true, plan.leader_id});
  if (follower.arrival_time > plan.t_split) {
    s.phases.push_back({plan.t_split, follower.arrival_time, plan.v_split, false, std::nullopt});
  }
  return s;
}

namespace internal {

struct PhaseChoice {
  double speed;
  double distance;
  double time;  // merge time for the first phase, split time for the last
  bool clamped;
};

// Rendezvous phase of length >= `min_distance` (distance from the trip end
// to the shared stretch). `boundary_dt` is the time available to reach that
// boundary; `anchor_time` is the boundary crossing time of the leader.
inline std::optional<PhaseChoice> ChoosePhase(double gap, double v0, double min_distance,
                                              double boundary_dt, const FuelParams& params,
                                              const SpeedBand& band) {
  PhaseChoice c{v0, 0.0, 0.0, false};
  if (gap != 0.0) {
    c.speed = OptimalRendezvousSpeed(v0, gap, params, band);
    // A band pinned at v0 on the needed side never closes the gap.
    if (c.speed == v0) return std::nullopt;
    c.distance = CatchupDistance(c.speed, v0, gap);
  }
  if (c.distance < min_distance) {
    if (!(boundary_dt > 0.0)) return std::nullopt;
    c.speed = min_distance / boundary_dt;
    c.distance = min_distance;
    c.clamped = true;
    if (!band.Contains(c.speed)) return std::nullopt;
  }
  return c;
}

}  // namespace internal

// Adapted plan of `follower` (CF) behind `leader` (CL), or nothing when the
// paths share no edge, the plan is infeasible, or it saves no fuel.
// `overlap` must be SharedSubpath(leader.path, follower.path).
inline std::optional<PairwisePlan> AdaptedPlan(const TransportAssignment& leader,
                                               const TransportAssignment& follower,
                                               const std::optional<PathOverlap>& overlap,
                                               const FuelParams& params,
                                               const SpeedBand& band,
                                               double follower_default_fuel) {
  if (!overlap) return std::nullopt;
  const PairGeometry g = MakePairGeometry(leader, follower, *overlap);
  const double v0 = g.leader_speed;
  if (!band.Contains(v0) || !(params.Solo(v0) > params.Follower(v0))) return std::nullopt;

  const VirtualGaps gaps = ComputeVirtualGaps(leader, follower, *overlap, v0);
  const double length = follower.length();

  const auto first = internal::ChoosePhase(gaps.start, v0, g.follower_to_meet,
                                           g.leader_time_at_meet - follower.start_time,
                                           params, band);
  if (!first) return std::nullopt;
  const auto last = internal::ChoosePhase(gaps.end, v0, g.split_to_follower_end,
                                          follower.arrival_time - g.leader_time_at_split,
                                          params, band);
  if (!last) return std::nullopt;

  PairwisePlan plan;
  plan.leader_id = leader.truck_id;
  plan.follower_id = follower.truck_id;
  plan.leader_speed = v0;
  plan.delta_d_start = gaps.start;
  plan.delta_d_end = gaps.end;
  plan.v_merge = first->speed;
  plan.d_merge = first->distance;
  plan.merge_clamped = first->clamped;
  plan.v_split = last->speed;
  plan.d_tail = last->distance;
  plan.split_clamped = last->clamped;

  const double merge_arc = plan.d_merge;
  const double split_arc = length - plan.d_tail;
  // Merge strictly before split, both on the shared stretch.
  if (!(plan.d_merge + plan.d_tail < length)) return std::nullopt;
  if (!(merge_arc < split_arc) || merge_arc > g.follower_split_arc ||
      split_arc < g.follower_to_meet) {
    return std::nullopt;
  }

  if (plan.merge_clamped) {
    plan.t_merge = g.leader_time_at_meet;
  } else if (plan.d_merge == 0.0) {
    plan.t_merge = follower.start_time;
  } else {
    plan.t_merge = follower.start_time + plan.d_merge / plan.v_merge;
  }
  if (plan.split_clamped) {
    plan.t_split = g.leader_time_at_split;
  } else if (plan.d_tail == 0.0) {
    plan.t_split = follower.arrival_time;
  } else {
    plan.t_split = follower.arrival_time - plan.d_tail / plan.v_split;
  }
  if (!(plan.t_merge < plan.t_split)) return std::nullopt;

  plan.merge_pos = PositionAt(follower.path, merge_arc);
  plan.split_pos = PositionAt(follower.path, split_arc);
  plan.fuel_adapted = plan.d_merge * params.Solo(plan.v_merge) +
                      plan.d_tail * params.Solo(plan.v_split) +
                      (length - plan.d_merge - plan.d_tail) * params.Follower(v0);
  plan.fuel_default = follower_default_fuel;
  if (!(plan.fuel_adapted < follower_default_fuel)) return std::nullopt;
  return plan;
}

inline std::optional<PairwisePlan> AdaptedPlan(const TransportAssignment& leader,
                                               const TransportAssignment& follower,
                                               const FuelParams& params,
                                               const SpeedBand& band) {
  return AdaptedPlan(leader, follower, SharedSubpath(leader.path, follower.path), params,
                     band, DefaultFuel(follower, params));
}

}  // namespace platoon
