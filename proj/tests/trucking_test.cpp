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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "platoon/trucking.hpp"
#include "test_support.hpp"

namespace platoon {
namespace {

TransportAssignment OnPath(std::vector<Edge> edges, double t0, double t1, TruckId id = 0) {
  TransportAssignment a;
  a.truck_id = id;
  a.path = Path(std::move(edges));
  a.start_node = a.path.start();
  a.dest_node = a.path.destination();
  a.start_time = t0;
  a.arrival_time = t1;
  return a;
}

// Random profile with `phases` phases in the band that covers the path.
SpeedProfile RandomProfile(const TransportAssignment& a, std::size_t phases, Rng& rng) {
  std::vector<double> fractions;
  double total = 0.0;
  for (std::size_t i = 0; i < phases; ++i) {
    fractions.push_back(rng.Uniform(0.2, 1.0));
    total += fractions.back();
  }
  SpeedProfile s;
  double t = a.start_time;
  const double speed_scale = a.length() / a.duration();
  // Distances split by fraction; speeds jittered then rescaled to hit the
  // arrival time exactly on the last phase.
  double remaining_time = a.duration();
  for (std::size_t i = 0; i < phases; ++i) {
    const double dist = a.length() * fractions[i] / total;
    double dt;
    double v;
    if (i + 1 == phases) {
      dt = remaining_time;
      v = dist / dt;
    } else {
      v = speed_scale * rng.Uniform(0.99, 1.01);
      dt = dist / v;
    }
    const double end = i + 1 == phases ? a.arrival_time : t + dt;
    s.phases.push_back({t, end, v, false, std::nullopt});
    remaining_time -= dt;
    t = end;
  }
  return s;
}

TEST(DefaultProfileTest, ConstantSpeedRatio) {
  const auto a = OnPath({Edge{0, 1, 800.0}}, 0.0, 10.0);
  const SpeedProfile s = DefaultProfile(a);
  ASSERT_EQ(s.phases.size(), 1u);
  EXPECT_EQ(s.phases[0].speed, 80.0);
  EXPECT_NO_THROW(ValidateProfile(a, s, SpeedBand{}));
}

TEST(DefaultProfileTest, IntegralEqualsPathLength) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Edge> edges;
    const std::size_t n = 1 + rng.Index(5);
    for (NodeId i = 0; i < n; ++i) edges.push_back({i, i + 1, rng.Uniform(1.0, 300.0)});
    const double t0 = rng.Uniform(0.0, 50.0);
    const auto a0 = OnPath(edges, t0, t0 + 1.0);
    const auto a = OnPath(edges, t0, t0 + a0.length() / rng.Uniform(70.0, 90.0));
    const SpeedProfile s = DefaultProfile(a);
    // Midpoint sum of speed over small time steps.
    const int steps = 10000;
    const double h = a.duration() / steps;
    double integral = 0.0;
    for (int k = 0; k < steps; ++k) integral += s.phases[0].speed * h;
    EXPECT_NEAR(integral, a.length(), 1e-9 * a.length());
    EXPECT_NO_THROW(ValidateAssignment(a, SpeedBand{}));
  }
}

TEST(ValidateAssignmentTest, RejectsOutOfBandAndBadTimes) {
  const auto fast = OnPath({Edge{0, 1, 800.0}}, 0.0, 5.0);
  try {
    ValidateAssignment(fast, SpeedBand{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpeedBoundViolation);
  }
  const auto backwards = OnPath({Edge{0, 1, 800.0}}, 5.0, 5.0);
  EXPECT_THROW(ValidateAssignment(backwards, SpeedBand{}), Error);
}

TEST(TrajectoryTest, JumpTimesOnOneEdge) {
  const auto a = OnPath({Edge{0, 1, 100.0}}, 0.0, 1.25);
  const auto traj = MakeTrajectory(a, DefaultProfile(a), SpeedBand{});
  EXPECT_EQ(traj.jump_times(), (std::vector<double>{0.0, 1.25}));
}

TEST(TrajectoryTest, JumpTimesOnTwoEdges) {
  const auto a = OnPath({Edge{0, 1, 100.0}, Edge{1, 2, 200.0}}, 0.0, 3.75);
  const auto traj = MakeTrajectory(a, DefaultProfile(a), SpeedBand{});
  ASSERT_EQ(traj.jump_times().size(), 3u);
  EXPECT_DOUBLE_EQ(traj.jump_times()[0], 0.0);
  EXPECT_DOUBLE_EQ(traj.jump_times()[1], 1.25);
  EXPECT_DOUBLE_EQ(traj.jump_times()[2], 3.75);
}

TEST(TrajectoryTest, EndsAtEndOfFinalEdge) {
  const auto a = OnPath({Edge{0, 1, 100.0}, Edge{1, 2, 200.0}}, 2.0, 5.75);
  const auto traj = MakeTrajectory(a, DefaultProfile(a), SpeedBand{});
  EXPECT_EQ(traj.PositionAt(5.75), (PathPosition{1, 200.0}));
  EXPECT_EQ(traj.PositionAt(2.0), (PathPosition{0, 0.0}));
}

TEST(TrajectoryTest, RejectsOutOfBandPhase) {
  const auto a = OnPath({Edge{0, 1, 100.0}}, 0.0, 1.0);
  SpeedProfile s{{SpeedPhase{0.0, 1.0, 100.0, false, std::nullopt}}};
  try {
    MakeTrajectory(a, s, SpeedBand{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpeedBoundViolation);
  }
}

TEST(TrajectoryTest, MatchesForwardTimeStepping) {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Edge> edges;
    const std::size_t n = 2 + rng.Index(4);
    for (NodeId i = 0; i < n; ++i) edges.push_back({i, i + 1, rng.Uniform(10.0, 60.0)});
    const auto a0 = OnPath(edges, 0.0, 1.0);
    const auto a = OnPath(edges, 0.0, a0.length() / 80.0);
    const SpeedProfile s = RandomProfile(a, 3, rng);
    const auto traj = MakeTrajectory(a, s, SpeedBand{});

    // Explicit Euler walk: speed lookup by phase, step 1e-4. Phase
    // boundaries are honoured by splitting the step.
    const double h = 1e-4;
    double t = a.start_time;
    double x = 0.0;
    std::size_t phase = 0;
    std::vector<std::pair<double, double>> samples;
    const std::size_t total_steps = static_cast<std::size_t>(a.duration() / h);
    const std::size_t every = std::max<std::size_t>(1, total_steps / 10000);
    for (std::size_t k = 0; t < a.arrival_time - 1e-15; ++k) {
      double step = std::min(h, a.arrival_time - t);
      double moved = 0.0;
      while (step > 0.0) {
        while (phase + 1 < s.phases.size() && t >= s.phases[phase].end) ++phase;
        const double until = std::min(step, s.phases[phase].end - t);
        const double dt = until > 0.0 ? until : step;
        moved += s.phases[phase].speed * dt;
        t += dt;
        step -= dt;
      }
      x += moved;
      if (k % every == 0) samples.emplace_back(t, x);
    }
    double max_error = 0.0;
    for (const auto& [time, arc] : samples) {
      const PathPosition pos = traj.PositionAt(time);
      const double reached = a.path.cumulative(pos.edge_index) + pos.offset;
      max_error = std::max(max_error, std::abs(reached - std::min(arc, a.length())));
    }
    EXPECT_LT(max_error, 1e-6);
    EXPECT_GE(samples.size(), 100u);
  }
}

TEST(FuelConsumptionTest, ReferenceValues) {
  const auto a = OnPath({Edge{0, 1, 800.0}}, 0.0, 10.0);
  const FuelParams params = FuelParams::Reference();
  EXPECT_DOUBLE_EQ(FuelConsumption(DefaultProfile(a), params), 1600.0);
  SpeedProfile follower = DefaultProfile(a);
  follower.phases[0].platoon_follower = true;
  follower.phases[0].platoon_leader = 1;
  EXPECT_DOUBLE_EQ(FuelConsumption(follower, params), 1440.0);
  EXPECT_DOUBLE_EQ(FuelConsumption(follower, params), 0.9 * 1600.0);
}

TEST(FuelConsumptionTest, MatchesMidpointRule) {
  Rng rng(29);
  const FuelParams params = FuelParams::Reference();
  for (int trial = 0; trial < 3; ++trial) {
    const auto a0 = OnPath({Edge{0, 1, rng.Uniform(200.0, 900.0)}}, 0.0, 1.0);
    const auto a = OnPath(a0.path.edges(), 0.0, a0.length() / 80.0);
    SpeedProfile s = RandomProfile(a, 3, rng);
    s.phases[1].platoon_follower = true;
    // Integrate f(v(t)) * v(t) over time.
    const int steps = 1000000;
    const double h = a.duration() / steps;
    long double integral = 0.0L;
    std::size_t phase = 0;
    for (int k = 0; k < steps; ++k) {
      const double t = a.start_time + (k + 0.5) * h;
      while (phase + 1 < s.phases.size() && t >= s.phases[phase].end) ++phase;
      const SpeedPhase& p = s.phases[phase];
      const double f = p.platoon_follower ? params.Follower(p.speed) : params.Solo(p.speed);
      integral += static_cast<long double>(f * p.speed * h);
    }
    const double expected = static_cast<double>(integral);
    const double actual = FuelConsumption(s, params);
    // Midpoint error comes only from the two steps that straddle a phase
    // change, bounded by a step's worth of fuel each.
    const double straddle = 2.0 * h * 90.0 * params.Solo(90.0);
    EXPECT_NEAR(actual, expected, std::max(1e-9 * expected, straddle));
  }
}

TEST(FuelConsumptionTest, ResegmentationDoesNotChangeFuel) {
  Rng rng(31);
  const FuelParams params = FuelParams::Reference();
  for (int trial = 0; trial < 100; ++trial) {
    const auto a0 = OnPath({Edge{0, 1, rng.Uniform(100.0, 900.0)}}, 0.0, 1.0);
    const auto a = OnPath(a0.path.edges(), 0.0, a0.length() / rng.Uniform(75.0, 85.0));
    const SpeedProfile s = RandomProfile(a, 3, rng);
    SpeedProfile split;
    for (const SpeedPhase& p : s.phases) {
      const double mid = p.begin + rng.Uniform(0.1, 0.9) * p.duration();
      split.phases.push_back({p.begin, mid, p.speed, false, std::nullopt});
      split.phases.push_back({mid, p.end, p.speed, false, std::nullopt});
    }
    EXPECT_NEAR(FuelConsumption(split, params), FuelConsumption(s, params),
                1e-12 * FuelConsumption(s, params));
    const auto t1 = MakeTrajectory(a, s, SpeedBand{});
    const auto t2 = MakeTrajectory(a, split, SpeedBand{});
    for (int k = 0; k <= 20; ++k) {
      const double t = a.duration() * k / 20.0;
      EXPECT_NEAR(t1.ArcLengthAt(t), t2.ArcLengthAt(t), 1e-9 * a.length());
    }
  }
}

TEST(FuelParamsTest, RejectsNonSavingFollowerSlope) {
  EXPECT_THROW(FuelParams(0.01, 1.0, 0.02, 0.9), Error);
  EXPECT_THROW(FuelParams(0.01, 1.0, 0.0, 0.9), Error);
  EXPECT_TRUE(FuelParams::Reference().FollowingSavesOn(SpeedBand{}));
}

TEST(AssignmentIoTest, RoundTrip) {
  const RoadNetwork net = testing::LineNetwork({100.0, 200.0, 50.0});
  std::vector<TransportAssignment> trucks = {MakeAssignment(net, 0, 0, 3, 0.0, 4.375),
                                             MakeAssignment(net, 1, 3, 1, 1.0, 4.125)};
  std::stringstream buffer;
  WriteAssignments(buffer, trucks);
  const auto back = ReadAssignments(buffer, net);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].truck_id, trucks[i].truck_id);
    EXPECT_EQ(back[i].start_time, trucks[i].start_time);
    EXPECT_EQ(back[i].arrival_time, trucks[i].arrival_time);
    EXPECT_EQ(back[i].path.edges(), trucks[i].path.edges());
  }
  std::istringstream bad("truck 0 0 0 0 1\n");
  EXPECT_THROW(ReadAssignments(bad, net), Error);
}

}  // namespace
}  // namespace platoon
