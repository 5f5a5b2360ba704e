// Copyright 2026 The cotransport Authors
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

#include <nlohmann/json.hpp>

#include "cotransport/scenario.hpp"

namespace cotransport::sim {
namespace {

using nlohmann::json;

TEST(Scenario, BundledSuiteRoundTrips) {
  const auto suite = bundled_suite();
  ASSERT_EQ(suite.size(), 10u);
  for (const Scenario& s : suite) {
    const std::string text = scenario_to_json(s);
    const Scenario back = parse_scenario(text);
    EXPECT_EQ(scenario_to_json(back), text) << s.name;
  }
}

TEST(Scenario, MissingKeysTakeDefaults) {
  const Scenario s = parse_scenario(R"({"name": "x", "leader": {"type": "ramp", "speed": 0.4}})");
  EXPECT_EQ(s.name, "x");
  EXPECT_EQ(s.compliance_case, 3);
  ASSERT_TRUE(std::holds_alternative<RampLeader>(s.leader));
  EXPECT_DOUBLE_EQ(std::get<RampLeader>(s.leader).speed, 0.4);
  EXPECT_DOUBLE_EQ(std::get<RampLeader>(s.leader).accel_time, 3.0);
}

TEST(Scenario, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_scenario(R"({"name": "x", "durtion": 3})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader": {"type": "hold", "speed": 1}})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader_model": {"kp": 1, "ki": 2}})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader": {"type": "teleport"}})"), InvalidArgument);
}

TEST(Scenario, InvalidValuesAreRejected) {
  EXPECT_THROW(parse_scenario(R"({"duration": -1})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"case": 7})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"duration": "long"})"), InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader": {"type": "sinusoid", "axis": "z"}})"),
               InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader": {"type": "waypoints", "points": []}})"),
               InvalidArgument);
  EXPECT_THROW(parse_scenario(R"({"leader_model": {"max_force": 500}})"), InvalidArgument);
  EXPECT_THROW(parse_scenario("{not json"), InvalidArgument);
}

// Velocity and acceleration of every leader agree with finite differences of
// the position it reports.
TEST(LeaderReference, DerivativesAreConsistent) {
  const Vec2 origin(0.6, 0.0);
  const double h = 1e-5;
  for (const Scenario& s : bundled_suite()) {
    if (std::holds_alternative<WaypointLeader>(s.leader)) continue;  // corners are not smooth
    for (double t = 0.05; t < s.duration; t += 0.173) {
      const Reference a = leader_reference(s.leader, origin, t - h);
      const Reference b = leader_reference(s.leader, origin, t);
      const Reference c = leader_reference(s.leader, origin, t + h);
      const Vec2 v = (c.pos - a.pos) / (2 * h);
      const Vec2 acc = (c.vel - a.vel) / (2 * h);
      EXPECT_LT((v - b.vel).norm(), 1e-6) << s.name << " t=" << t;
      EXPECT_LT((acc - b.acc).norm(), 1e-4) << s.name << " t=" << t;
      EXPECT_NEAR(angle_diff(c.yaw, a.yaw) / (2 * h), b.yaw_rate, 1e-6) << s.name;
    }
  }
}

TEST(LeaderReference, WaypointsAdvanceAtSpeed) {
  const WaypointLeader w{{{0.0, 1.0}, {1.0, 1.0}}, 0.5};
  const Vec2 o(0.6, 0.0);
  EXPECT_LT((leader_reference(w, o, 1.0).pos - (o + Vec2(0.0, 0.5))).norm(), 1e-12);
  EXPECT_LT((leader_reference(w, o, 3.0).pos - (o + Vec2(0.5, 1.0))).norm(), 1e-12);
  EXPECT_LT((leader_reference(w, o, 3.0).vel - Vec2(0.5, 0.0)).norm(), 1e-12);
  EXPECT_LT((leader_reference(w, o, 10.0).pos - (o + Vec2(1.0, 1.0))).norm(), 1e-12);
}

TEST(LeaderReference, SemicircleEndsFacingBack) {
  const SemicircleLeader c;
  const Vec2 o(0.6, 0.0);
  const Reference end = leader_reference(c, o, 1000.0);
  EXPECT_LT((end.pos - (o + Vec2(0.0, 2.0 * c.radius))).norm(), 1e-9);
  EXPECT_NEAR(std::abs(end.yaw), std::numbers::pi, 1e-9);
  EXPECT_EQ(end.vel, Vec2::Zero());
}

TEST(LeaderCommand, SaturationKeepsDirection) {
  LeaderModel m;
  Reference r;
  r.pos = Vec2(3.0, 4.0);
  const LeaderCommand c = leader_command(m, r, PlanarState{}, 0.0, 0.0, 15.0, 0.6);
  EXPECT_NEAR(c.force.norm(), m.max_force, 1e-9);
  EXPECT_NEAR(c.force.x() / c.force.y(), 0.75, 1e-12);
  LeaderCommand big{Vec2::Zero(), 1e3};
  EXPECT_DOUBLE_EQ(saturate(m, big).moment, m.max_moment);
}

TEST(LeaderCommand, FeedforwardAddsInertia) {
  LeaderModel m;
  Reference r;
  r.acc = Vec2(0.2, 0.0);
  r.yaw_acc = 0.5;
  const LeaderCommand c = leader_command(m, r, PlanarState{}, 0.0, 0.0, 15.0, 0.6);
  EXPECT_NEAR(c.force.x(), 3.0, 1e-12);
  EXPECT_NEAR(c.moment, 0.3, 1e-12);
  m.feedforward = false;
  EXPECT_EQ(leader_command(m, r, PlanarState{}, 0.0, 0.0, 15.0, 0.6).force, Vec2::Zero());
}

}  // namespace
}  // namespace cotransport::sim
