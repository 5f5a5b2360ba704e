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

// Scenario descriptions and the scripted leader that stands in for the human.

#ifndef COTRANSPORT_SCENARIO_HPP_
#define COTRANSPORT_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cotransport/types.hpp"

namespace cotransport::sim {

struct HoldLeader {};

struct SinusoidLeader {
  double amplitude = 0.25;  // [m]
  double period = 4.0;      // [s]
  int axis = 0;             // 0 = x, 1 = y (world)
  double ramp_time = 4.0;   // [s] cosine fade-in of the amplitude, 0 = none
};

struct RampLeader {
  double speed = 0.5;       // [m/s] along +x
  double accel_time = 3.0;  // [s] to reach speed
};

/// Polyline through offsets relative to the initial object position.
struct WaypointLeader {
  std::vector<Vec2> points;
  double speed = 0.2;
};

/// Left turn on a half circle starting tangent to +x.
struct SemicircleLeader {
  double radius = 1.5;
  double angular_rate = 0.1;  // [rad/s]
  double ramp_time = 2.0;     // [s] to reach angular_rate
};

using LeaderSpec =
    std::variant<HoldLeader, SinusoidLeader, RampLeader, WaypointLeader, SemicircleLeader>;

struct LeaderModel {
  double kp = 600.0;         // [N/m]
  double kd = 150.0;         // [N s/m]
  double yaw_kp = 30.0;      // [N m/rad]
  double yaw_kd = 10.0;      // [N m s/rad]
  double max_force = 150.0;  // [N]
  double max_moment = 40.0;  // [N m]
  bool feedforward = true;   // add m_b a_ref (and I a_ref) to the servo

  void validate() const;
};

struct Reference {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
  Vec2 acc = Vec2::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double yaw_acc = 0.0;
};

/// Reference motion of the object at time t.
Reference leader_reference(const LeaderSpec& spec, const Vec2& origin, double t);

struct LeaderCommand {
  Vec2 force = Vec2::Zero();
  double moment = 0.0;
};

/// PD servo of the object toward the reference, with feedforward and a
/// force saturation that preserves direction.
LeaderCommand leader_command(const LeaderModel& model, const Reference& ref,
                             const PlanarState& object, double yaw, double yaw_rate, double m_b,
                             double I_bz);

LeaderCommand saturate(const LeaderModel& model, LeaderCommand cmd);

struct Scenario {
  std::string name = "scenario";
  double duration = 30.0;
  std::uint64_t seed = 1;
  int compliance_case = 3;
  LeaderSpec leader = HoldLeader{};
  LeaderModel leader_model;
  /// Initial local-forward robot-to-object distance [m].
  double initial_separation = 0.6;
  /// Std-dev of the object velocity measurement noise [m/s].
  double velocity_noise = 0.0;

  void validate() const;
};

/// Parses the JSON scenario format; unknown keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

/// In-place, periodic x4 cases, straight at three speeds, lateral square,
/// semicircle.
std::vector<Scenario> bundled_suite();

std::string leader_type(const LeaderSpec& spec);

}  // namespace cotransport::sim

#endif  // COTRANSPORT_SCENARIO_HPP_
