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

#include "cotransport/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cotransport::sim {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec2 read_vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("expected a [x, y] pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

int read_axis(const json& j) {
  const std::string a = j.get<std::string>();
  if (a == "x") return 0;
  if (a == "y") return 1;
  throw InvalidArgument("sinusoid axis must be \"x\" or \"y\"");
}

LeaderSpec parse_leader(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw InvalidArgument("leader: missing 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "hold") {
    require_keys(j, {"type"}, "leader");
    return HoldLeader{};
  }
  if (type == "sinusoid") {
    require_keys(j, {"type", "amplitude", "period", "axis", "ramp_time"}, "leader");
    SinusoidLeader s;
    read_opt(j, "amplitude", s.amplitude);
    read_opt(j, "period", s.period);
    read_opt(j, "ramp_time", s.ramp_time);
    if (j.contains("axis")) s.axis = read_axis(j.at("axis"));
    return s;
  }
  if (type == "ramp") {
    require_keys(j, {"type", "speed", "accel_time"}, "leader");
    RampLeader r;
    read_opt(j, "speed", r.speed);
    read_opt(j, "accel_time", r.accel_time);
    return r;
  }
  if (type == "waypoints") {
    require_keys(j, {"type", "points", "speed"}, "leader");
    WaypointLeader w;
    read_opt(j, "speed", w.speed);
    if (j.contains("points")) {
      for (const auto& p : j.at("points")) w.points.push_back(read_vec2(p));
    }
    return w;
  }
  if (type == "semicircle") {
    require_keys(j, {"type", "radius", "angular_rate", "ramp_time"}, "leader");
    SemicircleLeader c;
    read_opt(j, "radius", c.radius);
    read_opt(j, "angular_rate", c.angular_rate);
    read_opt(j, "ramp_time", c.ramp_time);
    return c;
  }
  throw InvalidArgument("leader: unknown type '" + type + "'");
}

json leader_to_json(const LeaderSpec& spec) {
  return std::visit(
      [](const auto& l) -> json {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, HoldLeader>) {
          return {{"type", "hold"}};
        } else if constexpr (std::is_same_v<L, SinusoidLeader>) {
          return {{"type", "sinusoid"},
                  {"amplitude", l.amplitude},
                  {"period", l.period},
                  {"axis", l.axis == 0 ? "x" : "y"},
                  {"ramp_time", l.ramp_time}};
        } else if constexpr (std::is_same_v<L, RampLeader>) {
          return {{"type", "ramp"}, {"speed", l.speed}, {"accel_time", l.accel_time}};
        } else if constexpr (std::is_same_v<L, WaypointLeader>) {
          json pts = json::array();
          for (const Vec2& p : l.points) pts.push_back({p.x(), p.y()});
          return {{"type", "waypoints"}, {"points", pts}, {"speed", l.speed}};
        } else {
          return {{"type", "semicircle"},
                  {"radius", l.radius},
                  {"angular_rate", l.angular_rate},
                  {"ramp_time", l.ramp_time}};
        }
      },
      spec);
}

void validate_leader(const LeaderSpec& spec) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, SinusoidLeader>) {
          if (!(std::isfinite(l.amplitude) && l.period > 0.0 && l.ramp_time >= 0.0) ||
              (l.axis != 0 && l.axis != 1)) {
            throw InvalidArgument(
                "sinusoid: need finite amplitude, period > 0, ramp_time >= 0, axis x|y");
          }
        } else if constexpr (std::is_same_v<L, RampLeader>) {
          if (!(std::isfinite(l.speed) && l.accel_time > 0.0)) {
            throw InvalidArgument("ramp: need finite speed and accel_time > 0");
          }
        } else if constexpr (std::is_same_v<L, WaypointLeader>) {
          if (!(l.speed > 0.0) || l.points.empty()) {
            throw InvalidArgument("waypoints: need at least one point and speed > 0");
          }
          for (const Vec2& p : l.points) {
            if (!p.allFinite()) throw InvalidArgument("waypoints: non-finite point");
          }
        } else if constexpr (std::is_same_v<L, SemicircleLeader>) {
          if (!(l.radius > 0.0 && l.angular_rate > 0.0 && l.ramp_time >= 0.0)) {
            throw InvalidArgument("semicircle: need radius > 0, angular_rate > 0, ramp_time >= 0");
          }
        }
      },
      spec);
}

Reference hold_at(const Vec2& p, double yaw = 0.0) {
  Reference r;
  r.pos = p;
  r.yaw = yaw;
  return r;
}

}  // namespace

void LeaderModel::validate() const {
  if (kp < 0.0 || kd < 0.0 || yaw_kp < 0.0 || yaw_kd < 0.0) {
    throw InvalidArgument("leader model: gains must be >= 0");
  }
  if (!(max_force > 0.0 && max_force <= 200.0)) {
    throw InvalidArgument("leader model: force saturation must lie in (0, 200] N");
  }
  if (!(max_moment > 0.0)) throw InvalidArgument("leader model: moment saturation must be > 0");
}

void Scenario::validate() const {
  if (!(duration > 0.0 && std::isfinite(duration))) {
    throw InvalidArgument("scenario: duration must be > 0");
  }
  if (compliance_case < 1 || compliance_case > 4) {
    throw InvalidArgument("scenario: case must be 1..4");
  }
  if (!(initial_separation > 0.0 && std::isfinite(initial_separation))) {
    throw InvalidArgument("scenario: initial_separation must be > 0");
  }
  if (!(velocity_noise >= 0.0)) throw InvalidArgument("scenario: velocity_noise must be >= 0");
  leader_model.validate();
  validate_leader(leader);
}

Reference leader_reference(const LeaderSpec& spec, const Vec2& origin, double t) {
  return std::visit(
      [&](const auto& l) -> Reference {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, HoldLeader>) {
          return hold_at(origin);
        } else if constexpr (std::is_same_v<L, SinusoidLeader>) {
          const double w = 2.0 * std::numbers::pi / l.period;
          // Envelope e(t) rising from 0 to 1 over ramp_time, with derivatives.
          double e = 1.0, de = 0.0, dde = 0.0;
          if (t < l.ramp_time) {
            const double k = std::numbers::pi / l.ramp_time;
            e = 0.5 * (1.0 - std::cos(k * t));
            de = 0.5 * k * std::sin(k * t);
            dde = 0.5 * k * k * std::cos(k * t);
          }
          const double sn = std::sin(w * t), cs = std::cos(w * t);
          Reference r = hold_at(origin);
          r.pos[l.axis] += l.amplitude * e * sn;
          r.vel[l.axis] = l.amplitude * (de * sn + e * w * cs);
          r.acc[l.axis] = l.amplitude * (dde * sn + 2.0 * de * w * cs - e * w * w * sn);
          return r;
        } else if constexpr (std::is_same_v<L, RampLeader>) {
          Reference r = hold_at(origin);
          if (t < l.accel_time) {
            // smoothstep speed profile, acceleration is zero at both ends
            const double x = t / l.accel_time;
            r.pos.x() += l.speed * l.accel_time * (x * x * x - 0.5 * x * x * x * x);
            r.vel.x() = l.speed * x * x * (3.0 - 2.0 * x);
            r.acc.x() = 6.0 * l.speed * x * (1.0 - x) / l.accel_time;
          } else {
            r.pos.x() += l.speed * (t - 0.5 * l.accel_time);
            r.vel.x() = l.speed;
          }
          return r;
        } else if constexpr (std::is_same_v<L, WaypointLeader>) {
          double remaining = l.speed * t;
          Vec2 from = origin;
          for (const Vec2& p : l.points) {
            const Vec2 to = origin + p;
            const double len = (to - from).norm();
            if (remaining < len) {
              const Vec2 dir = (to - from) / len;
              Reference r = hold_at(from + remaining * dir);
              r.vel = l.speed * dir;
              return r;
            }
            remaining -= len;
            from = to;
          }
          return hold_at(from);
        } else {
          const double w = l.angular_rate;
          const double tr = l.ramp_time;
          double phi, phid, phidd;
          if (t < tr) {
            phi = 0.5 * w * t * t / tr;
            phid = w * t / tr;
            phidd = w / tr;
          } else {
            phi = w * (t - 0.5 * tr);
            phid = w;
            phidd = 0.0;
          }
          if (phi >= std::numbers::pi) {
            phi = std::numbers::pi;
            phid = 0.0;
            phidd = 0.0;
          }
          const Vec2 center = origin + Vec2(0.0, l.radius);
          const Vec2 radial(std::sin(phi), -std::cos(phi));
          const Vec2 tangent(std::cos(phi), std::sin(phi));
          Reference r;
          r.pos = center + l.radius * radial;
          r.vel = l.radius * phid * tangent;
          r.acc = l.radius * phidd * tangent - l.radius * phid * phid * radial;
          r.yaw = normalize_angle(phi);
          r.yaw_rate = phid;
          r.yaw_acc = phidd;
          return r;
        }
      },
      spec);
}

LeaderCommand saturate(const LeaderModel& model, LeaderCommand cmd) {
  const double n = cmd.force.norm();
  if (n > model.max_force) cmd.force *= model.max_force / n;
  cmd.moment = std::clamp(cmd.moment, -model.max_moment, model.max_moment);
  return cmd;
}

LeaderCommand leader_command(const LeaderModel& model, const Reference& ref,
                             const PlanarState& object, double yaw, double yaw_rate, double m_b,
                             double I_bz) {
  LeaderCommand cmd;
  cmd.force = model.kp * (ref.pos - object.pos) + model.kd * (ref.vel - object.vel);
  cmd.moment = model.yaw_kp * angle_diff(ref.yaw, yaw) + model.yaw_kd * (ref.yaw_rate - yaw_rate);
  if (model.feedforward) {
    cmd.force += m_b * ref.acc;
    cmd.moment += I_bz * ref.yaw_acc;
  }
  return saturate(model, cmd);
}

std::string leader_type(const LeaderSpec& spec) {
  return leader_to_json(spec).at("type").get<std::string>();
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  require_keys(j,
               {"name", "duration", "seed", "case", "leader", "leader_model",
                "initial_separation", "velocity_noise"},
               "scenario");
  Scenario s;
  try {
    read_opt(j, "name", s.name);
    read_opt(j, "duration", s.duration);
    read_opt(j, "seed", s.seed);
    read_opt(j, "case", s.compliance_case);
    read_opt(j, "initial_separation", s.initial_separation);
    read_opt(j, "velocity_noise", s.velocity_noise);
    if (j.contains("leader")) s.leader = parse_leader(j.at("leader"));
    if (j.contains("leader_model")) {
      const json& m = j.at("leader_model");
      require_keys(m, {"kp", "kd", "yaw_kp", "yaw_kd", "max_force", "max_moment", "feedforward"},
                   "leader_model");
      read_opt(m, "kp", s.leader_model.kp);
      read_opt(m, "kd", s.leader_model.kd);
      read_opt(m, "yaw_kp", s.leader_model.yaw_kp);
      read_opt(m, "yaw_kd", s.leader_model.yaw_kd);
      read_opt(m, "max_force", s.leader_model.max_force);
      read_opt(m, "max_moment", s.leader_model.max_moment);
      read_opt(m, "feedforward", s.leader_model.feedforward);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  const LeaderModel& m = s.leader_model;
  json j = {{"name", s.name},
            {"duration", s.duration},
            {"seed", s.seed},
            {"case", s.compliance_case},
            {"initial_separation", s.initial_separation},
            {"velocity_noise", s.velocity_noise},
            {"leader", leader_to_json(s.leader)},
            {"leader_model",
             {{"kp", m.kp},
              {"kd", m.kd},
              {"yaw_kp", m.yaw_kp},
              {"yaw_kd", m.yaw_kd},
              {"max_force", m.max_force},
              {"max_moment", m.max_moment},
              {"feedforward", m.feedforward}}}};
  return j.dump(2);
}

std::vector<Scenario> bundled_suite() {
  std::vector<Scenario> out;

  Scenario in_place;
  in_place.name = "in_place";
  in_place.duration = 40.0;
  in_place.initial_separation = 0.8;
  out.push_back(in_place);

  for (int c = 1; c <= 4; ++c) {
    Scenario p;
    p.name = "periodic_case" + std::to_string(c);
    p.duration = 40.0;
    p.compliance_case = c;
    p.leader = SinusoidLeader{};
    out.push_back(p);
  }

  for (double v : {0.3, 0.5, 0.7}) {
    Scenario s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "straight_%.1f", v);
    s.name = buf;
    s.duration = 20.0;
    s.leader = RampLeader{v, 3.0};
    out.push_back(s);
  }

  Scenario square;
  square.name = "lateral_square";
  square.duration = 30.0;
  square.leader = WaypointLeader{{{0.0, 0.8}, {0.8, 0.8}, {0.8, 0.0}, {0.0, 0.0}}, 0.15};
  out.push_back(square);

  Scenario semi;
  semi.name = "semicircle";
  semi.duration = 40.0;
  semi.leader = SemicircleLeader{};
  out.push_back(semi);
  return out;
}

}  // namespace cotransport::sim
