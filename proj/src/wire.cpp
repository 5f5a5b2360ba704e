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

#include "cotransport/wire.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace cotransport::wire {

namespace {

using nlohmann::json;

const std::set<std::string> kCommands = {"pause", "resume", "reset", "set-case", "set-param"};

json envelope(const char* type, json payload) {
  return json{{"v", kVersion}, {"type", type}, {"payload", std::move(payload)}};
}

json parse_envelope(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed json: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a json object");
  for (const auto& [key, value] : j.items()) {
    if (key != "v" && key != "type" && key != "payload") {
      throw ProtocolError("unknown envelope key '" + key + "'");
    }
  }
  if (!j.contains("v") || !j.at("v").is_number_integer() || j.at("v").get<int>() != kVersion) {
    throw ProtocolError("unsupported or missing protocol version");
  }
  if (!j.contains("type") || !j.at("type").is_string()) throw ProtocolError("missing type");
  if (!j.contains("payload") || !j.at("payload").is_object()) {
    throw ProtocolError("missing payload object");
  }
  return j;
}

double finite_number(const json& p, const char* key, bool required) {
  if (!p.contains(key)) {
    if (required) throw ProtocolError(std::string("missing field '") + key + "'");
    return 0.0;
  }
  const json& v = p.at(key);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProtocolError(std::string("field '") + key + "' must be finite");
  return d;
}

json pose(const FootPose& f) {
  return {{"x", f.pos.x()}, {"y", f.pos.y()}, {"heading", f.heading}, {"side", to_string(f.side)}};
}

FootPose read_pose(const json& j) {
  FootPose f;
  f.pos = Vec2(j.at("x").get<double>(), j.at("y").get<double>());
  f.heading = j.at("heading").get<double>();
  f.side = j.at("side").get<std::string>() == "L" ? FootSide::Left : FootSide::Right;
  return f;
}

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
Vec2 read_vec(const json& j) { return Vec2(j.at(0).get<double>(), j.at(1).get<double>()); }

}  // namespace

std::string encode_frame(const std::string& body) {
  if (body.size() > kMaxFrame) throw ProtocolError("frame exceeds the size limit");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(body.size() + 4);
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out += body;
  return out;
}

std::optional<std::string> FrameDecoder::next() {
  if (buf_.size() < 4) return std::nullopt;
  const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[i])); };
  const std::uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
  if (n > kMaxFrame) throw ProtocolError("incoming frame exceeds the size limit");
  if (buf_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::string body = buf_.substr(4, n);
  buf_.erase(0, 4 + static_cast<std::size_t>(n));
  return body;
}

std::string message_type(const std::string& body) {
  return parse_envelope(body).at("type").get<std::string>();
}

ClientMessage parse_client_message(const std::string& body) {
  const json j = parse_envelope(body);
  const std::string type = j.at("type").get<std::string>();
  const json& p = j.at("payload");
  if (type == "input") {
    for (const auto& [key, value] : p.items()) {
      if (key != "f_x" && key != "f_y" && key != "m_z" && key != "seq") {
        throw ProtocolError("unknown input field '" + key + "'");
      }
    }
    InputMsg m;
    m.f_x = finite_number(p, "f_x", true);
    m.f_y = finite_number(p, "f_y", true);
    m.m_z = finite_number(p, "m_z", false);
    if (p.contains("seq")) {
      if (!p.at("seq").is_number_integer()) throw ProtocolError("seq must be an integer");
      m.seq = p.at("seq").get<std::int64_t>();
    }
    return m;
  }
  if (type == "cmd") {
    if (!p.contains("name") || !p.at("name").is_string()) throw ProtocolError("cmd needs a name");
    CmdMsg m;
    m.name = p.at("name").get<std::string>();
    if (!kCommands.contains(m.name)) throw ProtocolError("unknown command '" + m.name + "'");
    if (m.name == "set-case") {
      if (!p.contains("case") || !p.at("case").is_number_integer()) {
        throw ProtocolError("set-case needs an integer 'case'");
      }
      m.case_index = p.at("case").get<int>();
      if (m.case_index < 1 || m.case_index > 4) throw ProtocolError("case must be 1..4");
    } else if (m.name == "set-param") {
      if (!p.contains("param") || !p.at("param").is_string()) {
        throw ProtocolError("set-param needs a string 'param'");
      }
      m.param = p.at("param").get<std::string>();
      m.value = finite_number(p, "value", true);
    }
    return m;
  }
  throw ProtocolError("clients may send only input or cmd messages, got '" + type + "'");
}

std::string encode_input(const InputMsg& m) {
  return envelope("input", {{"f_x", m.f_x}, {"f_y", m.f_y}, {"m_z", m.m_z}, {"seq", m.seq}})
      .dump();
}

std::string encode_cmd(const CmdMsg& m) {
  json p = {{"name", m.name}};
  if (m.name == "set-case") p["case"] = m.case_index;
  if (m.name == "set-param") {
    p["param"] = m.param;
    p["value"] = m.value;
  }
  return envelope("cmd", p).dump();
}

std::string encode_error(const std::string& message) {
  return envelope("error", {{"message", message}}).dump();
}

std::string parse_error(const std::string& body) {
  const json j = parse_envelope(body);
  if (j.at("type") != "error") throw ProtocolError("not an error message");
  return j.at("payload").value("message", "");
}

std::string encode_state(const StateFrame& s) {
  json p = {{"seq", s.seq},
            {"t", s.t},
            {"paused", s.paused},
            {"leader", s.leader},
            {"case", s.compliance_case},
            {"pending_case", s.pending_case ? json(*s.pending_case) : json(nullptr)},
            {"input_seq", s.input_seq},
            {"robot", {{"pos", vec(s.robot.pos)}, {"vel", vec(s.robot.vel)}}},
            {"object",
             {{"pos", vec(s.object.pos)}, {"vel", vec(s.object.vel)}, {"yaw", s.object_yaw}}},
            {"stance", pose(s.stance)},
            {"swing_target", pose(s.swing_target)},
            {"swing", json::array({s.swing.x(), s.swing.y(), s.swing.z()})},
            {"F_h", vec(s.F_h)},
            {"F_r", vec(s.F_r)},
            {"M_h_z", s.M_h_z},
            {"K_x_t", s.K_x},
            {"eps", vec(s.eps)},
            {"separation", s.separation},
            {"eta", s.eta ? json(*s.eta) : json(nullptr)}};
  return envelope("state", p).dump();
}

StateFrame parse_state(const std::string& body) {
  const json j = parse_envelope(body);
  if (j.at("type") != "state") throw ProtocolError("not a state message");
  const json& p = j.at("payload");
  StateFrame s;
  try {
    s.seq = p.at("seq").get<std::int64_t>();
    s.t = p.at("t").get<double>();
    s.paused = p.at("paused").get<bool>();
    s.leader = p.at("leader").get<bool>();
    s.compliance_case = p.at("case").get<int>();
    if (!p.at("pending_case").is_null()) s.pending_case = p.at("pending_case").get<int>();
    s.input_seq = p.at("input_seq").get<std::int64_t>();
    s.robot = PlanarState{read_vec(p.at("robot").at("pos")), read_vec(p.at("robot").at("vel"))};
    s.object = PlanarState{read_vec(p.at("object").at("pos")), read_vec(p.at("object").at("vel"))};
    s.object_yaw = p.at("object").at("yaw").get<double>();
    s.stance = read_pose(p.at("stance"));
    s.swing_target = read_pose(p.at("swing_target"));
    const json& sw = p.at("swing");
    s.swing = Vec3(sw.at(0).get<double>(), sw.at(1).get<double>(), sw.at(2).get<double>());
    s.F_h = read_vec(p.at("F_h"));
    s.F_r = read_vec(p.at("F_r"));
    s.M_h_z = p.at("M_h_z").get<double>();
    s.K_x = p.at("K_x_t").get<double>();
    s.eps = read_vec(p.at("eps"));
    s.separation = p.at("separation").get<double>();
    if (!p.at("eta").is_null()) s.eta = p.at("eta").get<double>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad state payload: ") + e.what());
  }
  return s;
}

}  // namespace cotransport::wire
