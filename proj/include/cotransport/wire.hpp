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

// Wire protocol of the live service: 4-byte big-endian length prefix, then a
// UTF-8 JSON object {"v": 1, "type": "state"|"input"|"cmd"|"error", "payload": {...}}.

#ifndef COTRANSPORT_WIRE_HPP_
#define COTRANSPORT_WIRE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "cotransport/types.hpp"

namespace cotransport::wire {

inline constexpr int kVersion = 1;
inline constexpr std::size_t kMaxFrame = 1u << 20;

class ProtocolError : public Error {
 public:
  using Error::Error;
};

std::string encode_frame(const std::string& body);

/// Incremental frame splitter for a byte stream.
class FrameDecoder {
 public:
  void feed(const char* data, std::size_t n) { buf_.append(data, n); }
  /// Next complete body, if any. Throws ProtocolError on an oversized frame.
  std::optional<std::string> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  std::string buf_;
};

/// Leader force on the object; replaces the scripted leader.
struct InputMsg {
  double f_x = 0.0;
  double f_y = 0.0;
  double m_z = 0.0;
  std::int64_t seq = 0;  // echoed back in state frames as input_seq
};

/// name: pause | resume | reset | set-case | set-param
struct CmdMsg {
  std::string name;
  int case_index = 0;     // set-case
  std::string param;      // set-param
  double value = 0.0;     // set-param
};

using ClientMessage = std::variant<InputMsg, CmdMsg>;

struct StateFrame {
  std::int64_t seq = 0;
  double t = 0.0;
  bool paused = false;
  bool leader = false;  // true in frames sent to the leader connection
  int compliance_case = 3;
  std::optional<int> pending_case;
  std::int64_t input_seq = 0;
  PlanarState robot;
  PlanarState object;
  double object_yaw = 0.0;
  FootPose stance;
  FootPose swing_target;
  Vec3 swing = Vec3::Zero();
  Vec2 F_h = Vec2::Zero();
  Vec2 F_r = Vec2::Zero();
  double M_h_z = 0.0;
  double K_x = 0.0;
  Vec2 eps = Vec2::Zero();
  double separation = 0.0;
  std::optional<double> eta;  // most recent full window
};

/// Parses and validates an input or cmd message. Throws ProtocolError.
ClientMessage parse_client_message(const std::string& body);

std::string encode_input(const InputMsg& m);
std::string encode_cmd(const CmdMsg& m);
std::string encode_state(const StateFrame& s);
std::string encode_error(const std::string& message);

/// Type field of any well-formed message. Throws ProtocolError.
std::string message_type(const std::string& body);
StateFrame parse_state(const std::string& body);
std::string parse_error(const std::string& body);

}  // namespace cotransport::wire

#endif  // COTRANSPORT_WIRE_HPP_
