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

// Real-time service: runs the simulator on its own thread and exchanges
// length-prefixed JSON frames with TCP clients. The first client to connect
// is the leader; later clients only receive state.

#ifndef COTRANSPORT_LIVE_SERVER_HPP_
#define COTRANSPORT_LIVE_SERVER_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "cotransport/scenario.hpp"
#include "cotransport/sim.hpp"

namespace cotransport::live {

struct LiveConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8765;              // 0 picks a free port
  double broadcast_hz = 60.0;   // state frames per second
  double realtime_factor = 1.0; // simulated seconds per wall second
  std::size_t log_limit = 20000;

  void validate() const;
};

struct LiveStats {
  std::int64_t frames_broadcast = 0;
  std::int64_t inputs_applied = 0;
  std::int64_t errors_sent = 0;
  std::int64_t clients = 0;
  long ticks = 0;
};

class LiveServer {
 public:
  /// The scenario's leader drives the object while no leader input is present.
  LiveServer(sim::Scenario scenario, sim::SimConfig config, LiveConfig live);
  ~LiveServer();
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  /// Binds and starts the I/O and simulation threads. Throws Error if the
  /// port cannot be bound.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread or a fault ends the sim.
  void wait();
  int port() const;
  LiveStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// The hold scenario used by `serve`: object parked at x_d, no end time.
sim::Scenario idle_scenario();

}  // namespace cotransport::live

#endif  // COTRANSPORT_LIVE_SERVER_HPP_
