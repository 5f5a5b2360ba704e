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

#include "cotransport/live_server.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "cotransport/metrics.hpp"
#include "cotransport/wire.hpp"

namespace cotransport::live {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kMaxPending = 4u << 20;

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

struct Inbound {
  enum class Kind { Message, LeaderGone } kind = Kind::Message;
  int client = 0;
  wire::ClientMessage msg;
};

struct Outbound {
  int client = -1;  // -1 = broadcast state
  std::string leader_frame;
  std::string other_frame;
};

struct Client {
  int fd = -1;
  wire::FrameDecoder decoder;
  std::string pending;
  bool closing = false;
};

}  // namespace

void LiveConfig::validate() const {
  if (port < 0 || port > 65535) throw InvalidArgument("live: port out of range");
  if (!(broadcast_hz >= 1.0 && broadcast_hz <= 1000.0)) {
    throw InvalidArgument("live: broadcast_hz must lie in [1, 1000]");
  }
  if (!(realtime_factor > 0.0)) throw InvalidArgument("live: realtime_factor must be > 0");
}

sim::Scenario idle_scenario() {
  sim::Scenario s;
  s.name = "live";
  s.duration = 1e9;
  s.leader = sim::HoldLeader{};
  return s;
}

struct LiveServer::Impl {
  sim::Scenario scenario;
  sim::SimConfig config;
  LiveConfig live;

  int listen_fd = -1;
  int wake[2] = {-1, -1};
  int bound_port = 0;
  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};

  std::mutex in_mu;
  std::deque<Inbound> inbound;
  std::mutex out_mu;
  std::deque<Outbound> outbound;

  std::mutex done_mu;
  std::condition_variable done_cv;
  bool finished = false;

  std::atomic<std::int64_t> frames{0}, inputs{0}, errors{0}, clients{0};
  std::atomic<long> ticks{0};

  void poke() {
    const char c = 1;
    [[maybe_unused]] const ssize_t n = ::write(wake[1], &c, 1);
  }

  void send_to(int client, std::string body) {
    {
      std::lock_guard lk(out_mu);
      outbound.push_back(Outbound{client, wire::encode_frame(body), {}});
    }
    poke();
  }

  void io_loop();
  void sim_loop();
};

void LiveServer::Impl::io_loop() {
  std::map<int, Client> conns;
  int next_id = 1;
  int leader = 0;

  const auto queue_error = [&](Client& c, const std::string& what) {
    c.pending += wire::encode_frame(wire::encode_error(what));
    ++errors;
  };

  while (running.load()) {
    std::vector<pollfd> fds;
    std::vector<int> ids;
    fds.push_back({listen_fd, POLLIN, 0});
    fds.push_back({wake[0], POLLIN, 0});
    for (auto& [id, c] : conns) {
      short ev = POLLIN;
      if (!c.pending.empty()) ev |= POLLOUT;
      fds.push_back({c.fd, ev, 0});
      ids.push_back(id);
    }
    const int rc = ::poll(fds.data(), fds.size(), 100);
    if (rc < 0 && errno != EINTR) break;

    if (fds[1].revents & POLLIN) {
      char buf[256];
      while (::read(wake[0], buf, sizeof buf) > 0) {
      }
    }
    if (fds[0].revents & POLLIN) {
      for (;;) {
        const int fd = ::accept(listen_fd, nullptr, nullptr);
        if (fd < 0) break;
        set_nonblocking(fd);
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        const int id = next_id++;
        conns[id].fd = fd;
        if (leader == 0) leader = id;
        ++clients;
      }
    }

    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto it = conns.find(ids[k]);
      Client& c = it->second;
      const short re = fds[k + 2].revents;
      if (re & POLLIN) {
        char buf[4096];
        for (;;) {
          const ssize_t n = ::recv(c.fd, buf, sizeof buf, 0);
          if (n > 0) {
            c.decoder.feed(buf, static_cast<std::size_t>(n));
            continue;
          }
          if (n == 0 || (errno != EAGAIN && errno != EWOULDBLOCK)) c.closing = true;
          break;
        }
        try {
          while (auto body = c.decoder.next()) {
            try {
              wire::ClientMessage msg = wire::parse_client_message(*body);
              if (ids[k] != leader) {
                queue_error(c, "read-only connection: another client is the leader");
                continue;
              }
              std::lock_guard lk(in_mu);
              inbound.push_back(Inbound{Inbound::Kind::Message, ids[k], std::move(msg)});
            } catch (const wire::ProtocolError& e) {
              queue_error(c, e.what());
            }
          }
        } catch (const wire::ProtocolError& e) {
          queue_error(c, e.what());
          c.closing = true;
        }
      }
      if (re & (POLLERR | POLLHUP)) c.closing = true;
    }

    {
      std::deque<Outbound> batch;
      {
        std::lock_guard lk(out_mu);
        batch.swap(outbound);
      }
      for (Outbound& o : batch) {
        if (o.client >= 0) {
          auto it = conns.find(o.client);
          if (it != conns.end()) it->second.pending += o.leader_frame;
          continue;
        }
        for (auto& [id, c] : conns) {
          if (c.pending.size() > kMaxPending) continue;  // slow reader: drop
          c.pending += id == leader ? o.leader_frame : o.other_frame;
        }
      }
    }

    for (auto it = conns.begin(); it != conns.end();) {
      Client& c = it->second;
      while (!c.pending.empty()) {
        const ssize_t n = ::send(c.fd, c.pending.data(), c.pending.size(), MSG_NOSIGNAL);
        if (n > 0) {
          c.pending.erase(0, static_cast<std::size_t>(n));
          continue;
        }
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) c.closing = true;
        break;
      }
      if (c.closing) {
        ::close(c.fd);
        if (it->first == leader) {
          leader = 0;
          std::lock_guard lk(in_mu);
          inbound.push_back(Inbound{Inbound::Kind::LeaderGone, it->first, {}});
        }
        --clients;
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& [id, c] : conns) ::close(c.fd);
}

void LiveServer::Impl::sim_loop() {
  sim::Simulator sim(scenario, config);
  sim.set_log_limit(live.log_limit);
  const double dt = config.gait.dt;
  const auto broadcast_period = std::chrono::duration<double>(1.0 / live.broadcast_hz);
  bool paused = false;
  std::int64_t input_seq = 0;
  std::int64_t seq = 0;

  Clock::time_point base = Clock::now();
  long base_tick = 0;
  Clock::time_point next_broadcast = base;

  const auto rebase = [&] {
    base = Clock::now();
    base_tick = sim.tick();
  };

  while (running.load()) {
    std::deque<Inbound> batch;
    {
      std::lock_guard lk(in_mu);
      batch.swap(inbound);
    }
    for (Inbound& in : batch) {
      if (in.kind == Inbound::Kind::LeaderGone) {
        sim.set_live_input(std::nullopt);
        continue;
      }
      if (const auto* m = std::get_if<wire::InputMsg>(&in.msg)) {
        sim.set_live_input(sim::LiveInput{Vec2(m->f_x, m->f_y), m->m_z});
        input_seq = m->seq;
        ++inputs;
        continue;
      }
      const auto& cmd = std::get<wire::CmdMsg>(in.msg);
      try {
        if (cmd.name == "pause") {
          paused = true;
        } else if (cmd.name == "resume") {
          paused = false;
          rebase();
        } else if (cmd.name == "reset") {
          sim.reset();
          rebase();
        } else if (cmd.name == "set-case") {
          sim.request_case(cmd.case_index);
        } else if (cmd.name == "set-param") {
          sim.set_param(cmd.param, cmd.value);
        }
      } catch (const Error& e) {
        ++errors;
        send_to(in.client, wire::encode_error(e.what()));
      }
    }

    const Clock::time_point now = Clock::now();
    if (paused) {
      rebase();
    } else {
      const double elapsed = std::chrono::duration<double>(now - base).count();
      long target = base_tick + static_cast<long>(elapsed * live.realtime_factor / dt);
      if (target - sim.tick() > static_cast<long>(0.2 / dt)) {
        // Too far behind wall time: drop the backlog rather than stall.
        rebase();
        target = sim.tick() + 1;
      }
      while (sim.tick() < target && running.load()) {
        try {
          sim.step();
        } catch (const sim::SimFault& e) {
          ++errors;
          {
            std::lock_guard lk(out_mu);
            const std::string f = wire::encode_frame(wire::encode_error(e.what()));
            outbound.push_back(Outbound{-1, f, f});
          }
          sim.reset();
          rebase();
          break;
        }
      }
      ticks = sim.tick();
    }

    if (now >= next_broadcast) {
      next_broadcast += std::chrono::duration_cast<Clock::duration>(broadcast_period);
      if (next_broadcast < now) next_broadcast = now;
      wire::StateFrame s;
      s.seq = ++seq;
      s.t = sim.time();
      s.paused = paused;
      s.compliance_case = sim.active_case();
      s.pending_case = sim.pending_case();
      s.input_seq = input_seq;
      s.robot = sim.robot();
      s.object = sim.object();
      s.object_yaw = sim.object_yaw();
      s.stance = sim.stance();
      s.swing_target = sim.swing_target();
      s.separation = sim.separation();
      s.K_x = sim.params().K_t.x();
      const auto& ticks_log = sim.log().ticks;
      if (!ticks_log.empty()) {
        const sim::TickRecord& r = ticks_log.back();
        s.swing = r.swing;
        s.F_h = r.F_h;
        s.F_r = r.F_r;
        s.M_h_z = r.M_h_z;
        s.eps = r.eps;
        const double w = config.window.w;
        if (r.t - ticks_log.front().t >= w) {
          const auto first = std::lower_bound(
              ticks_log.begin(), ticks_log.end(), r.t - w,
              [](const sim::TickRecord& a, double t) { return a.t < t; });
          std::vector<metrics::ForceSample> samples;
          samples.reserve(static_cast<std::size_t>(ticks_log.end() - first));
          for (auto it = first; it != ticks_log.end(); ++it) {
            samples.push_back({it->t, it->F_h, it->F_r, it->object.vel});
          }
          if (samples.size() >= 2 && samples.back().t - samples.front().t >= w - 1e-9) {
            // One window spanning the buffer.
            const double span = samples.back().t - samples.front().t;
            const auto pts =
                metrics::efficiency(samples, metrics::EffortWindow{span, 0.5 * span});
            if (!pts.empty()) s.eta = pts.back().eta;
          }
        }
      }
      std::string other = wire::encode_frame(wire::encode_state(s));
      s.leader = true;
      std::string lead = wire::encode_frame(wire::encode_state(s));
      {
        std::lock_guard lk(out_mu);
        outbound.push_back(Outbound{-1, std::move(lead), std::move(other)});
      }
      ++frames;
      poke();
    }

    const auto next_tick = base + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(
                                          (sim.tick() + 1 - base_tick) * dt /
                                          live.realtime_factor));
    const auto wake_at = std::min(next_tick, next_broadcast);
    const auto cap = Clock::now() + std::chrono::milliseconds(2);
    std::this_thread::sleep_until(std::min(wake_at, cap));
  }
}

LiveServer::LiveServer(sim::Scenario scenario, sim::SimConfig config, LiveConfig live)
    : impl_(std::make_unique<Impl>()) {
  scenario.validate();
  config.validate();
  live.validate();
  impl_->scenario = std::move(scenario);
  impl_->config = std::move(config);
  impl_->live = std::move(live);
}

LiveServer::~LiveServer() { stop(); }

void LiveServer::start() {
  Impl& m = *impl_;
  if (m.running.load()) return;
  m.listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (m.listen_fd < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  setsockopt(m.listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(m.live.port));
  if (inet_pton(AF_INET, m.live.bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(m.listen_fd);
    throw InvalidArgument("live: bad bind address " + m.live.bind_address);
  }
  if (::bind(m.listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(m.listen_fd, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(m.listen_fd);
    throw Error("live: cannot listen on port " + std::to_string(m.live.port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  getsockname(m.listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
  m.bound_port = ntohs(addr.sin_port);
  set_nonblocking(m.listen_fd);
  if (::pipe(m.wake) != 0) throw Error("live: pipe failed");
  set_nonblocking(m.wake[0]);
  set_nonblocking(m.wake[1]);
  {
    std::lock_guard lk(m.done_mu);
    m.finished = false;
  }
  m.running = true;
  m.io_thread = std::thread([&m] { m.io_loop(); });
  m.sim_thread = std::thread([&m] { m.sim_loop(); });
}

void LiveServer::stop() {
  Impl& m = *impl_;
  if (!m.running.exchange(false)) return;
  m.poke();
  if (m.sim_thread.joinable()) m.sim_thread.join();
  if (m.io_thread.joinable()) m.io_thread.join();
  ::close(m.listen_fd);
  ::close(m.wake[0]);
  ::close(m.wake[1]);
  m.listen_fd = m.wake[0] = m.wake[1] = -1;
  {
    std::lock_guard lk(m.done_mu);
    m.finished = true;
  }
  m.done_cv.notify_all();
}

void LiveServer::wait() {
  std::unique_lock lk(impl_->done_mu);
  impl_->done_cv.wait(lk, [&] { return impl_->finished; });
}

int LiveServer::port() const { return impl_->bound_port; }

LiveStats LiveServer::stats() const {
  const Impl& m = *impl_;
  return LiveStats{m.frames.load(), m.inputs.load(), m.errors.load(), m.clients.load(),
                   m.ticks.load()};
}

}  // namespace cotransport::live
