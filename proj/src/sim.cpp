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

#include "cotransport/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cotransport/admittance.hpp"
#include "cotransport/ilip.hpp"

namespace cotransport::sim {

void SimConfig::validate() const {
  gait.validate();
  params.validate();
  mpc.validate();
  wbc_weights.validate();
  modulation.validate();
  window.validate();
  if (!(load_share >= 0.0 && load_share <= 1.0)) {
    throw InvalidArgument("sim: load_share must lie in [0, 1]");
  }
  if (!(stance_half_width > 0.0)) throw InvalidArgument("sim: stance_half_width must be > 0");
}

Simulator::Simulator(Scenario scenario, SimConfig config)
    : scenario_(std::move(scenario)),
      config_(std::move(config)),
      planner_(config_.mpc, config_.gait),
      wbc_(config_.wbc_weights, config_.wbc_bounds) {
  scenario_.validate();
  config_.validate();
  reset();
}

void Simulator::reset() {
  params_ = config_.params;
  active_case_ = scenario_.compliance_case;
  apply_case(params_, active_case_);
  pending_case_.reset();
  live_.reset();
  planner_.reset();
  wbc_.reset();
  rng_.seed(scenario_.seed);
  noise_.reset();

  tick_ = 0;
  total_ticks_ = std::lround(scenario_.duration / config_.gait.dt);
  ticks_in_step_ = 0;
  origin_ = Vec2(scenario_.initial_separation, 0.0);
  // Start on the periodic in-place orbit: CoM midway between the feet, moving
  // toward the stance foot fast enough to return to the midline at strike.
  robot_ = PlanarState{};
  {
    const double wT = config_.gait.omega0() * config_.gait.T;
    robot_.vel.y() =
        -config_.gait.omega0() * config_.stance_half_width * std::tanh(0.5 * wT);
  }
  object_ = PlanarState{origin_, Vec2::Zero()};
  object_yaw_ = 0.0;
  object_yawrate_ = 0.0;
  stance_ = FootPose{Vec2(0.0, -config_.stance_half_width), 0.0, FootSide::Right};
  swing_start_ = Vec3(0.0, config_.stance_half_width, 0.0);
  heading_rate_ = 0.0;
  intent_ = IntentEstimate{};

  log_ = SimLog{};
  log_.scenario = scenario_.name;
  log_.compliance_case = scenario_.compliance_case;
  log_.seed = scenario_.seed;
  log_.dt = config_.gait.dt;
  replan();
}

void Simulator::set_state(const PlanarState& robot, const PlanarState& object, double object_yaw) {
  robot_ = robot;
  object_ = object;
  object_yaw_ = object_yaw;
  object_yawrate_ = 0.0;
}

void Simulator::set_live_input(std::optional<LiveInput> input) { live_ = input; }

void Simulator::request_case(int index) {
  compliance_case(index);  // validates
  pending_case_ = index;
}

void Simulator::set_param(const std::string& name, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("parameter value must be finite");
  SimConfig next = config_;
  if (name == "x_d") {
    next.params.x_d.x() = value;
  } else if (name == "k_x1") {
    next.modulation.k_x1 = value;
  } else if (name == "b_x1") {
    next.modulation.b_x1 = value;
  } else if (name == "K_min") {
    next.modulation.K_min = value;
  } else if (name == "K_max") {
    next.modulation.K_max = value;
  } else if (name == "load_share") {
    next.load_share = value;
  } else {
    throw InvalidArgument("unknown parameter '" + name + "'");
  }
  next.validate();
  config_ = next;
  params_.x_d.x() = config_.params.x_d.x();
}

double Simulator::separation() const {
  return rotate_to_local(object_.pos - robot_.pos, stance_.heading).x();
}

void Simulator::replan() {
  const GaitConfig& cfg = config_.gait;
  const ilip::IlipStepInput in{robot_,    object_.pos, intent_.v_b_d,
                               stance_,   params_.K_t, params_.B,
                               cfg.T};
  const PlanarState X = ilip::ilip_step_map(in, params_.x_d, params_.m_c, cfg);
  const PlanarState obj = ilip::object_step_map(object_, intent_.v_b_d, cfg.T);
  const admittance::GoalSet goals = admittance::build_goal_set(
      X, obj, intent_, stance_.heading, params_, cfg, heading_rate_);
  const mpc::FootPlan plan = planner_.plan(X, obj, intent_.v_b_d, goals, stance_, params_);
  swing_target_ = plan.steps.front();
  heading_rate_ = goals.heading_rates.front();
  const double t = time();
  for (std::size_t j = 0; j < plan.steps.size(); ++j) {
    log_.plans.push_back(PlanRecord{t, tick_, static_cast<int>(j), plan.steps[j],
                                    plan.predicted_com[j]});
  }
}

const TickRecord& Simulator::step() {
  const GaitConfig& cfg = config_.gait;
  const double dt = cfg.dt;
  const double t = time();
  const double I_bz = config_.wbc_bounds.I_bz;
  try {
    // (1) leader
    const Reference ref = leader_reference(scenario_.leader, origin_, t);
    const LeaderCommand cmd =
        live_ ? saturate(scenario_.leader_model, LeaderCommand{live_->force, live_->moment})
              : leader_command(scenario_.leader_model, ref, object_, object_yaw_,
                               object_yawrate_, params_.m_b, I_bz);

    // (2) intent
    Vec2 measured = object_.vel;
    if (scenario_.velocity_noise > 0.0) {
      measured += scenario_.velocity_noise * Vec2(noise_(rng_), noise_(rng_));
    }
    intent_ = ilip::update_intent(intent_, measured, object_yaw_);

    // (3)-(4) desired accelerations and the interaction QP
    wbc::InteractionInput in;
    in.robot = robot_;
    in.object = object_;
    in.object_yaw = object_yaw_;
    in.object_yawrate = object_yawrate_;
    in.stance = stance_;
    in.F_h = cmd.force;
    in.M_h_z = cmd.moment;
    in.desired = admittance::desired_accels(robot_, object_, object_yaw_, object_yawrate_,
                                            stance_.heading, cmd.force, params_);
    const wbc::WbcOutput out = wbc_.solve(in, params_, cfg);

    // (5) semi-implicit Euler
    robot_.vel += dt * out.robot_accel;
    robot_.pos += dt * robot_.vel;
    object_.vel += dt * out.object_accel;
    object_.pos += dt * object_.vel;
    object_yawrate_ += dt * out.object_yaw_accel;
    object_yaw_ = normalize_angle(object_yaw_ + dt * object_yawrate_);
    if (!robot_.finite() || !object_.finite() || !std::isfinite(object_yaw_)) {
      throw ilip::NonFiniteResult("plant state became non-finite");
    }

    // (6) stiffness
    params_.K_t.x() = stiffness::update_stiffness(params_.K_t.x(), robot_, object_,
                                                  stance_.heading, params_.x_d.x(),
                                                  config_.modulation);

    // (7) phase
    ++ticks_in_step_;
    ++tick_;
    const wbc::Phase ph = wbc::advance_phase(ticks_in_step_ * dt, cfg.T);
    Vec3 swing = wbc::swing_foot_position(swing_start_, swing_target_, ph.s, cfg.z_cl);
    if (ph.strike) {
      swing_start_ = Vec3(stance_.pos.x(), stance_.pos.y(), 0.0);
      stance_ = swing_target_;
      ticks_in_step_ = 0;
      if (pending_case_) {
        const Vec2 K_t = params_.K_t;
        active_case_ = *pending_case_;
        apply_case(params_, active_case_);
        params_.K_t = K_t;
        pending_case_.reset();
      }
      replan();
      swing = swing_start_;
    }

    // (8) record
    TickRecord r;
    r.t = time();
    r.robot = robot_;
    r.object = object_;
    r.object_yaw = object_yaw_;
    r.object_yawrate = object_yawrate_;
    r.stance = stance_;
    r.swing = swing;
    r.F_h = cmd.force;
    r.M_h_z = cmd.moment;
    r.F_r = -out.wrench.f_xy;
    const auto [fz_r, fz_h] = wbc::vertical_load_share(params_.m_b, cfg.g, config_.load_share);
    r.f_z_robot = fz_r;
    r.f_z_human = fz_h;
    r.K_x = params_.K_t.x();
    r.eps = metrics::modified_capture_point_offset(robot_, stance_, out.wrench.f_xy,
                                                   params_.m_c, cfg.omega0());
    r.ref_pos = ref.pos;
    r.ref_yaw = ref.yaw;
    log_.ticks.push_back(r);
    if (log_limit_ > 0 && log_.ticks.size() > 2 * log_limit_) {
      log_.ticks.erase(log_.ticks.begin(), log_.ticks.end() - static_cast<long>(log_limit_));
    }
    return log_.ticks.back();
  } catch (const SimFault&) {
    throw;
  } catch (const Error& e) {
    throw SimFault(tick_, e.what());
  }
}

void Simulator::run() {
  while (!done()) step();
}

std::vector<metrics::ForceSample> force_samples(const SimLog& log) {
  std::vector<metrics::ForceSample> out;
  out.reserve(log.ticks.size());
  for (const TickRecord& r : log.ticks) {
    out.push_back(metrics::ForceSample{r.t, r.F_h, r.F_r, r.object.vel});
  }
  return out;
}

namespace {

double local_separation_error(const TickRecord& r, double x_d) {
  return rotate_to_local(r.object.pos - r.robot.pos, r.stance.heading).x() - x_d;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

}  // namespace

RunSummary summarize(const SimLog& log, const Scenario& scenario, const SimConfig& config,
                     const std::vector<metrics::EfficiencyPoint>& eta,
                     const std::vector<metrics::EfficiencyPoint>& eta_forward) {
  RunSummary s;
  s.scenario = log.scenario;
  s.compliance_case = log.compliance_case;
  s.seed = log.seed;
  s.ticks = static_cast<long>(log.ticks.size());
  s.duration = log.ticks.empty() ? 0.0 : log.ticks.back().t;
  s.fault = log.fault;
  s.planner_faults = log.fault ? 1 : 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.eta_mean = eta.empty() ? nan : metrics::mean_efficiency(eta);
  s.eta_mean_forward = eta_forward.empty() ? nan : metrics::mean_efficiency(eta_forward);

  const double x_d = config.params.x_d.x();
  long last_out = -1;
  double sq = 0.0;
  int n_path = 0;

  // Reference path as a polyline sampled every 50 ms over the scenario.
  std::vector<Vec2> path;
  const Vec2 origin(scenario.initial_separation, 0.0);
  for (double t = 0.0; t <= scenario.duration + 1e-9; t += 0.05) {
    path.push_back(leader_reference(scenario.leader, origin, t).pos);
  }
  const long stride = std::max(1L, std::lround(0.01 / log.dt));

  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    const TickRecord& r = log.ticks[i];
    s.max_abs_eps_x = std::max(s.max_abs_eps_x, std::abs(r.eps.x()));
    s.max_abs_eps_y = std::max(s.max_abs_eps_y, std::abs(r.eps.y()));
    if (std::abs(local_separation_error(r, x_d)) >= kSettlingBand) last_out = static_cast<long>(i);
    if (r.t >= 5.0) {
      s.max_heading_error_after_5s = std::max(s.max_heading_error_after_5s,
                                              std::abs(angle_diff(r.stance.heading, r.object_yaw)));
    }
    if (static_cast<long>(i) % stride == 0) {
      double d = std::numeric_limits<double>::infinity();
      if (path.size() == 1) d = (r.object.pos - path[0]).norm();
      for (std::size_t k = 1; k < path.size(); ++k) {
        d = std::min(d, point_segment_distance(r.object.pos, path[k - 1], path[k]));
      }
      sq += d * d;
      ++n_path;
    }
  }
  if (!log.ticks.empty()) {
    s.final_separation = local_separation_error(log.ticks.back(), x_d) + x_d;
    if (last_out + 1 < static_cast<long>(log.ticks.size())) {
      s.settling_time = last_out < 0 ? 0.0 : log.ticks[static_cast<std::size_t>(last_out)].t;
    }
  }
  s.path_rms_error = n_path > 0 ? std::sqrt(sq / n_path) : 0.0;
  return s;
}

RunResult run_scenario(const Scenario& scenario, const SimConfig& config) {
  Simulator sim(scenario, config);
  try {
    sim.run();
  } catch (const SimFault& e) {
    sim.mutable_log().fault = e.what();
  }
  RunResult res;
  res.log = std::move(sim.mutable_log());
  const std::vector<metrics::ForceSample> samples = force_samples(res.log);
  const double span = samples.size() > 1 ? samples.back().t - samples.front().t : 0.0;
  if (span >= config.window.w) {
    res.eta = metrics::efficiency(samples, config.window);
    std::vector<double> headings;
    headings.reserve(res.log.ticks.size());
    for (const TickRecord& r : res.log.ticks) headings.push_back(r.stance.heading);
    const auto fwd = metrics::forward_projection(samples, headings);
    res.eta_forward = metrics::efficiency(fwd, config.window);
  }
  res.summary = summarize(res.log, scenario, config, res.eta, res.eta_forward);
  return res;
}

std::vector<RunResult> run_suite(const std::vector<Scenario>& scenarios, const SimConfig& config) {
  std::vector<RunResult> out;
  out.reserve(scenarios.size());
  for (const Scenario& s : scenarios) out.push_back(run_scenario(s, config));
  return out;
}

std::vector<RunResult> run_suite_parallel(const std::vector<Scenario>& scenarios,
                                          const SimConfig& config) {
  std::vector<RunResult> out(scenarios.size());
  const long n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run_scenario(scenarios[static_cast<std::size_t>(i)], config);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

const char* const kTickCsvHeader =
    "t,robot_x,robot_y,robot_vx,robot_vy,object_x,object_y,object_vx,object_vy,object_yaw,"
    "object_yawrate,stance_x,stance_y,stance_heading,stance_side,swing_x,swing_y,swing_z,"
    "F_h_x,F_h_y,M_h_z,F_r_x,F_r_y,f_z_robot,f_z_human,K_x_t,eps_x,eps_y,ref_x,ref_y,ref_yaw";

const char* const kMetricsCsvHeader = "t,eta,eps_x,eps_y,K_x_t,load_share";

namespace {

constexpr int kTickColumns = 31;

void put(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!line.empty()) line.push_back(',');
  line += buf;
}

std::size_t tick_at(const SimLog& log, double t) {
  if (log.ticks.empty()) throw InvalidArgument("empty log");
  const double t0 = log.ticks.front().t;
  const long i = std::lround((t - t0) / log.dt);
  return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(log.ticks.size()) - 1));
}

}  // namespace

void write_tick_csv(std::ostream& os, const SimLog& log) {
  os << kTickCsvHeader << '\n';
  std::string line;
  for (const TickRecord& r : log.ticks) {
    line.clear();
    for (double v : {r.t, r.robot.pos.x(), r.robot.pos.y(), r.robot.vel.x(), r.robot.vel.y(),
                     r.object.pos.x(), r.object.pos.y(), r.object.vel.x(), r.object.vel.y(),
                     r.object_yaw, r.object_yawrate, r.stance.pos.x(), r.stance.pos.y(),
                     r.stance.heading}) {
      put(line, v);
    }
    line += r.stance.side == FootSide::Left ? ",L" : ",R";
    for (double v : {r.swing.x(), r.swing.y(), r.swing.z(), r.F_h.x(), r.F_h.y(), r.M_h_z,
                     r.F_r.x(), r.F_r.y(), r.f_z_robot, r.f_z_human, r.K_x, r.eps.x(), r.eps.y(),
                     r.ref_pos.x(), r.ref_pos.y(), r.ref_yaw}) {
      put(line, v);
    }
    os << line << '\n';
  }
}

SimLog read_tick_csv(std::istream& is) {
  SimLog log;
  std::string line;
  if (!std::getline(is, line) || line != kTickCsvHeader) {
    throw InvalidArgument("tick csv: missing or unexpected header");
  }
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != kTickColumns) {
      throw InvalidArgument("tick csv: wrong column count on line " + std::to_string(lineno));
    }
    std::vector<double> v(cells.size(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == 14) continue;
      char* end = nullptr;
      v[i] = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0') {
        throw InvalidArgument("tick csv: bad number on line " + std::to_string(lineno));
      }
    }
    TickRecord r;
    r.t = v[0];
    r.robot = PlanarState{Vec2(v[1], v[2]), Vec2(v[3], v[4])};
    r.object = PlanarState{Vec2(v[5], v[6]), Vec2(v[7], v[8])};
    r.object_yaw = v[9];
    r.object_yawrate = v[10];
    r.stance.pos = Vec2(v[11], v[12]);
    r.stance.heading = v[13];
    if (cells[14] == "L") {
      r.stance.side = FootSide::Left;
    } else if (cells[14] == "R") {
      r.stance.side = FootSide::Right;
    } else {
      throw InvalidArgument("tick csv: bad stance side on line " + std::to_string(lineno));
    }
    r.swing = Vec3(v[15], v[16], v[17]);
    r.F_h = Vec2(v[18], v[19]);
    r.M_h_z = v[20];
    r.F_r = Vec2(v[21], v[22]);
    r.f_z_robot = v[23];
    r.f_z_human = v[24];
    r.K_x = v[25];
    r.eps = Vec2(v[26], v[27]);
    r.ref_pos = Vec2(v[28], v[29]);
    r.ref_yaw = v[30];
    log.ticks.push_back(r);
  }
  if (log.ticks.size() >= 2) log.dt = log.ticks[1].t - log.ticks[0].t;
  return log;
}

void write_plans_csv(std::ostream& os, const SimLog& log) {
  os << "t,tick,stage,foot_x,foot_y,foot_heading,foot_side,com_x,com_y,com_vx,com_vy\n";
  std::string line;
  for (const PlanRecord& p : log.plans) {
    line.clear();
    put(line, p.t);
    line += "," + std::to_string(p.tick) + "," + std::to_string(p.stage);
    put(line, p.foot.pos.x());
    put(line, p.foot.pos.y());
    put(line, p.foot.heading);
    line += p.foot.side == FootSide::Left ? ",L" : ",R";
    for (double v : {p.com.pos.x(), p.com.pos.y(), p.com.vel.x(), p.com.vel.y()}) put(line, v);
    os << line << '\n';
  }
}

void write_metrics_csv(std::ostream& os, const SimLog& log,
                       const std::vector<metrics::EfficiencyPoint>& eta) {
  os << kMetricsCsvHeader << '\n';
  std::string line;
  for (const metrics::EfficiencyPoint& p : eta) {
    const TickRecord& r = log.ticks[tick_at(log, p.t)];
    const double total = r.f_z_robot + r.f_z_human;
    const double share = total != 0.0 ? r.f_z_robot / total : 0.0;
    line.clear();
    for (double v : {p.t, p.eta, r.eps.x(), r.eps.y(), r.K_x, share}) put(line, v);
    os << line << '\n';
  }
}

std::string summary_to_json(const RunSummary& s) {
  using nlohmann::json;
  const auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j = {{"scenario", s.scenario},
            {"case", s.compliance_case},
            {"seed", s.seed},
            {"duration", s.duration},
            {"ticks", s.ticks},
            {"fault", s.fault ? json(*s.fault) : json(nullptr)},
            {"planner_faults", s.planner_faults},
            {"eta_mean_planar", num(s.eta_mean)},
            {"eta_mean_forward", num(s.eta_mean_forward)},
            {"max_abs_eps_x", s.max_abs_eps_x},
            {"max_abs_eps_y", s.max_abs_eps_y},
            {"settling_time", s.settling_time ? json(*s.settling_time) : json(nullptr)},
            {"final_separation", s.final_separation},
            {"max_heading_error_after_5s", s.max_heading_error_after_5s},
            {"path_rms_error", s.path_rms_error}};
  return j.dump(2);
}

void write_outputs(const std::string& dir, const RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw Error(std::string("cannot write ") + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("ticks.csv");
    write_tick_csv(f, result.log);
  }
  {
    auto f = open("plans.csv");
    write_plans_csv(f, result.log);
  }
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, result.log, result.eta);
  }
  {
    auto f = open("summary.json");
    f << summary_to_json(result.summary) << '\n';
  }
}

}  // namespace cotransport::sim
