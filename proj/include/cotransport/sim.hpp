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

// Fixed-step closed-loop plant: scripted (or live) leader, follower stack,
// object and robot point masses, per-tick log.

#ifndef COTRANSPORT_SIM_HPP_
#define COTRANSPORT_SIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cotransport/footstep_mpc.hpp"
#include "cotransport/metrics.hpp"
#include "cotransport/scenario.hpp"
#include "cotransport/stiffness.hpp"
#include "cotransport/types.hpp"
#include "cotransport/wbc.hpp"

namespace cotransport::sim {

/// Raised when a controller fails inside a tick; carries the tick index.
class SimFault : public Error {
 public:
  SimFault(long tick, const std::string& what)
      : Error("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}
  long tick() const { return tick_; }

 private:
  long tick_;
};

struct SimConfig {
  GaitConfig gait;
  ComplianceParams params;
  mpc::MpcWeights mpc;
  wbc::WbcWeights wbc_weights;
  wbc::WbcBounds wbc_bounds;
  stiffness::ModulationGains modulation;
  metrics::EffortWindow window;
  double load_share = 0.55;       // robot fraction of the object weight
  double stance_half_width = 0.1;  // initial feet at +-this laterally [m]

  void validate() const;
};

struct TickRecord {
  double t = 0.0;
  PlanarState robot;
  PlanarState object;
  double object_yaw = 0.0;
  double object_yawrate = 0.0;
  FootPose stance;
  Vec3 swing = Vec3::Zero();
  Vec2 F_h = Vec2::Zero();
  double M_h_z = 0.0;
  Vec2 F_r = Vec2::Zero();  // robot force on the object
  double f_z_robot = 0.0;
  double f_z_human = 0.0;
  double K_x = 0.0;
  Vec2 eps = Vec2::Zero();  // stance-local modified capture point offset
  Vec2 ref_pos = Vec2::Zero();
  double ref_yaw = 0.0;
};

struct PlanRecord {
  double t = 0.0;
  long tick = 0;
  int stage = 0;
  FootPose foot;
  PlanarState com;
};

struct SimLog {
  std::string scenario;
  int compliance_case = 3;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  std::vector<TickRecord> ticks;
  std::vector<PlanRecord> plans;
  std::optional<std::string> fault;
};

/// External leader input, replacing the scripted leader while set.
struct LiveInput {
  Vec2 force = Vec2::Zero();
  double moment = 0.0;
};

class Simulator {
 public:
  Simulator(Scenario scenario, SimConfig config);

  /// Advances one tick and returns its record. Throws SimFault.
  const TickRecord& step();
  /// Runs to the end of the scenario, appending to the log.
  void run();
  bool done() const { return tick_ >= total_ticks_; }

  void reset();
  /// Replaces the scripted leader until cleared; saturated to the leader limits.
  void set_live_input(std::optional<LiveInput> input);
  /// Takes effect at the next foot strike.
  void request_case(int index);
  std::optional<int> pending_case() const { return pending_case_; }
  /// Live tuning: x_d, k_x1, b_x1, K_min, K_max, load_share. Throws InvalidArgument.
  void set_param(const std::string& name, double value);

  long tick() const { return tick_; }
  long total_ticks() const { return total_ticks_; }
  double time() const { return static_cast<double>(tick_) * config_.gait.dt; }
  int active_case() const { return active_case_; }
  const SimLog& log() const { return log_; }
  SimLog& mutable_log() { return log_; }
  const Scenario& scenario() const { return scenario_; }
  const SimConfig& config() const { return config_; }
  SimConfig& mutable_config() { return config_; }
  const PlanarState& robot() const { return robot_; }
  const PlanarState& object() const { return object_; }
  double object_yaw() const { return object_yaw_; }
  const FootPose& stance() const { return stance_; }
  const FootPose& swing_target() const { return swing_target_; }
  const ComplianceParams& params() const { return params_; }
  /// Local-x robot-to-object distance in the stance frame.
  double separation() const;
  /// Keep only the most recent n records (0 = unbounded); for long live runs.
  void set_log_limit(std::size_t n) { log_limit_ = n; }

  /// Overrides the plant state; used for tests and the live reset.
  void set_state(const PlanarState& robot, const PlanarState& object, double object_yaw);

 private:
  void replan();

  Scenario scenario_;
  SimConfig config_;
  ComplianceParams params_;
  mpc::FootstepPlanner planner_;
  wbc::InteractionController wbc_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};

  long tick_ = 0;
  long total_ticks_ = 0;
  int ticks_in_step_ = 0;
  int active_case_ = 3;
  std::optional<int> pending_case_;
  std::optional<LiveInput> live_;
  std::size_t log_limit_ = 0;

  Vec2 origin_ = Vec2::Zero();
  PlanarState robot_;
  PlanarState object_;
  double object_yaw_ = 0.0;
  double object_yawrate_ = 0.0;
  FootPose stance_;
  Vec3 swing_start_ = Vec3::Zero();
  FootPose swing_target_;
  double heading_rate_ = 0.0;
  IntentEstimate intent_;
  SimLog log_;
};

struct RunSummary {
  std::string scenario;
  int compliance_case = 3;
  std::uint64_t seed = 0;
  double duration = 0.0;
  long ticks = 0;
  std::optional<std::string> fault;
  double eta_mean = 1.0;          // planar variant
  double eta_mean_forward = 1.0;  // forward-projected variant
  double max_abs_eps_x = 0.0;
  double max_abs_eps_y = 0.0;
  std::optional<double> settling_time;  // separation within 0.05 m of x_d from here on
  double final_separation = 0.0;
  double max_heading_error_after_5s = 0.0;
  double path_rms_error = 0.0;
  int planner_faults = 0;
};

struct RunResult {
  SimLog log;
  std::vector<metrics::EfficiencyPoint> eta;
  std::vector<metrics::EfficiencyPoint> eta_forward;
  RunSummary summary;
};

constexpr double kSettlingBand = 0.05;

/// Runs a scenario to completion. Controller faults end the run early and are
/// reported in the summary; the partial log is kept.
RunResult run_scenario(const Scenario& scenario, const SimConfig& config = {});
RunSummary summarize(const SimLog& log, const Scenario& scenario, const SimConfig& config,
                     const std::vector<metrics::EfficiencyPoint>& eta,
                     const std::vector<metrics::EfficiencyPoint>& eta_forward);

std::vector<RunResult> run_suite(const std::vector<Scenario>& scenarios,
                                 const SimConfig& config = {});
/// One scenario per OpenMP thread; results are identical to run_suite.
std::vector<RunResult> run_suite_parallel(const std::vector<Scenario>& scenarios,
                                          const SimConfig& config = {});

std::vector<metrics::ForceSample> force_samples(const SimLog& log);

// Output formats.
extern const char* const kTickCsvHeader;
extern const char* const kMetricsCsvHeader;
void write_tick_csv(std::ostream& os, const SimLog& log);
void write_plans_csv(std::ostream& os, const SimLog& log);
void write_metrics_csv(std::ostream& os, const SimLog& log,
                       const std::vector<metrics::EfficiencyPoint>& eta);
std::string summary_to_json(const RunSummary& s);
/// Writes ticks.csv, plans.csv, metrics.csv and summary.json into dir.
void write_outputs(const std::string& dir, const RunResult& result);

/// Reads a tick CSV back (as written by write_tick_csv).
SimLog read_tick_csv(std::istream& is);

}  // namespace cotransport::sim

#endif  // COTRANSPORT_SIM_HPP_
