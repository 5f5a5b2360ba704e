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

// Compliance shaping: the translational admittance flow, the stance-yaw
// admittance, the planner goal set and the hand-level desired accelerations.

#ifndef COTRANSPORT_ADMITTANCE_HPP_
#define COTRANSPORT_ADMITTANCE_HPP_

#include <vector>

#include "cotransport/types.hpp"

namespace cotransport::admittance {

/// Goals handed to the footstep planner. com_goals[i] is the admittance CoM
/// position at the end of predicted step i+1; headings[i] is the stance yaw
/// used during that step.
struct GoalSet {
  std::vector<Vec2> com_goals;
  /// End-of-step velocities of the same admittance rollout.
  std::vector<Vec2> vel_goals;
  std::vector<double> headings;
  /// Yaw rate of the heading admittance at each sample; feeds the next plan.
  std::vector<double> heading_rates;
};

struct DesiredAccels {
  Vec2 a_c = Vec2::Zero();
  Vec2 a_b = Vec2::Zero();
  double alpha_b = 0.0;
};

struct YawRollout {
  std::vector<double> headings;
  std::vector<double> rates;
};

PlanarState admittance_step_map(const PlanarState& robot, const Vec2& object_pos,
                                const Vec2& v_b_d, double heading, const ComplianceParams& params,
                                double T);

/// Samples the damped yaw oscillator at t = T, 2T, ..., N T (the stance yaw
/// of each upcoming step). The spring acts on the shortest angular error.
YawRollout yaw_rollout(double theta0, double thetadot0, double theta_b_d, double k_P, double k_D,
                       double T, int N);

std::vector<double> yaw_admittance_rollout(double theta0, double thetadot0, double theta_b_d,
                                           double k_P, double k_D, double T, int N);

GoalSet build_goal_set(const PlanarState& robot, const PlanarState& object,
                       const IntentEstimate& intent, double prev_heading,
                       const ComplianceParams& params, const GaitConfig& cfg,
                       double prev_heading_rate = 0.0);

DesiredAccels desired_accels(const PlanarState& robot, const PlanarState& object, double object_yaw,
                             double object_yawrate, double heading, const Vec2& F_h,
                             const ComplianceParams& params);

}  // namespace cotransport::admittance

#endif  // COTRANSPORT_ADMITTANCE_HPP_
