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

#include "cotransport/admittance.hpp"

#include "cotransport/ilip.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cotransport::admittance {

PlanarState admittance_step_map(const PlanarState& robot, const Vec2& object_pos,
                                const Vec2& v_b_d, double heading, const ComplianceParams& params,
                                double T) {
  return ilip::coupled_flow(robot, Vec2::Zero(), 0.0, object_pos, v_b_d, heading, params.K_a,
                            params.B_a, params.x_d, params.m_c, T);
}

YawRollout yaw_rollout(double theta0, double thetadot0, double theta_b_d, double k_P, double k_D,
                       double T, int N) {
  if (k_P <= 0.0 || k_D < 0.0) throw InvalidArgument("yaw rollout: need k_P > 0, k_D >= 0");
  if (N < 1) throw InvalidArgument("yaw rollout: N must be at least 1");
  Eigen::Matrix2d M;
  M << 0.0, 1.0, -k_P, -k_D;
  const Eigen::Matrix2d step = (M * T).exp();
  Eigen::Vector2d err(angle_diff(theta0, theta_b_d), thetadot0);
  YawRollout out;
  out.headings.reserve(N);
  out.rates.reserve(N);
  for (int i = 0; i < N; ++i) {
    err = step * err;
    out.headings.push_back(normalize_angle(theta_b_d + err[0]));
    out.rates.push_back(err[1]);
  }
  return out;
}

std::vector<double> yaw_admittance_rollout(double theta0, double thetadot0, double theta_b_d,
                                           double k_P, double k_D, double T, int N) {
  return yaw_rollout(theta0, thetadot0, theta_b_d, k_P, k_D, T, N).headings;
}

GoalSet build_goal_set(const PlanarState& robot, const PlanarState& object,
                       const IntentEstimate& intent, double prev_heading,
                       const ComplianceParams& params, const GaitConfig& cfg,
                       double prev_heading_rate) {
  const YawRollout yaw = yaw_rollout(prev_heading, prev_heading_rate, intent.theta_b_d,
                                     params.k_theta_P, params.k_theta_D, cfg.T, cfg.N);
  GoalSet goals;
  goals.headings = yaw.headings;
  goals.heading_rates = yaw.rates;
  goals.com_goals.reserve(cfg.N);
  goals.vel_goals.reserve(cfg.N);
  PlanarState com = robot;
  PlanarState obj{object.pos, intent.v_b_d};
  for (int i = 0; i < cfg.N; ++i) {
    com = admittance_step_map(com, obj.pos, intent.v_b_d, yaw.headings[i], params, cfg.T);
    obj = ilip::object_step_map(obj, intent.v_b_d, cfg.T);
    goals.com_goals.push_back(com.pos);
    goals.vel_goals.push_back(com.vel);
  }
  return goals;
}

DesiredAccels desired_accels(const PlanarState& robot, const PlanarState& object, double object_yaw,
                             double object_yawrate, double heading, const Vec2& F_h,
                             const ComplianceParams& params) {
  const HeadingRotation R(heading);
  const Vec2 coupling =
      R.rotate_diagonal(params.K_h) * (object.pos - robot.pos - R.to_world(params.x_d)) +
      R.rotate_diagonal(params.B_h) * (object.vel - robot.vel);
  DesiredAccels out;
  out.a_c = coupling / params.m_c;
  out.a_b = (F_h - coupling) / params.m_b;
  out.alpha_b = params.k_b_P * angle_diff(heading, object_yaw) - params.k_b_D * object_yawrate;
  return out;
}

}  // namespace cotransport::admittance
