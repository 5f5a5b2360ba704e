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

#include "cotransport/footstep_mpc.hpp"

#include <string>

#include "cotransport/ilip.hpp"

namespace cotransport::mpc {

void MpcWeights::validate() const {
  if ((K_phi.array() < 0.0).any() || (B_phi.array() < 0.0).any() || phi1 < 0.0 || phi2 < 0.0 ||
      phi3 < 0.0) {
    throw InvalidArgument("mpc weights must be non-negative");
  }
  if (!(phi1 + phi2 > 0.0)) throw InvalidArgument("mpc weights: phi1 + phi2 must be positive");
}

double FootRegion::violation(const Vec2& prev, const Vec2& candidate) const {
  const Vec2 proj = rows * (candidate - prev);
  return std::max((lower - proj).maxCoeff(), (proj - upper).maxCoeff());
}

FootRegion feasible_region(const FootPose& prev, const GaitConfig& cfg) {
  const double c = std::cos(prev.heading), s = std::sin(prev.heading);
  // Right stance puts the next (left) foot on the positive local-y side.
  const double n = prev.side == FootSide::Right ? 1.0 : -1.0;
  FootRegion r;
  r.rows << c, s, n * -s, n * c;
  r.lower << -cfg.l_x, cfg.d_f;
  r.upper << cfg.l_x, cfg.l_y;
  return r;
}

qp::QpProblem assemble_mpc(const PlanarState& robot, const PlanarState& object, const Vec2& v_b_d,
                           const admittance::GoalSet& goals, const FootPose& stance,
                           const ComplianceParams& params, const MpcWeights& weights,
                           const GaitConfig& cfg) {
  const int N = cfg.N;
  if (static_cast<int>(goals.com_goals.size()) != N ||
      static_cast<int>(goals.headings.size()) != N) {
    throw qp::DimensionMismatch("assemble_mpc: goal set length " +
                                std::to_string(goals.com_goals.size()) + " != horizon " +
                                std::to_string(N));
  }
  weights.validate();
  const int n = 6 * N;
  const double w2 = cfg.omega0() * cfg.omega0();

  qp::QpProblem p;
  p.H = qp::MatrixXd::Zero(n, n);
  p.f = qp::VectorXd::Zero(n);
  p.A_eq = qp::MatrixXd::Zero(4 * N, n);
  p.b_eq = qp::VectorXd::Zero(4 * N);
  p.A_in = qp::MatrixXd::Zero(2 * N, n);
  p.lower = qp::VectorXd::Zero(2 * N);
  p.upper = qp::VectorXd::Zero(2 * N);

  const ilip::Vec4 X0 = ilip::stack(robot);
  FootPose prev = stance;
  for (int j = 0; j < N; ++j) {
    const double heading = goals.headings[j];
    const ilip::AffineStepMap map =
        ilip::affine_step_map(heading, params.K_t, params.B, params.x_d, params.m_c, w2, cfg.T);
    const Vec2 object_pos = object.pos + v_b_d * (cfg.T * j);

    // X_{j+1} - A X_j - B_u u_j = B_b x_b + B_v v + c
    const int xi = state_index(j), ui = foot_index(j);
    const int row = 4 * j;
    p.A_eq.block<4, 4>(row, xi).setIdentity();
    p.A_eq.block<4, 2>(row, ui) = -map.B_u;
    ilip::Vec4 rhs = map.B_b * object_pos + map.B_v * v_b_d + map.c;
    if (j == 0) {
      rhs += map.A * X0;
    } else {
      p.A_eq.block<4, 4>(row, state_index(j - 1)) = -map.A;
    }
    p.b_eq.segment<4>(row) = rhs;

    // Stage cost on the end-of-step CoM position.
    const HeadingRotation R(heading);
    const Mat2 W1 = weights.phi1 * R.rotate_diagonal(weights.K_phi);
    const Mat2 W2 = weights.phi2 * R.rotate_diagonal(weights.B_phi);
    p.H.block<2, 2>(xi, xi) += 2.0 * (W1 + W2);
    p.H.block<2, 2>(ui, ui) += 2.0 * W2;
    p.H.block<2, 2>(xi, ui) -= 2.0 * W2;
    p.H.block<2, 2>(ui, xi) -= 2.0 * W2;
    p.f.segment<2>(xi) -= 2.0 * W1 * goals.com_goals[j];
    if (weights.phi3 > 0.0) {
      const Mat2 W3 = weights.phi3 * R.rotate_diagonal(weights.K_phi);
      p.H.block<2, 2>(xi + 2, xi + 2) += 2.0 * W3;
      p.f.segment<2>(xi + 2) -= 2.0 * W3 * goals.vel_goals.at(j);
    }

    // Reachability of u_j from the previous stance foot.
    const FootRegion region = feasible_region(prev, cfg);
    const int irow = 2 * j;
    p.A_in.block<2, 2>(irow, ui) = region.rows;
    if (j == 0) {
      const Vec2 shift = region.rows * stance.pos;
      p.lower.segment<2>(irow) = region.lower + shift;
      p.upper.segment<2>(irow) = region.upper + shift;
    } else {
      p.A_in.block<2, 2>(irow, foot_index(j - 1)) = -region.rows;
      p.lower.segment<2>(irow) = region.lower;
      p.upper.segment<2>(irow) = region.upper;
    }
    prev = FootPose{Vec2::Zero(), heading, opposite(prev.side)};
  }
  return p;
}

FootPlan solve_footstep_plan(const PlanarState& robot, const PlanarState& object,
                             const Vec2& v_b_d, const admittance::GoalSet& goals,
                             const FootPose& stance, const ComplianceParams& params,
                             const MpcWeights& weights, const GaitConfig& cfg,
                             const qp::WarmStart* warm, qp::QpSolution* raw) {
  const qp::QpProblem p = assemble_mpc(robot, object, v_b_d, goals, stance, params, weights, cfg);
  qp::QpSettings settings;
  const qp::QpSolution sol = qp::solve_qp(p, settings, warm);
  if (raw != nullptr) *raw = sol;
  if (sol.status != qp::QpStatus::Optimal) {
    throw PlannerInfeasible(std::string("footstep QP ended with status ") +
                            qp::to_string(sol.status));
  }
  FootPlan plan;
  plan.qp_iterations = sol.iterations;
  FootSide side = stance.side;
  for (int j = 0; j < cfg.N; ++j) {
    side = opposite(side);
    plan.steps.push_back(FootPose{sol.x.segment<2>(foot_index(j)), goals.headings[j], side});
    plan.predicted_com.push_back(ilip::unstack(sol.x.segment<4>(state_index(j))));
  }
  return plan;
}

FootPlan FootstepPlanner::plan(const PlanarState& robot, const PlanarState& object,
                               const Vec2& v_b_d, const admittance::GoalSet& goals,
                               const FootPose& stance, const ComplianceParams& params) {
  qp::QpSolution raw;
  const qp::WarmStart* warm = warm_ ? &*warm_ : nullptr;
  FootPlan plan =
      solve_footstep_plan(robot, object, v_b_d, goals, stance, params, weights_, cfg_, warm, &raw);
  warm_ = qp::WarmStart{raw.x, raw.y_eq, raw.y_in};
  return plan;
}

}  // namespace cotransport::mpc
