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

#include "cotransport/wbc.hpp"

#include <numbers>
#include <string>

namespace cotransport::wbc {

namespace {
constexpr int kAc = 0, kAb = 2, kYaw = 4, kF = 5, kMz = 7, kVars = 8;
}  // namespace

void WbcWeights::validate() const {
  if (!(psi2 > 0.0 && psi3 > 0.0 && psi4 > 0.0) || psi7 < 0.0 || psi8 < 0.0) {
    throw InvalidArgument("wbc weights: psi2..psi4 must be positive and psi7, psi8 non-negative");
  }
}

qp::QpProblem assemble_interaction_qp(const InteractionInput& in, const WbcWeights& weights,
                                      const WbcBounds& bounds, const ComplianceParams& params,
                                      const GaitConfig& cfg) {
  weights.validate();
  if (!(bounds.I_bz > 0.0)) throw InvalidArgument("wbc: I_bz must be positive");
  qp::QpProblem p = qp::QpProblem::empty(kVars);

  p.H.diagonal() << weights.psi2, weights.psi2, weights.psi3, weights.psi3, weights.psi4,
      weights.psi7, weights.psi7, weights.psi8;
  p.H *= 2.0;
  // With pendulum legs the desired CoM acceleration is tracked on top of the
  // passive inverted-pendulum term about the stance foot.
  const double w2 = cfg.omega0() * cfg.omega0();
  const Vec2 pendulum = w2 * (in.robot.pos - in.stance.pos);
  const Vec2 a_c_target =
      bounds.legs == LegModel::Pendulum ? Vec2(in.desired.a_c + pendulum) : in.desired.a_c;
  p.f.segment<2>(kAc) = -2.0 * weights.psi2 * a_c_target;
  p.f.segment<2>(kAb) = -2.0 * weights.psi3 * in.desired.a_b;
  p.f[kYaw] = -2.0 * weights.psi4 * in.desired.alpha_b;

  // m_b xdd_b + f_xy = F_h ;  I_bz thdd_b + m_z = M_h_z
  p.A_eq = qp::MatrixXd::Zero(3, kVars);
  p.b_eq.resize(3);
  p.A_eq.block<2, 2>(0, kAb) = params.m_b * Mat2::Identity();
  p.A_eq.block<2, 2>(0, kF) = Mat2::Identity();
  p.A_eq(2, kYaw) = bounds.I_bz;
  p.A_eq(2, kMz) = 1.0;
  p.b_eq << in.F_h, in.M_h_z;

  p.A_in = qp::MatrixXd::Zero(5, kVars);
  p.lower.resize(5);
  p.upper.resize(5);
  p.A_in.block<2, 2>(0, kF) = Mat2::Identity();
  p.lower.head<2>() = bounds.f_lower;
  p.upper.head<2>() = bounds.f_upper;
  p.A_in(2, kMz) = 1.0;
  p.lower[2] = bounds.m_z_lower;
  p.upper[2] = bounds.m_z_upper;

  const Vec2 amax = Vec2::Constant(bounds.a_max);
  if (bounds.legs == LegModel::FreeAcceleration) {
    p.A_in.block<2, 2>(3, kAc) = Mat2::Identity();
    p.lower.tail<2>() = -amax;
    p.upper.tail<2>() = amax;
  } else {
    const HeadingRotation R(in.stance.heading);
    const Mat2 Rt = R.matrix().transpose();
    const Vec2 passive = Rt * pendulum;
    p.A_in.block<2, 2>(3, kAc) = Rt;
    p.A_in.block<2, 2>(3, kF) = -Rt / params.m_c;
    p.lower.tail<2>() = passive - amax;
    p.upper.tail<2>() = passive + amax;
  }
  return p;
}

WbcOutput solve_interaction_qp(const InteractionInput& in, const WbcWeights& weights,
                               const WbcBounds& bounds, const ComplianceParams& params,
                               const GaitConfig& cfg, const qp::WarmStart* warm,
                               qp::QpSolution* raw) {
  const qp::QpProblem p = assemble_interaction_qp(in, weights, bounds, params, cfg);
  const qp::QpSolution sol = qp::solve_qp(p, qp::QpSettings{}, warm);
  if (raw != nullptr) *raw = sol;
  if (sol.status != qp::QpStatus::Optimal) {
    throw WbcInfeasible(std::string("interaction QP ended with status ") +
                        qp::to_string(sol.status));
  }
  WbcOutput out;
  out.robot_accel = sol.x.segment<2>(kAc);
  out.object_accel = sol.x.segment<2>(kAb);
  out.object_yaw_accel = sol.x[kYaw];
  out.wrench.f_xy = sol.x.segment<2>(kF);
  out.wrench.m_z = sol.x[kMz];
  out.qp_iterations = sol.iterations;
  return out;
}

WbcOutput InteractionController::solve(const InteractionInput& in, const ComplianceParams& params,
                                       const GaitConfig& cfg) {
  qp::QpSolution raw;
  const qp::WarmStart* warm = warm_ ? &*warm_ : nullptr;
  WbcOutput out = solve_interaction_qp(in, weights_, bounds_, params, cfg, warm, &raw);
  warm_ = qp::WarmStart{raw.x, raw.y_eq, raw.y_in};
  return out;
}

std::pair<double, double> vertical_load_share(double m_b, double g, double share) {
  if (!(share >= 0.0 && share <= 1.0)) throw InvalidArgument("load share must lie in [0, 1]");
  const double weight = m_b * g;
  return {share * weight, (1.0 - share) * weight};
}

Vec3 swing_foot_position(const Vec3& start, const FootPose& target, double s, double z_cl) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("swing phase must lie in [0, 1]");
  const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * s));
  const Vec2 xy = start.head<2>() + blend * (target.pos - start.head<2>());
  const double q = s * (1.0 - s);
  return Vec3(xy.x(), xy.y(), 16.0 * z_cl * q * q);
}

Phase advance_phase(double t_in_step, double T) {
  if (!(T > 0.0)) throw InvalidArgument("phase: T must be positive");
  if (t_in_step < 0.0 || t_in_step > T + 1e-9) {
    throw InvalidArgument("phase: time in step outside [0, T]");
  }
  Phase ph;
  ph.strike = t_in_step >= T - 1e-9;
  ph.s = ph.strike ? 1.0 : t_in_step / T;
  return ph;
}

}  // namespace cotransport::wbc
