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

#include "cotransport/ilip.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cotransport::ilip {

namespace {

// Flow of  r'' = a r - c r' + e + f t  from t = 0 over T, via the augmented
// state (r, r', 1, t).
Eigen::Vector2d axis_flow(double a, double c, double e, double f, double r0, double rd0,
                          double T) {
  Mat4 M = Mat4::Zero();
  M(0, 1) = 1.0;
  M(1, 0) = a;
  M(1, 1) = -c;
  M(1, 2) = e;
  M(1, 3) = f;
  M(3, 2) = 1.0;
  const Mat4 Phi = (M * T).exp();
  const Vec4 z0(r0, rd0, 1.0, 0.0);
  const Vec4 z = Phi * z0;
  return z.head<2>();
}

}  // namespace

Vec4 stack(const PlanarState& s) {
  Vec4 v;
  v << s.pos, s.vel;
  return v;
}

PlanarState unstack(const Vec4& v) { return PlanarState{v.head<2>(), v.tail<2>()}; }

IntentEstimate update_intent(const IntentEstimate& est, const Vec2& measured_vel,
                             double measured_yaw) {
  IntentEstimate out = est;
  out.v_b_d = est.alpha * est.v_b_d + (1.0 - est.alpha) * measured_vel;
  // Blend along the shortest arc so the estimate does not swing through the seam.
  out.theta_b_d =
      normalize_angle(est.theta_b_d + (1.0 - est.beta) * angle_diff(measured_yaw, est.theta_b_d));
  return out;
}

Vec2 ilip_accel(const PlanarState& robot, const FootPose& foot, const Vec2& object_pos_at_t,
                const Vec2& v_b_d, const ComplianceParams& params, const GaitConfig& cfg) {
  const HeadingRotation R(foot.heading);
  const double w2 = cfg.omega0() * cfg.omega0();
  const Vec2 stretch = object_pos_at_t - robot.pos - R.to_world(params.x_d);
  return w2 * (robot.pos - foot.pos) +
         (R.rotate_diagonal(params.K_t) * stretch + R.rotate_diagonal(params.B) * (v_b_d - robot.vel)) /
             params.m_c;
}

PlanarState coupled_flow(const PlanarState& robot, const Vec2& foot, double omega_sq,
                         const Vec2& object_pos, const Vec2& v_b_d, double heading, const Vec2& K,
                         const Vec2& B, const Vec2& x_d, double m_c, double T) {
  const HeadingRotation R(heading);
  const Vec2 r = R.to_local(robot.pos);
  const Vec2 rd = R.to_local(robot.vel);
  const Vec2 p = R.to_local(foot);
  const Vec2 b0 = R.to_local(object_pos);
  const Vec2 vb = R.to_local(v_b_d);

  Vec2 pos_local, vel_local;
  for (int i = 0; i < 2; ++i) {
    const double k = K[i] / m_c;
    const double c = B[i] / m_c;
    const double e = -omega_sq * p[i] + k * (b0[i] - x_d[i]) + c * vb[i];
    const Eigen::Vector2d out = axis_flow(omega_sq - k, c, e, k * vb[i], r[i], rd[i], T);
    pos_local[i] = out[0];
    vel_local[i] = out[1];
  }
  PlanarState next{R.to_world(pos_local), R.to_world(vel_local)};
  if (!next.finite()) {
    throw NonFiniteResult("step map: non-finite state (check stiffness and step duration)");
  }
  return next;
}

PlanarState ilip_step_map(const IlipStepInput& in, const Vec2& x_d, double m_c,
                          const GaitConfig& cfg) {
  const double w2 = cfg.omega0() * cfg.omega0();
  return coupled_flow(in.robot, in.foot.pos, w2, in.object_pos, in.v_b_d, in.foot.heading, in.K_t,
                      in.B, x_d, m_c, in.T);
}

PlanarState object_step_map(const PlanarState& object, const Vec2& v_b_d, double T) {
  return PlanarState{object.pos + v_b_d * T, v_b_d};
}

AffineStepMap affine_step_map(double heading, const Vec2& K, const Vec2& B, const Vec2& x_d,
                              double m_c, double omega_sq, double T) {
  // Per local axis, z = (r, r', p, beta, vb, tau) with beta = b0 - d constant
  // and tau' = vb standing in for vb t.
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  Eigen::Matrix2d Arr[2];     // local (r, r') -> (r, r')
  double coef_p[2][2]{};      // [axis][pos/vel]
  double coef_beta[2][2]{};
  double coef_vb[2][2]{};
  for (int i = 0; i < 2; ++i) {
    const double k = K[i] / m_c;
    const double c = B[i] / m_c;
    Mat6 M = Mat6::Zero();
    M(0, 1) = 1.0;
    M(1, 0) = omega_sq - k;
    M(1, 1) = -c;
    M(1, 2) = -omega_sq;
    M(1, 3) = k;
    M(1, 4) = c;
    M(1, 5) = k;
    M(5, 4) = 1.0;
    const Mat6 Phi = (M * T).exp();
    Arr[i] = Phi.block<2, 2>(0, 0);
    for (int row = 0; row < 2; ++row) {
      coef_p[i][row] = Phi(row, 2);
      coef_beta[i][row] = Phi(row, 3);
      coef_vb[i][row] = Phi(row, 4);  // tau starts at zero
    }
  }

  // Assemble in local coordinates ordered (rx, ry, rdx, rdy), then conjugate
  // by the block rotation diag(R, R).
  Mat4 A_loc = Mat4::Zero();
  Mat42 P_loc = Mat42::Zero(), Beta_loc = Mat42::Zero(), V_loc = Mat42::Zero();
  for (int i = 0; i < 2; ++i) {
    A_loc(i, i) = Arr[i](0, 0);
    A_loc(i, i + 2) = Arr[i](0, 1);
    A_loc(i + 2, i) = Arr[i](1, 0);
    A_loc(i + 2, i + 2) = Arr[i](1, 1);
    for (int row = 0; row < 2; ++row) {
      P_loc(i + 2 * row, i) = coef_p[i][row];
      Beta_loc(i + 2 * row, i) = coef_beta[i][row];
      V_loc(i + 2 * row, i) = coef_vb[i][row];
    }
  }
  const HeadingRotation R(heading);
  Mat4 Rb = Mat4::Zero();
  Rb.block<2, 2>(0, 0) = R.matrix();
  Rb.block<2, 2>(2, 2) = R.matrix();
  const Mat2 Rt = R.matrix().transpose();

  AffineStepMap map;
  map.A = Rb * A_loc * Rb.transpose();
  map.B_u = Rb * P_loc * Rt;
  map.B_b = Rb * Beta_loc * Rt;
  map.B_v = Rb * V_loc * Rt;
  map.c = -(Rb * Beta_loc * x_d);
  if (!map.A.allFinite() || !map.B_u.allFinite() || !map.B_b.allFinite() ||
      !map.B_v.allFinite()) {
    throw NonFiniteResult("affine_step_map: non-finite transition");
  }
  return map;
}

}  // namespace cotransport::ilip
