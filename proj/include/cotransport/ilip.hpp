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

// Interaction-LIP prediction: intent estimation, the continuous dynamics and
// the exact step-to-step maps of the robot and the object.

#ifndef COTRANSPORT_ILIP_HPP_
#define COTRANSPORT_ILIP_HPP_

#include "cotransport/types.hpp"

namespace cotransport::ilip {

class NonFiniteResult : public Error {
 public:
  using Error::Error;
};

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

/// Stacks a planar state as [x, y, vx, vy].
Vec4 stack(const PlanarState& s);
PlanarState unstack(const Vec4& v);

struct IlipStepInput {
  PlanarState robot;
  Vec2 object_pos = Vec2::Zero();
  Vec2 v_b_d = Vec2::Zero();
  FootPose foot;
  Vec2 K_t = Vec2::Zero();
  Vec2 B = Vec2::Zero();
  double T = 0.2;
};

/// One EMA update of the intended object velocity and yaw.
IntentEstimate update_intent(const IntentEstimate& est, const Vec2& measured_vel,
                             double measured_yaw);

/// Continuous I-LIP acceleration of the robot CoM.
Vec2 ilip_accel(const PlanarState& robot, const FootPose& foot, const Vec2& object_pos_at_t,
                const Vec2& v_b_d, const ComplianceParams& params, const GaitConfig& cfg);

/// Exact flow of the I-LIP over one step of duration in.T.
///
/// The object moves as x_b(t) = in.object_pos + v_b_d t. In the stance-local
/// frame each axis is an affine, time-forced second-order system; it is
/// propagated through the exponential of the augmented system (x, xdot, 1, t).
PlanarState ilip_step_map(const IlipStepInput& in, const Vec2& x_d, double m_c,
                          const GaitConfig& cfg);

/// Exact flow over T of
///   m_c x'' = m_c omega_sq (x - foot) + R K R^T (x_b(t) - x - R x_d) + R B R^T (v_b_d - x')
/// with x_b(t) = object_pos + v_b_d t and R = R(heading). Shared by the I-LIP
/// (omega_sq = g/h) and the admittance model (omega_sq = 0).
PlanarState coupled_flow(const PlanarState& robot, const Vec2& foot, double omega_sq,
                         const Vec2& object_pos, const Vec2& v_b_d, double heading, const Vec2& K,
                         const Vec2& B, const Vec2& x_d, double m_c, double T);

/// Constant-velocity object prediction.
PlanarState object_step_map(const PlanarState& object, const Vec2& v_b_d, double T);

/// The step map written as an affine function of its arguments:
///   X' = A X + B_u u + B_b x_b + B_v v_b_d + c
/// for fixed heading, spring, damper and offset. Built from a larger augmented
/// exponential than ilip_step_map so the two routes can be checked against
/// each other.
struct AffineStepMap {
  Mat4 A = Mat4::Identity();
  Mat42 B_u = Mat42::Zero();
  Mat42 B_b = Mat42::Zero();
  Mat42 B_v = Mat42::Zero();
  Vec4 c = Vec4::Zero();

  Vec4 apply(const Vec4& X, const Vec2& u, const Vec2& x_b, const Vec2& v_b_d) const {
    return A * X + B_u * u + B_b * x_b + B_v * v_b_d + c;
  }
};

/// omega_sq = 0 drops the pendulum term (and B_u is zero).
AffineStepMap affine_step_map(double heading, const Vec2& K, const Vec2& B, const Vec2& x_d,
                              double m_c, double omega_sq, double T);

}  // namespace cotransport::ilip

#endif  // COTRANSPORT_ILIP_HPP_
