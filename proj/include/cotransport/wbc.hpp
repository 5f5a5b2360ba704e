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

// Reduced interaction controller: allocates robot CoM acceleration, object
// acceleration, object yaw acceleration and the net hand wrench in one QP,
// plus the swing-foot and phase helpers of the low-level loop.

#ifndef COTRANSPORT_WBC_HPP_
#define COTRANSPORT_WBC_HPP_

#include <optional>
#include <utility>

#include "cotransport/admittance.hpp"
#include "cotransport/qp.hpp"
#include "cotransport/types.hpp"

namespace cotransport::wbc {

class WbcInfeasible : public Error {
 public:
  using Error::Error;
};

struct WbcWeights {
  double psi2 = 1.0;   // robot CoM acceleration tracking
  double psi3 = 1.0;   // object acceleration tracking
  double psi4 = 1.0;   // object yaw acceleration tracking
  double psi7 = 1e-3;  // planar hand force
  double psi8 = 1.0;   // hand yaw moment

  void validate() const;
};

/// How the legs bound the robot CoM acceleration.
enum class LegModel {
  /// |a_c|_inf <= a_max in the world frame.
  FreeAcceleration,
  /// The CoM rides a pendulum on the stance foot; the legs add at most a_max
  /// per stance-local axis on top of omega^2 (x_c - u) + f_xy / m_c, and the
  /// desired a_c is read relative to the pendulum term.
  Pendulum,
};

struct WbcBounds {
  Vec2 f_lower{-150.0, -150.0};
  Vec2 f_upper{150.0, 150.0};
  double m_z_lower = -40.0;
  double m_z_upper = 40.0;
  double a_max = 1.0;
  LegModel legs = LegModel::Pendulum;
  double I_bz = 0.6;  // object yaw inertia [kg m^2]
};

struct HandWrench {
  Vec2 f_xy = Vec2::Zero();  // robot-side constraint force; the object receives -f_xy
  double f_z = 0.0;
  double m_z = 0.0;          // the object receives -m_z
};

struct WbcOutput {
  Vec2 robot_accel = Vec2::Zero();
  Vec2 object_accel = Vec2::Zero();
  double object_yaw_accel = 0.0;
  HandWrench wrench;
  int qp_iterations = 0;
};

struct InteractionInput {
  PlanarState robot;
  PlanarState object;
  double object_yaw = 0.0;
  double object_yawrate = 0.0;
  FootPose stance;  // heading and, for LegModel::Pendulum, the pivot
  Vec2 F_h = Vec2::Zero();
  double M_h_z = 0.0;
  admittance::DesiredAccels desired;
};

/// Decision vector: [robot accel (2), object accel (2), yaw accel, f_xy (2), m_z].
qp::QpProblem assemble_interaction_qp(const InteractionInput& in, const WbcWeights& weights,
                                      const WbcBounds& bounds, const ComplianceParams& params,
                                      const GaitConfig& cfg);

WbcOutput solve_interaction_qp(const InteractionInput& in, const WbcWeights& weights,
                               const WbcBounds& bounds, const ComplianceParams& params,
                               const GaitConfig& cfg, const qp::WarmStart* warm = nullptr,
                               qp::QpSolution* raw = nullptr);

/// Owns the warm-start cache across ticks.
class InteractionController {
 public:
  InteractionController(WbcWeights weights, WbcBounds bounds)
      : weights_(weights), bounds_(bounds) {}

  WbcOutput solve(const InteractionInput& in, const ComplianceParams& params,
                  const GaitConfig& cfg);

  const WbcBounds& bounds() const { return bounds_; }
  const WbcWeights& weights() const { return weights_; }
  void reset() { warm_.reset(); }

 private:
  WbcWeights weights_;
  WbcBounds bounds_;
  std::optional<qp::WarmStart> warm_;
};

/// Static split of the object weight: (robot, human).
std::pair<double, double> vertical_load_share(double m_b, double g, double share);

Vec3 swing_foot_position(const Vec3& start, const FootPose& target, double s, double z_cl);

struct Phase {
  double s = 0.0;
  bool strike = false;
};

Phase advance_phase(double t_in_step, double T);

}  // namespace cotransport::wbc

#endif  // COTRANSPORT_WBC_HPP_
