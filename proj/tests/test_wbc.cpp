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

#include <gtest/gtest.h>

#include <random>

#include "cotransport/wbc.hpp"

namespace cotransport::wbc {
namespace {

InteractionInput at_rest() {
  InteractionInput in;
  in.stance = FootPose{Vec2::Zero(), 0.0, FootSide::Right};
  in.object.pos = Vec2(0.6, 0.0);
  return in;
}

TEST(Wbc, RestIsZero) {
  const WbcOutput out =
      solve_interaction_qp(at_rest(), WbcWeights{}, WbcBounds{}, ComplianceParams{}, GaitConfig{});
  EXPECT_LT(out.robot_accel.norm(), 1e-9);
  EXPECT_LT(out.object_accel.norm(), 1e-9);
  EXPECT_LT(std::abs(out.object_yaw_accel), 1e-9);
  EXPECT_LT(out.wrench.f_xy.norm(), 1e-9);
  EXPECT_LT(std::abs(out.wrench.m_z), 1e-9);
}

TEST(Wbc, UnconstrainedMatchesClosedForm) {
  // With slack bounds, eliminating f = F_h - m_b a_b and m_z = M - I alpha
  // leaves independent scalar least-squares problems per axis.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WbcWeights w;
  w.psi7 = 0.02;
  w.psi8 = 0.5;
  WbcBounds b;
  b.legs = LegModel::FreeAcceleration;
  b.a_max = 1e3;
  const ComplianceParams p;
  for (int k = 0; k < 20; ++k) {
    InteractionInput in = at_rest();
    in.F_h = 20.0 * Vec2(u(rng), u(rng));
    in.M_h_z = 5.0 * u(rng);
    in.desired.a_c = Vec2(u(rng), u(rng));
    in.desired.a_b = Vec2(u(rng), u(rng));
    in.desired.alpha_b = u(rng);
    const WbcOutput out = solve_interaction_qp(in, w, b, p, GaitConfig{});
    const Vec2 a_b = (w.psi3 * in.desired.a_b + w.psi7 * p.m_b * in.F_h) /
                     (w.psi3 + w.psi7 * p.m_b * p.m_b);
    const double alpha = (w.psi4 * in.desired.alpha_b + w.psi8 * b.I_bz * in.M_h_z) /
                         (w.psi4 + w.psi8 * b.I_bz * b.I_bz);
    EXPECT_LT((out.robot_accel - in.desired.a_c).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((out.object_accel - a_b).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(out.object_yaw_accel, alpha, 1e-8);
    EXPECT_LT((out.wrench.f_xy - (in.F_h - p.m_b * a_b)).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_NEAR(out.wrench.m_z, in.M_h_z - b.I_bz * alpha, 1e-8);
  }
}

TEST(Wbc, ForceBoundClampsAndObjectTakesTheRest) {
  InteractionInput in = at_rest();
  in.F_h = Vec2(30.0, 0.0);
  in.desired.a_b = Vec2(-100.0, 0.0);
  const WbcBounds b;
  const ComplianceParams p;
  const WbcOutput out = solve_interaction_qp(in, WbcWeights{}, b, p, GaitConfig{});
  EXPECT_NEAR(out.wrench.f_xy.x(), b.f_upper.x(), 1e-7);
  EXPECT_NEAR(out.object_accel.x(), (in.F_h.x() - b.f_upper.x()) / p.m_b, 1e-7);
}

TEST(Wbc, PendulumLegsBoundTheCom) {
  InteractionInput in = at_rest();
  in.robot.pos = Vec2(0.05, 0.0);
  in.desired.a_c = Vec2(-20.0, 0.0);
  WbcBounds b;
  b.legs = LegModel::Pendulum;
  const ComplianceParams p;
  const GaitConfig cfg;
  const WbcOutput out = solve_interaction_qp(in, WbcWeights{}, b, p, cfg);
  const double w2 = cfg.omega0() * cfg.omega0();
  const double leg = out.robot_accel.x() - w2 * 0.05 - out.wrench.f_xy.x() / p.m_c;
  EXPECT_NEAR(leg, -b.a_max, 1e-7);
}

TEST(Wbc, EqualitiesHoldUnderRandomDemands) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ComplianceParams p;
  const WbcBounds b;
  for (int k = 0; k < 50; ++k) {
    InteractionInput in = at_rest();
    in.stance.heading = 3.0 * u(rng);
    in.robot.pos = 0.1 * Vec2(u(rng), u(rng));
    in.F_h = 200.0 * Vec2(u(rng), u(rng));
    in.M_h_z = 60.0 * u(rng);
    in.desired.a_c = 5.0 * Vec2(u(rng), u(rng));
    in.desired.a_b = 5.0 * Vec2(u(rng), u(rng));
    in.desired.alpha_b = 5.0 * u(rng);
    const WbcOutput out = solve_interaction_qp(in, WbcWeights{}, b, p, GaitConfig{});
    EXPECT_LT((p.m_b * out.object_accel + out.wrench.f_xy - in.F_h).norm(), 1e-7);
    EXPECT_NEAR(b.I_bz * out.object_yaw_accel + out.wrench.m_z, in.M_h_z, 1e-7);
    EXPECT_LE(out.wrench.f_xy.cwiseAbs().maxCoeff(), 150.0 + 1e-7);
    EXPECT_LE(std::abs(out.wrench.m_z), 40.0 + 1e-7);
  }
}

TEST(Wbc, WeightValidation) {
  WbcWeights w;
  w.psi2 = 0.0;
  EXPECT_THROW(w.validate(), InvalidArgument);
  w = WbcWeights{};
  w.psi8 = -1.0;
  EXPECT_THROW(w.validate(), InvalidArgument);
}

TEST(LoadShare, Statics) {
  const auto half = vertical_load_share(15.0, 9.81, 0.5);
  EXPECT_NEAR(half.first, 73.575, 1e-12);
  EXPECT_NEAR(half.second, 73.575, 1e-12);
  EXPECT_NEAR(vertical_load_share(15.0, 9.81, 1.0).second, 0.0, 1e-12);
  EXPECT_NEAR(vertical_load_share(15.0, 9.81, 0.55).first, 80.9325, 1e-12);
  EXPECT_THROW(vertical_load_share(15.0, 9.81, 1.2), InvalidArgument);
}

TEST(Swing, BoundaryAndApex) {
  const Vec3 start(0.1, -0.1, 0.0);
  const FootPose target{Vec2(0.4, 0.1), 0.0, FootSide::Left};
  const double z = 0.08;
  EXPECT_LT((swing_foot_position(start, target, 0.0, z) - start).norm(), 1e-15);
  EXPECT_LT((swing_foot_position(start, target, 1.0, z) - Vec3(0.4, 0.1, 0.0)).norm(), 1e-15);
  const Vec3 mid = swing_foot_position(start, target, 0.5, z);
  EXPECT_NEAR(mid.x(), 0.25, 1e-12);
  EXPECT_NEAR(mid.y(), 0.0, 1e-12);
  EXPECT_NEAR(mid.z(), z, 1e-12);
}

TEST(Swing, ContinuouslyDifferentiable) {
  // Central differences stay bounded across [0, 1]; end velocities vanish.
  const Vec3 start(0.0, 0.0, 0.0);
  const FootPose target{Vec2(0.3, 0.2), 0.0, FootSide::Left};
  const double h = 1e-6;
  double worst_jump = 0.0;
  Vec3 prev_d = (swing_foot_position(start, target, 2 * h, 0.08) -
                 swing_foot_position(start, target, 0.0, 0.08)) / (2 * h);
  EXPECT_LT(prev_d.norm(), 1e-4);
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    const Vec3 d = (swing_foot_position(start, target, s + h, 0.08) -
                    swing_foot_position(start, target, s - h, 0.08)) / (2 * h);
    worst_jump = std::max(worst_jump, (d - prev_d).norm());
    prev_d = d;
  }
  EXPECT_LT(worst_jump, 0.01);
  const Vec3 end = (swing_foot_position(start, target, 1.0, 0.08) -
                    swing_foot_position(start, target, 1.0 - 2 * h, 0.08)) / (2 * h);
  EXPECT_LT(std::abs(end.z()), 1e-4);
  EXPECT_LT(end.head<2>().norm(), 1e-4);
  EXPECT_THROW(swing_foot_position(start, target, 1.5, 0.08), InvalidArgument);
}

TEST(Phase, Advance) {
  const double T = 0.4;
  EXPECT_DOUBLE_EQ(advance_phase(0.0, T).s, 0.0);
  EXPECT_FALSE(advance_phase(0.0, T).strike);
  EXPECT_DOUBLE_EQ(advance_phase(T, T).s, 1.0);
  EXPECT_TRUE(advance_phase(T, T).strike);
  EXPECT_DOUBLE_EQ(advance_phase(T / 4, T).s, 0.25);
  EXPECT_THROW(advance_phase(-0.1, T), InvalidArgument);
  EXPECT_THROW(advance_phase(0.1, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace cotransport::wbc
