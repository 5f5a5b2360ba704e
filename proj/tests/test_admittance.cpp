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

#include <cmath>
#include <random>

#include "cotransport/admittance.hpp"
#include "cotransport/ilip.hpp"
#include "oracles.hpp"

namespace cotransport {
namespace {

ComplianceParams case_params(int c) {
  ComplianceParams p;
  apply_case(p, c);
  return p;
}

TEST(AdmittanceStep, MovingEquilibriumKeepsOffset) {
  const ComplianceParams p = case_params(3);
  const double heading = 0.3;
  const Vec2 v(0.4, 0.1);
  const PlanarState robot{Vec2(0.2, 0.1), v};
  const Vec2 obj = robot.pos + rotate_to_world(p.x_d, heading);
  const PlanarState out = admittance::admittance_step_map(robot, obj, v, heading, p, 0.4);
  EXPECT_LT((out.pos - (robot.pos + 0.4 * v)).norm(), 1e-12);
  EXPECT_LT((out.vel - v).norm(), 1e-12);
}

TEST(AdmittanceStep, ZeroDurationIsIdentity) {
  const ComplianceParams p = case_params(1);
  const PlanarState robot{Vec2(0.2, 0.1), Vec2(-0.3, 0.2)};
  const PlanarState out =
      admittance::admittance_step_map(robot, Vec2(1.0, 1.0), Vec2(0.5, 0.0), 0.0, p, 1e-9);
  EXPECT_LT((out.pos - robot.pos).norm(), 1e-8);
  EXPECT_LT((out.vel - robot.vel).norm(), 1e-6);
}

TEST(AdmittanceStep, MatchesRk4) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 1; c <= 4; ++c) {
    const ComplianceParams p = case_params(c);
    for (int i = 0; i < 10; ++i) {
      const PlanarState robot{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
      const Vec2 obj = robot.pos + Vec2(0.6, 0.0) + 0.3 * Vec2(u(rng), u(rng));
      const Vec2 v(u(rng), u(rng));
      const double heading = 3.0 * u(rng);
      const PlanarState got = admittance::admittance_step_map(robot, obj, v, heading, p, 0.2);
      oracle::CoupledOde ode{0.0, Vec2::Zero(), obj, v, heading, p.K_a, p.B_a, p.x_d, p.m_c};
      const PlanarState ref = oracle::rk4(ode, robot, 0.2, 1e-5);
      EXPECT_LT((got.pos - ref.pos).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT((got.vel - ref.vel).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(YawRollout, EquilibriumIsConstant) {
  const auto h = admittance::yaw_admittance_rollout(0.7, 0.0, 0.7, 4.0, 4.0, 0.4, 5);
  ASSERT_EQ(h.size(), 5u);
  for (double x : h) EXPECT_NEAR(x, 0.7, 1e-15);
}

TEST(YawRollout, UndampedOscillator) {
  const double kP = 9.0, d = 0.05, T = 0.2;
  const auto h = admittance::yaw_admittance_rollout(0.5 + d, 0.0, 0.5, kP, 0.0, T, 6);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(h[i], 0.5 + d * std::cos(std::sqrt(kP) * T * (i + 1)), 1e-12);
  }
}

TEST(YawRollout, DampedMatchesRk4) {
  const auto h = admittance::yaw_admittance_rollout(0.2, -0.4, 1.1, 9.0, 6.0, 0.2, 4);
  const auto ref = oracle::yaw_rk4(0.2, -0.4, 1.1, 9.0, 6.0, 0.2, 4, 1e-4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(h[i], ref[i], 1e-8);
}

TEST(YawRollout, RejectsBadGains) {
  EXPECT_THROW(admittance::yaw_rollout(0, 0, 0, 0.0, 1.0, 0.2, 3), InvalidArgument);
  EXPECT_THROW(admittance::yaw_rollout(0, 0, 0, 1.0, 1.0, 0.2, 0), InvalidArgument);
}

TEST(GoalSet, GlobalEquilibrium) {
  const ComplianceParams p = case_params(3);
  GaitConfig cfg;
  const PlanarState robot{Vec2(0.3, -0.2), Vec2::Zero()};
  const PlanarState obj{robot.pos + p.x_d, Vec2::Zero()};
  const auto g = admittance::build_goal_set(robot, obj, IntentEstimate{}, 0.0, p, cfg);
  ASSERT_EQ(static_cast<int>(g.com_goals.size()), cfg.N);
  for (const Vec2& x : g.com_goals) EXPECT_LT((x - robot.pos).norm(), 1e-12);
}

TEST(GoalSet, TranslatingEquilibrium) {
  const ComplianceParams p = case_params(3);
  GaitConfig cfg;
  IntentEstimate intent;
  intent.v_b_d = Vec2(0.5, 0.0);
  const PlanarState robot{Vec2::Zero(), intent.v_b_d};
  const PlanarState obj{p.x_d, intent.v_b_d};
  const auto g = admittance::build_goal_set(robot, obj, intent, 0.0, p, cfg);
  for (int i = 0; i < cfg.N; ++i) {
    EXPECT_NEAR(g.com_goals[i].x(), 0.5 * cfg.T * (i + 1), 1e-12);
    EXPECT_NEAR(g.com_goals[i].y(), 0.0, 1e-12);
  }
}

TEST(GoalSet, CompositionMatchesLongRollout) {
  const ComplianceParams p = case_params(2);
  GaitConfig cfg;
  IntentEstimate intent;
  intent.v_b_d = Vec2(0.3, 0.1);
  intent.theta_b_d = 0.6;
  const PlanarState robot{Vec2(0.1, 0.0), Vec2(0.2, 0.0)};
  const PlanarState obj{Vec2(0.8, 0.2), intent.v_b_d};
  const auto g = admittance::build_goal_set(robot, obj, intent, 0.1, p, cfg, 0.2);
  // One rollout across the whole horizon; the heading switches at each boundary.
  PlanarState s = robot;
  for (int i = 0; i < cfg.N; ++i) {
    oracle::CoupledOde ode{0.0, Vec2::Zero(), obj.pos + intent.v_b_d * cfg.T * i, intent.v_b_d,
                           g.headings[i], p.K_a, p.B_a, p.x_d, p.m_c};
    s = oracle::rk4(ode, s, cfg.T, 1e-5);
    EXPECT_LT((s.pos - g.com_goals[i]).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((s.vel - g.vel_goals[i]).cwiseAbs().maxCoeff(), 1e-6);
  }
  const auto yaw = oracle::yaw_rk4(0.1, 0.2, 0.6, p.k_theta_P, p.k_theta_D, cfg.T, cfg.N, 1e-4);
  for (int i = 0; i < cfg.N; ++i) EXPECT_NEAR(g.headings[i], yaw[i], 1e-8);
}

TEST(DesiredAccels, EquilibriumIsZero) {
  const ComplianceParams p = case_params(1);
  const PlanarState robot{Vec2(0.1, 0.2), Vec2(0.3, 0.0)};
  const PlanarState obj{robot.pos + rotate_to_world(p.x_d, 0.4), robot.vel};
  const auto a = admittance::desired_accels(robot, obj, 0.4, 0.0, 0.4, Vec2::Zero(), p);
  EXPECT_LT(a.a_c.norm(), 1e-12);
  EXPECT_LT(a.a_b.norm(), 1e-12);
  EXPECT_NEAR(a.alpha_b, 0.0, 1e-15);
}

TEST(DesiredAccels, ForceOnlyTerm) {
  const ComplianceParams p = case_params(3);
  const PlanarState robot;
  const PlanarState obj{p.x_d, Vec2::Zero()};
  const auto a = admittance::desired_accels(robot, obj, 0.0, 0.0, 0.0, Vec2(10.0, 0.0), p);
  EXPECT_NEAR(a.a_b.x(), 10.0 / p.m_b, 1e-12);
  EXPECT_NEAR(a.a_b.y(), 0.0, 1e-12);
  EXPECT_LT(a.a_c.norm(), 1e-12);
}

TEST(DesiredAccels, YawSpring) {
  ComplianceParams p;
  const auto a = admittance::desired_accels(PlanarState{}, PlanarState{p.x_d, Vec2::Zero()}, 0.1,
                                            0.2, 0.3, Vec2::Zero(), p);
  EXPECT_NEAR(a.alpha_b, p.k_b_P * 0.2 - p.k_b_D * 0.2, 1e-12);
}

}  // namespace
}  // namespace cotransport
