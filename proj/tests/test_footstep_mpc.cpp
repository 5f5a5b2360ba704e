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

#include "cotransport/footstep_mpc.hpp"
#include "mpc_oracle.hpp"

namespace cotransport::mpc {
namespace {

TEST(FootRegion, DirectEvaluation) {
  GaitConfig cfg;
  const FootPose stance{Vec2::Zero(), 0.0, FootSide::Right};
  const FootRegion r = feasible_region(stance, cfg);
  EXPECT_TRUE(r.contains(stance.pos, Vec2(0.2, 0.15)));
  EXPECT_FALSE(r.contains(stance.pos, stance.pos));
  EXPECT_FALSE(r.contains(stance.pos, Vec2(cfg.l_x + 0.01, 0.2)));
  EXPECT_NEAR(r.violation(stance.pos, Vec2(cfg.l_x + 0.01, 0.2)), 0.01, 1e-12);
  // Left stance mirrors the lateral band.
  const FootRegion l = feasible_region(FootPose{Vec2::Zero(), 0.0, FootSide::Left}, cfg);
  EXPECT_TRUE(l.contains(Vec2::Zero(), Vec2(0.2, -0.15)));
  EXPECT_FALSE(l.contains(Vec2::Zero(), Vec2(0.2, 0.15)));
}

TEST(FootRegion, RotatesWithHeading) {
  GaitConfig cfg;
  const FootPose stance{Vec2(1.0, 1.0), std::numbers::pi / 2, FootSide::Right};
  const FootRegion r = feasible_region(stance, cfg);
  // Forward is +y in the world, the left foot lands on -x.
  EXPECT_TRUE(r.contains(stance.pos, stance.pos + Vec2(-0.2, 0.3)));
  EXPECT_FALSE(r.contains(stance.pos, stance.pos + Vec2(0.2, 0.3)));
}

struct InPlace {
  PlanarState robot;
  PlanarState object;
  admittance::GoalSet goals;
  FootPose stance{Vec2(0.0, -0.1), 0.0, FootSide::Right};
  ComplianceParams params;
  GaitConfig cfg;

  InPlace() {
    apply_case(params, 3);
    robot = PlanarState{Vec2::Zero(), Vec2::Zero()};
    object = PlanarState{params.x_d, Vec2::Zero()};
    goals = admittance::build_goal_set(robot, object, IntentEstimate{}, 0.0, params, cfg);
  }
};

TEST(FootstepMpc, InPlaceGaitAlternatesWithoutProgress) {
  InPlace s;
  const FootPlan plan = solve_footstep_plan(s.robot, s.object, Vec2::Zero(), s.goals, s.stance,
                                            s.params, MpcWeights{}, s.cfg);
  ASSERT_EQ(static_cast<int>(plan.steps.size()), s.cfg.N);
  FootPose prev = s.stance;
  for (const FootPose& f : plan.steps) {
    EXPECT_NE(f.side, prev.side);
    EXPECT_LT(std::abs(f.pos.x() - prev.pos.x()), 1e-3);
    EXPECT_GE(std::abs(f.pos.y() - prev.pos.y()), s.cfg.d_f - 1e-7);
    EXPECT_TRUE(feasible_region(prev, s.cfg).contains(prev.pos, f.pos, 1e-7));
    prev = f;
  }
}

// From rest, a far goal is reached by stepping behind the CoM; the reach
// limit binds and the predicted CoM moves forward every step.
TEST(FootstepMpc, FarGoalSaturatesReach) {
  InPlace s;
  for (Vec2& g : s.goals.com_goals) g = Vec2(10.0, 0.0);
  const FootPlan plan = solve_footstep_plan(s.robot, s.object, Vec2::Zero(), s.goals, s.stance,
                                            s.params, MpcWeights{}, s.cfg);
  bool saturated = false;
  FootPose prev = s.stance;
  double com_x = s.robot.pos.x();
  for (std::size_t j = 0; j < plan.steps.size(); ++j) {
    const double dx = plan.steps[j].pos.x() - prev.pos.x();
    EXPECT_LE(std::abs(dx), s.cfg.l_x + 1e-7);
    saturated |= std::abs(std::abs(dx) - s.cfg.l_x) < 1e-6;
    EXPECT_GE(plan.predicted_com[j].pos.x(), com_x - 1e-9);
    com_x = plan.predicted_com[j].pos.x();
    prev = plan.steps[j];
  }
  EXPECT_TRUE(saturated);
  EXPECT_GT(com_x, 0.3);
}

TEST(FootstepMpc, PredictedComFollowsStepMap) {
  InPlace s;
  s.robot.vel = Vec2(0.2, 0.05);
  const FootPlan plan = solve_footstep_plan(s.robot, s.object, Vec2(0.1, 0.0), s.goals, s.stance,
                                            s.params, MpcWeights{}, s.cfg);
  PlanarState X = s.robot;
  for (int j = 0; j < s.cfg.N; ++j) {
    ilip::IlipStepInput in{X,          s.object.pos + Vec2(0.1, 0.0) * s.cfg.T * j,
                           Vec2(0.1, 0.0), plan.steps[j], s.params.K_t, s.params.B, s.cfg.T};
    X = ilip::ilip_step_map(in, s.params.x_d, s.params.m_c, s.cfg);
    EXPECT_LT((X.pos - plan.predicted_com[j].pos).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((X.vel - plan.predicted_com[j].vel).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(FootstepMpc, OneStepMatchesGridSearch) {
  std::mt19937_64 rng(31);
  const double cell = 0.002;
  for (int k = 0; k < 10; ++k) {
    const oracle::MpcCase c = oracle::random_mpc_case(rng);
    const FootPlan plan = solve_footstep_plan(c.robot, c.object, c.v_b_d, c.goals, c.stance,
                                              c.params, c.weights, c.cfg);
    const oracle::GridResult g = oracle::grid_search(c, cell);
    const double n = c.stance.side == FootSide::Right ? 1.0 : -1.0;
    const Vec2 local = rotate_to_local(plan.steps[0].pos - c.stance.pos, c.stance.heading);
    EXPECT_LE(std::abs(local.x() - g.local.x()), cell + 1e-9) << "case " << k;
    EXPECT_LE(std::abs(n * local.y() - g.local.y()), cell + 1e-9) << "case " << k;
    // The QP never does worse than the best grid node.
    EXPECT_LE(oracle::one_step_cost(c, plan.steps[0].pos), g.cost + 1e-9);
  }
}

TEST(FootstepMpc, GoalLengthMismatchThrows) {
  InPlace s;
  s.goals.com_goals.pop_back();
  EXPECT_THROW(assemble_mpc(s.robot, s.object, Vec2::Zero(), s.goals, s.stance, s.params,
                            MpcWeights{}, s.cfg),
               qp::DimensionMismatch);
}

TEST(FootstepMpc, WeightValidation) {
  MpcWeights w;
  w.phi1 = 0.0;
  w.phi2 = 0.0;
  EXPECT_THROW(w.validate(), InvalidArgument);
  w.phi1 = -1.0;
  EXPECT_THROW(w.validate(), InvalidArgument);
}

TEST(FootstepMpc, WarmStartedPlannerAgrees) {
  InPlace s;
  FootstepPlanner planner(MpcWeights{}, s.cfg);
  const FootPlan a = planner.plan(s.robot, s.object, Vec2::Zero(), s.goals, s.stance, s.params);
  const FootPlan b = planner.plan(s.robot, s.object, Vec2::Zero(), s.goals, s.stance, s.params);
  for (int j = 0; j < s.cfg.N; ++j) {
    EXPECT_LT((a.steps[j].pos - b.steps[j].pos).norm(), 1e-8);
  }
}

}  // namespace
}  // namespace cotransport::mpc
