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

// Receding-horizon footstep planner over the I-LIP step maps.

#ifndef COTRANSPORT_FOOTSTEP_MPC_HPP_
#define COTRANSPORT_FOOTSTEP_MPC_HPP_

#include <optional>
#include <vector>

#include "cotransport/admittance.hpp"
#include "cotransport/qp.hpp"
#include "cotransport/types.hpp"

namespace cotransport::mpc {

class PlannerInfeasible : public Error {
 public:
  using Error::Error;
};

struct MpcWeights {
  Vec2 K_phi{10.0, 10.0};  // goal tracking, stance-local
  Vec2 B_phi{1.0, 1.0};    // CoM-to-foot regulation, stance-local
  double phi1 = 1.0;
  double phi2 = 3.0;
  /// Velocity tracking against the admittance rollout. Zero drops the term.
  double phi3 = 0.0;

  void validate() const;
};

/// Two-sided bounds on the stance-local displacement of the next foot:
///   lower <= rows * (u_next - prev.pos) <= upper.
/// Row 0 is the forward reach, row 1 the signed lateral placement.
struct FootRegion {
  Eigen::Matrix2d rows;
  Vec2 lower;
  Vec2 upper;

  /// Largest violation of the region by a candidate foothold (<= 0 inside).
  double violation(const Vec2& prev, const Vec2& candidate) const;
  bool contains(const Vec2& prev, const Vec2& candidate, double tol = 0.0) const {
    return violation(prev, candidate) <= tol;
  }
};

FootRegion feasible_region(const FootPose& prev, const GaitConfig& cfg);

struct FootPlan {
  std::vector<FootPose> steps;
  std::vector<PlanarState> predicted_com;
  int qp_iterations = 0;
};

/// Index layout of the decision vector: stage j occupies
/// [6j, 6j+4) for X_{k+j+1} = (x, y, vx, vy) and [6j+4, 6j+6) for u_{k+j}.
inline int state_index(int stage) { return 6 * stage; }
inline int foot_index(int stage) { return 6 * stage + 4; }

/// Builds the footstep QP. `robot` is the CoM state at the start of the first
/// planned step, `stance` the foot it pushes off from, `object` the object
/// state at the same instant. The equality rows are the affine I-LIP maps;
/// headings are fixed from the goal set so the problem stays convex.
qp::QpProblem assemble_mpc(const PlanarState& robot, const PlanarState& object, const Vec2& v_b_d,
                           const admittance::GoalSet& goals, const FootPose& stance,
                           const ComplianceParams& params, const MpcWeights& weights,
                           const GaitConfig& cfg);

FootPlan solve_footstep_plan(const PlanarState& robot, const PlanarState& object,
                             const Vec2& v_b_d, const admittance::GoalSet& goals,
                             const FootPose& stance, const ComplianceParams& params,
                             const MpcWeights& weights, const GaitConfig& cfg,
                             const qp::WarmStart* warm = nullptr, qp::QpSolution* raw = nullptr);

/// Keeps the previous solution around to warm-start the next replan.
class FootstepPlanner {
 public:
  FootstepPlanner(MpcWeights weights, GaitConfig cfg) : weights_(weights), cfg_(cfg) {}

  FootPlan plan(const PlanarState& robot, const PlanarState& object, const Vec2& v_b_d,
                const admittance::GoalSet& goals, const FootPose& stance,
                const ComplianceParams& params);

  const MpcWeights& weights() const { return weights_; }
  void reset() { warm_.reset(); }

 private:
  MpcWeights weights_;
  GaitConfig cfg_;
  std::optional<qp::WarmStart> warm_;
};

}  // namespace cotransport::mpc

#endif  // COTRANSPORT_FOOTSTEP_MPC_HPP_
