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

#include "cotransport/types.hpp"

#include <string>

namespace cotransport {

double normalize_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, kTwoPi);
  // fmod keeps the sign of theta; fold into (-pi, pi].
  if (r <= -std::numbers::pi) {
    r += kTwoPi;
  } else if (r > std::numbers::pi) {
    r -= kTwoPi;
  }
  return r;
}

Vec2 rotate_to_local(const Vec2& v, double theta) { return HeadingRotation(theta).to_local(v); }

Vec2 rotate_to_world(const Vec2& v, double theta) { return HeadingRotation(theta).to_world(v); }

void GaitConfig::validate() const {
  if (!(T > 0.0)) throw InvalidArgument("gait: T must be positive");
  if (!(h > 0.0)) throw InvalidArgument("gait: h must be positive");
  if (!(g > 0.0)) throw InvalidArgument("gait: g must be positive");
  if (!(l_x > 0.0)) throw InvalidArgument("gait: l_x must be positive");
  if (!(l_y > d_f && d_f > 0.0)) throw InvalidArgument("gait: need l_y > d_f > 0");
  if (z_cl < 0.0) throw InvalidArgument("gait: z_cl must be non-negative");
  if (N < 1) throw InvalidArgument("gait: N must be at least 1");
  if (!(dt > 0.0)) throw InvalidArgument("gait: dt must be positive");
  const double ratio = T / dt;
  if (std::abs(ratio - std::round(ratio)) * dt > 1e-9) {
    throw InvalidArgument("gait: dt must divide T");
  }
}

void ComplianceParams::validate() const {
  for (const Vec2* v : {&K_a, &B_a, &K_h, &B_h, &K_t, &B}) {
    if (!v->allFinite() || (v->array() < 0.0).any()) {
      throw InvalidArgument("compliance: stiffness/damping entries must be finite and >= 0");
    }
  }
  if (k_theta_P < 0.0 || k_theta_D < 0.0 || k_b_P < 0.0 || k_b_D < 0.0) {
    throw InvalidArgument("compliance: yaw gains must be >= 0");
  }
  if (!(m_c > 0.0) || !(m_b > 0.0)) throw InvalidArgument("compliance: masses must be positive");
  if (!x_d.allFinite()) throw InvalidArgument("compliance: x_d must be finite");
}

ComplianceCase compliance_case(int index) {
  switch (index) {
    case 1: return {Compliance::Low, Compliance::Low};
    case 2: return {Compliance::High, Compliance::High};
    case 3: return {Compliance::Low, Compliance::High};
    case 4: return {Compliance::High, Compliance::Low};
    default: throw InvalidArgument("compliance case must be in 1..4, got " + std::to_string(index));
  }
}

void apply_case(ComplianceParams& params, int index) {
  const ComplianceCase c = compliance_case(index);
  const CompliancePreset planner = preset(c.planner);
  const CompliancePreset hands = preset(c.hands);
  // planner presets are per unit mass
  params.K_a = Vec2::Constant(planner.K * params.m_c);
  params.B_a = Vec2::Constant(planner.B * params.m_c);
  params.K_h = Vec2::Constant(hands.K);
  params.B_h = Vec2::Constant(hands.B);
  params.B = params.B_h;
  params.K_t = params.K_h;
}

void IntentEstimate::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0)) {
    throw InvalidArgument("intent: smoothing factors must lie in (0, 1]");
  }
}

}  // namespace cotransport
