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

#include "cotransport/stiffness.hpp"

#include <algorithm>

namespace cotransport::stiffness {

void ModulationGains::validate() const {
  if (k_x1 < 0.0 || b_x1 < 0.0) throw InvalidArgument("modulation gains must be >= 0");
  if (!(K_min > 0.0 && K_min <= K_max)) throw InvalidArgument("modulation: need 0 < K_min <= K_max");
}

double update_stiffness(double K_x, const PlanarState& robot, const PlanarState& object,
                        double heading, double x_d_x, const ModulationGains& gains) {
  const HeadingRotation R(heading);
  const double e = R.to_local(object.pos - robot.pos).x() - x_d_x;
  const double e_dot = R.to_local(object.vel - robot.vel).x();
  return std::clamp(K_x - gains.k_x1 * e - gains.b_x1 * e_dot, gains.K_min, gains.K_max);
}

}  // namespace cotransport::stiffness
