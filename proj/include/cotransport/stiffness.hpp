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

// Online adaptation of the I-LIP forward spring toward the desired
// robot-to-object separation.

#ifndef COTRANSPORT_STIFFNESS_HPP_
#define COTRANSPORT_STIFFNESS_HPP_

#include "cotransport/types.hpp"

namespace cotransport::stiffness {

struct ModulationGains {
  double k_x1 = 0.01;  // per metre of separation error, per tick
  double b_x1 = 0.005; // per m/s of separation rate, per tick
  double K_min = 5.0;
  double K_max = 1000.0;

  void validate() const;
};

/// One tick of K <- clamp(K - k_x1 e - b_x1 edot, K_min, K_max), where e is
/// the stance-local forward separation minus x_d_x.
double update_stiffness(double K_x, const PlanarState& robot, const PlanarState& object,
                        double heading, double x_d_x, const ModulationGains& gains);

}  // namespace cotransport::stiffness

#endif  // COTRANSPORT_STIFFNESS_HPP_
