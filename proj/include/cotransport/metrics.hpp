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

// Balance and collaboration metrics.

#ifndef COTRANSPORT_METRICS_HPP_
#define COTRANSPORT_METRICS_HPP_

#include <span>
#include <vector>

#include "cotransport/types.hpp"

namespace cotransport::metrics {

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

struct EffortWindow {
  double w = 7.67;          // [s]
  double stride = 0.01534;  // [s]

  void validate() const;
};

struct ForceSample {
  double t = 0.0;
  Vec2 F_h = Vec2::Zero();  // leader force on the object
  Vec2 F_r = Vec2::Zero();  // robot force on the object
  Vec2 v_b = Vec2::Zero();  // object velocity
};

struct EfficiencyPoint {
  double t = 0.0;  // window end
  double eta = 1.0;
  double E_n = 0.0;
  double E_s = 0.0;
};

struct VerticalSample {
  double t = 0.0;
  double f_z_robot = 0.0;
  double f_z_human = 0.0;
};

/// Windows whose total effort falls below this are reported as eta = 1.
inline constexpr double kPowerFloor = 1e-6;

/// Capture point of the force-shifted pendulum relative to the stance foot,
/// in the stance-local frame. F_ext is the hand force acting on the robot.
Vec2 modified_capture_point_offset(const PlanarState& robot, const FootPose& foot,
                                   const Vec2& F_ext, double m_c, double omega0);

/// Sliding-window efficiency E_n / E_s by trapezoidal quadrature. Windows
/// start at t0 + j * stride and must fit inside the record. Serial reference.
std::vector<EfficiencyPoint> efficiency(std::span<const ForceSample> samples,
                                        const EffortWindow& window);

/// Same result as efficiency(), windows evaluated in parallel with OpenMP.
std::vector<EfficiencyPoint> efficiency_parallel(std::span<const ForceSample> samples,
                                                 const EffortWindow& window);

double mean_efficiency(std::span<const EfficiencyPoint> points);

/// Keeps only the component along each sample's forward axis.
std::vector<ForceSample> forward_projection(std::span<const ForceSample> samples,
                                            std::span<const double> headings);

struct LoadSharePoint {
  double t = 0.0;
  double robot_fraction = 0.0;
};

std::vector<LoadSharePoint> load_share_series(std::span<const VerticalSample> samples);

}  // namespace cotransport::metrics

#endif  // COTRANSPORT_METRICS_HPP_
