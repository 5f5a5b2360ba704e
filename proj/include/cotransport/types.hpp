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

// Shared planar types, frames and configuration for the co-transport stack.

#ifndef COTRANSPORT_TYPES_HPP_
#define COTRANSPORT_TYPES_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cotransport {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// Base of every error raised by the stack.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Position and velocity of a point mass in the world frame.
struct PlanarState {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();

  bool finite() const { return pos.allFinite() && vel.allFinite(); }
};

enum class FootSide { Left, Right };

inline FootSide opposite(FootSide s) {
  return s == FootSide::Left ? FootSide::Right : FootSide::Left;
}

inline const char* to_string(FootSide s) { return s == FootSide::Left ? "L" : "R"; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Shortest signed angular difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

struct FootPose {
  Vec2 pos = Vec2::Zero();
  double heading = 0.0;
  FootSide side = FootSide::Right;
};

/// Planar rotation R(theta) mapping stance-local vectors into the world frame.
class HeadingRotation {
 public:
  explicit HeadingRotation(double theta) : theta_(theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    m_ << c, -s, s, c;
  }

  double theta() const { return theta_; }
  const Mat2& matrix() const { return m_; }

  Vec2 to_world(const Vec2& local) const { return m_ * local; }
  Vec2 to_local(const Vec2& world) const { return m_.transpose() * world; }

  /// R diag(k) R^T.
  Mat2 rotate_diagonal(const Vec2& k) const {
    return m_ * k.asDiagonal() * m_.transpose();
  }

 private:
  double theta_;
  Mat2 m_;
};

Vec2 rotate_to_local(const Vec2& v, double theta);
Vec2 rotate_to_world(const Vec2& v, double theta);

struct GaitConfig {
  double T = 0.2;        // step duration [s]
  double h = 0.9;        // CoM height [m]
  double g = 9.81;       // [m/s^2]
  double l_x = 0.35;     // forward reach [m]
  double l_y = 0.4;      // lateral reach [m]
  double d_f = 0.1;      // foot clearance [m]
  double z_cl = 0.08;    // swing apex [m]
  int N = 3;             // horizon [steps]
  double dt = 1e-3;      // low-level tick [s]

  double omega0() const { return std::sqrt(g / h); }
  int ticks_per_step() const { return static_cast<int>(std::lround(T / dt)); }

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

struct ComplianceParams {
  Vec2 K_a{500.0, 500.0};  // high-level admittance stiffness [N/m]
  Vec2 B_a{40.0, 40.0};    // high-level admittance damping [N s/m]
  Vec2 K_h{25.0, 25.0};    // hand-level stiffness
  Vec2 B_h{10.0, 10.0};    // hand-level damping
  Vec2 K_t{100.0, 100.0};  // I-LIP spring; entry 0 is modulated online
  Vec2 B{40.0, 40.0};      // I-LIP damper
  double k_theta_P = 9.0;  // stance-yaw admittance [1/s^2]
  double k_theta_D = 6.0;  // [1/s]
  double k_b_P = 6.0;      // object-yaw admittance [1/s^2]
  double k_b_D = 5.0;      // [1/s]
  Vec2 x_d{0.6, 0.0};      // desired robot-to-object offset, stance-local [m]
  double m_c = 45.0;       // [kg]
  double m_b = 15.0;       // [kg]

  void validate() const;
};

/// Compliance level of one control layer. HIGH compliance is the soft setting.
enum class Compliance { High, Low };

struct CompliancePreset {
  double K;
  double B;
};

inline CompliancePreset preset(Compliance c) {
  return c == Compliance::High ? CompliancePreset{25.0, 10.0} : CompliancePreset{500.0, 40.0};
}

/// The four planner/hand combinations: 1 = low/low, 2 = high/high,
/// 3 = low/high, 4 = high/low (planner first).
struct ComplianceCase {
  Compliance planner;
  Compliance hands;
};

ComplianceCase compliance_case(int index);

/// Writes a case into K_a/B_a (scaled by m_c), K_h/B_h, and sets the I-LIP
/// spring and damper to the hand values.
void apply_case(ComplianceParams& params, int index);

/// Exponential moving-average estimate of the leader's intended motion.
struct IntentEstimate {
  Vec2 v_b_d = Vec2::Zero();
  double theta_b_d = 0.0;
  double alpha = 0.99;
  double beta = 0.99;

  void validate() const;
};

}  // namespace cotransport

#endif  // COTRANSPORT_TYPES_HPP_
