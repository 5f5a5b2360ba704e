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
#include <vector>

#include "cotransport/metrics.hpp"
#include "cotransport/stiffness.hpp"

namespace cotransport {
namespace {

using metrics::EffortWindow;
using metrics::ForceSample;

std::vector<ForceSample> record(double duration, double dt,
                                const std::function<ForceSample(double)>& at) {
  std::vector<ForceSample> out;
  const long n = std::lround(duration / dt);
  for (long i = 0; i <= n; ++i) {
    ForceSample s = at(i * dt);
    s.t = i * dt;
    out.push_back(s);
  }
  return out;
}

TEST(CapturePoint, ZeroForceIsClassic) {
  const PlanarState r{Vec2(0.3, 0.1), Vec2(0.4, -0.2)};
  const FootPose foot{Vec2(0.1, 0.0), 0.0, FootSide::Left};
  const double w = 3.3;
  const Vec2 e = metrics::modified_capture_point_offset(r, foot, Vec2::Zero(), 45.0, w);
  EXPECT_LT((e - (r.pos + r.vel / w - foot.pos)).norm(), 1e-14);
}

TEST(CapturePoint, ForceShiftedEquilibrium) {
  const double m = 45.0, w = 3.3;
  const Vec2 F(12.0, -4.0);
  const FootPose foot{Vec2(0.2, 0.3), 0.7, FootSide::Right};
  const PlanarState r{foot.pos - F / (m * w * w), Vec2::Zero()};
  EXPECT_LT(metrics::modified_capture_point_offset(r, foot, F, m, w).norm(), 1e-14);
}

TEST(CapturePoint, HandEvaluation) {
  // gamma = x + F/(m w^2), xi = gamma + xdot/w, local = R^T (xi - u)
  const PlanarState r{Vec2(1.0, 2.0), Vec2(0.5, 0.25)};
  const FootPose foot{Vec2(0.8, 1.9), std::numbers::pi / 2, FootSide::Right};
  const double m = 40.0, w = 2.0;
  const Vec2 F(16.0, 32.0);
  // gamma = (1.1, 2.2), xi = (1.35, 2.325), xi - u = (0.55, 0.425)
  const Vec2 e = metrics::modified_capture_point_offset(r, foot, F, m, w);
  EXPECT_NEAR(e.x(), 0.425, 1e-12);
  EXPECT_NEAR(e.y(), -0.55, 1e-12);
}

TEST(Efficiency, SingleAgentIsOne) {
  const auto s = record(10.0, 0.01, [](double t) {
    return ForceSample{0.0, Vec2(5.0 * std::sin(t), 1.0), Vec2::Zero(), Vec2(std::cos(t), 0.2)};
  });
  for (const auto& p : metrics::efficiency(s, EffortWindow{})) EXPECT_NEAR(p.eta, 1.0, 1e-12);
}

TEST(Efficiency, PerfectOppositionIsZero) {
  const auto s = record(10.0, 0.01, [](double t) {
    const Vec2 F(3.0 + std::sin(t), 1.0);
    return ForceSample{0.0, F, -F, Vec2(0.3, 0.1 * std::cos(t))};
  });
  for (const auto& p : metrics::efficiency(s, EffortWindow{})) {
    EXPECT_NEAR(p.E_n, 0.0, 1e-12);
    EXPECT_NEAR(p.eta, 0.0, 1e-12);
  }
}

TEST(Efficiency, NoMotionReportsOne) {
  const auto s = record(9.0, 0.01, [](double) {
    return ForceSample{0.0, Vec2(5.0, 0.0), Vec2(-5.0, 0.0), Vec2::Zero()};
  });
  for (const auto& p : metrics::efficiency(s, EffortWindow{})) EXPECT_EQ(p.eta, 1.0);
}

TEST(Efficiency, ConstantPowerClosedForm) {
  // F_h.v = 2, F_r.v = -1 everywhere: E_n = w, E_s = 3 w.
  const auto s = record(10.0, 0.01, [](double) {
    return ForceSample{0.0, Vec2(2.0, 0.0), Vec2(-1.0, 0.0), Vec2(1.0, 0.0)};
  });
  const EffortWindow win{2.0, 0.5};
  const auto pts = metrics::efficiency(s, win);
  ASSERT_EQ(pts.size(), 17u);
  for (const auto& p : pts) {
    EXPECT_NEAR(p.E_n, 2.0, 1e-12);
    EXPECT_NEAR(p.E_s, 6.0, 1e-12);
    EXPECT_NEAR(p.eta, 1.0 / 3.0, 1e-12);
  }
}

TEST(Efficiency, BoundedOnRandomRecords) {
  std::mt19937_64 rng(1000);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<ForceSample> s;
    for (int i = 0; i < 40; ++i) {
      s.push_back(ForceSample{0.05 * i, 20.0 * Vec2(g(rng), g(rng)), 20.0 * Vec2(g(rng), g(rng)),
                              Vec2(g(rng), g(rng))});
    }
    for (const auto& p : metrics::efficiency(s, EffortWindow{1.0, 0.25})) {
      ASSERT_GE(p.E_n, 0.0);
      ASSERT_LE(p.E_n, p.E_s * (1.0 + 1e-12));
      ASSERT_GE(p.eta, 0.0);
      ASSERT_LE(p.eta, 1.0);
    }
  }
}

TEST(Efficiency, ParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ForceSample> s;
  for (int i = 0; i < 20000; ++i) {
    s.push_back(ForceSample{1e-3 * i, Vec2(g(rng), g(rng)), Vec2(g(rng), g(rng)),
                            Vec2(g(rng), g(rng))});
  }
  const auto a = metrics::efficiency(s, EffortWindow{});
  const auto b = metrics::efficiency_parallel(s, EffortWindow{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].eta, b[i].eta);
    EXPECT_EQ(a[i].E_s, b[i].E_s);
  }
}

TEST(Efficiency, ShortRecordThrows) {
  const auto s = record(1.0, 0.01, [](double) { return ForceSample{}; });
  EXPECT_THROW(metrics::efficiency(s, EffortWindow{}), metrics::EmptyWindow);
  EXPECT_THROW(metrics::mean_efficiency({}), metrics::EmptyWindow);
  EXPECT_THROW((EffortWindow{1.0, 2.0}.validate()), InvalidArgument);
}

TEST(Efficiency, ForwardProjectionDropsLateral) {
  std::vector<ForceSample> s{{0.0, Vec2(1.0, 5.0), Vec2(-1.0, 3.0), Vec2(0.0, 2.0)}};
  const std::vector<double> h{std::numbers::pi / 2};
  const auto p = metrics::forward_projection(s, h);
  EXPECT_NEAR(p[0].F_h.x(), 5.0, 1e-12);
  EXPECT_NEAR(p[0].v_b.x(), 2.0, 1e-12);
  EXPECT_EQ(p[0].F_h.y(), 0.0);
}

TEST(LoadShare, Fractions) {
  std::vector<metrics::VerticalSample> v{{0.0, 1.0, 1.0}, {0.1, 2.0, 0.0}, {0.2, 0.55, 0.45}};
  const auto s = metrics::load_share_series(v);
  EXPECT_DOUBLE_EQ(s[0].robot_fraction, 0.5);
  EXPECT_DOUBLE_EQ(s[1].robot_fraction, 1.0);
  EXPECT_DOUBLE_EQ(s[2].robot_fraction, 0.55);
}

TEST(Stiffness, UpdateLaw) {
  stiffness::ModulationGains g;
  g.k_x1 = 20.0;
  g.b_x1 = 5.0;
  const PlanarState r;
  // Zero error leaves K alone.
  EXPECT_DOUBLE_EQ(stiffness::update_stiffness(100.0, r, PlanarState{Vec2(0.6, 0.0), Vec2::Zero()},
                                               0.0, 0.6, g),
                   100.0);
  // e = +0.05 with k_x1 = 20 lowers K by 1.
  EXPECT_NEAR(stiffness::update_stiffness(100.0, r, PlanarState{Vec2(0.65, 0.0), Vec2::Zero()},
                                          0.0, 0.6, g),
              99.0, 1e-12);
  // Clamped at K_max.
  EXPECT_DOUBLE_EQ(stiffness::update_stiffness(g.K_max, r,
                                               PlanarState{Vec2(0.4, 0.0), Vec2(-1.0, 0.0)}, 0.0,
                                               0.6, g),
                   g.K_max);
  // The separation is read in the stance frame.
  EXPECT_NEAR(stiffness::update_stiffness(100.0, r, PlanarState{Vec2(0.0, 0.65), Vec2::Zero()},
                                          std::numbers::pi / 2, 0.6, g),
              99.0, 1e-12);
  g.K_min = 0.0;
  EXPECT_THROW(g.validate(), InvalidArgument);
}

}  // namespace
}  // namespace cotransport
