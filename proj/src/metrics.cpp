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

#include "cotransport/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cotransport::metrics {

namespace {

struct Integrands {
  std::vector<double> t;
  std::vector<double> net;    // |(F_h + F_r) . v|
  std::vector<double> total;  // |F_h . v| + |F_r . v|
};

Integrands integrands(std::span<const ForceSample> samples) {
  Integrands out;
  out.t.reserve(samples.size());
  out.net.reserve(samples.size());
  out.total.reserve(samples.size());
  for (const ForceSample& s : samples) {
    out.t.push_back(s.t);
    out.net.push_back(std::abs((s.F_h + s.F_r).dot(s.v_b)));
    out.total.push_back(std::abs(s.F_h.dot(s.v_b)) + std::abs(s.F_r.dot(s.v_b)));
  }
  return out;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& y, std::size_t hi,
                   double at) {
  // t[hi - 1] <= at <= t[hi]
  const double span = t[hi] - t[hi - 1];
  if (span <= 0.0) return y[hi];
  const double w = (at - t[hi - 1]) / span;
  return y[hi - 1] + w * (y[hi] - y[hi - 1]);
}

// Trapezoidal integral of the piecewise-linear interpolant of (t, y) on [a, b].
double integrate(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
  auto first = std::upper_bound(t.begin(), t.end(), a);
  std::size_t i = static_cast<std::size_t>(first - t.begin());
  if (i == 0) i = 1;
  double prev_t = a;
  double prev_y = interpolate(t, y, i, a);
  double sum = 0.0;
  for (; i < t.size() && t[i] < b; ++i) {
    sum += 0.5 * (prev_y + y[i]) * (t[i] - prev_t);
    prev_t = t[i];
    prev_y = y[i];
  }
  const std::size_t hi = std::min(i, t.size() - 1);
  const double end_y = interpolate(t, y, hi, b);
  sum += 0.5 * (prev_y + end_y) * (b - prev_t);
  return sum;
}

long window_count(const Integrands& in, const EffortWindow& window) {
  if (in.t.size() < 2) throw EmptyWindow("efficiency: need at least two samples");
  const double span = in.t.back() - in.t.front();
  if (span + 1e-12 < window.w) throw EmptyWindow("efficiency: record shorter than one window");
  return static_cast<long>(std::floor((span - window.w) / window.stride + 1e-9)) + 1;
}

EfficiencyPoint evaluate_window(const Integrands& in, const EffortWindow& window, long j) {
  const double a = in.t.front() + static_cast<double>(j) * window.stride;
  const double b = std::min(a + window.w, in.t.back());
  EfficiencyPoint p;
  p.t = b;
  p.E_n = integrate(in.t, in.net, a, b);
  p.E_s = integrate(in.t, in.total, a, b);
  p.eta = p.E_s < kPowerFloor ? 1.0 : std::clamp(p.E_n / p.E_s, 0.0, 1.0);
  return p;
}

}  // namespace

void EffortWindow::validate() const {
  if (!(w > stride && stride > 0.0)) throw InvalidArgument("effort window: need w > stride > 0");
}

Vec2 modified_capture_point_offset(const PlanarState& robot, const FootPose& foot,
                                   const Vec2& F_ext, double m_c, double omega0) {
  if (!(omega0 > 0.0)) throw InvalidArgument("capture point: omega0 must be positive");
  const Vec2 gamma = robot.pos + F_ext / (m_c * omega0 * omega0);
  // Force rate taken as zero, so gamma_dot = xdot.
  const Vec2 xi = gamma + robot.vel / omega0;
  return rotate_to_local(xi - foot.pos, foot.heading);
}

std::vector<EfficiencyPoint> efficiency(std::span<const ForceSample> samples,
                                        const EffortWindow& window) {
  window.validate();
  const Integrands in = integrands(samples);
  const long count = window_count(in, window);
  std::vector<EfficiencyPoint> out;
  out.reserve(count);
  for (long j = 0; j < count; ++j) out.push_back(evaluate_window(in, window, j));
  return out;
}

std::vector<EfficiencyPoint> efficiency_parallel(std::span<const ForceSample> samples,
                                                 const EffortWindow& window) {
  window.validate();
  const Integrands in = integrands(samples);
  const long count = window_count(in, window);
  std::vector<EfficiencyPoint> out(count);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < count; ++j) out[j] = evaluate_window(in, window, j);
  return out;
}

double mean_efficiency(std::span<const EfficiencyPoint> points) {
  if (points.empty()) throw EmptyWindow("mean efficiency of an empty series");
  double sum = 0.0;
  for (const EfficiencyPoint& p : points) sum += p.eta;
  return sum / static_cast<double>(points.size());
}

std::vector<ForceSample> forward_projection(std::span<const ForceSample> samples,
                                            std::span<const double> headings) {
  if (samples.size() != headings.size()) {
    throw InvalidArgument("forward_projection: one heading per sample required");
  }
  std::vector<ForceSample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec2 axis(std::cos(headings[i]), std::sin(headings[i]));
    ForceSample s = samples[i];
    s.F_h = Vec2(axis.dot(s.F_h), 0.0);
    s.F_r = Vec2(axis.dot(s.F_r), 0.0);
    s.v_b = Vec2(axis.dot(s.v_b), 0.0);
    out.push_back(s);
  }
  return out;
}

std::vector<LoadSharePoint> load_share_series(std::span<const VerticalSample> samples) {
  std::vector<LoadSharePoint> out;
  out.reserve(samples.size());
  for (const VerticalSample& s : samples) {
    const double total = s.f_z_robot + s.f_z_human;
    if (total <= 0.0) throw InvalidArgument("load share: total vertical force must be positive");
    out.push_back({s.t, s.f_z_robot / total});
  }
  return out;
}

}  // namespace cotransport::metrics
