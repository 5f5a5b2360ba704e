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

// Serial vs OpenMP kernels, plus the per-step planner cost.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cotransport/admittance.hpp"
#include "cotransport/footstep_mpc.hpp"
#include "cotransport/metrics.hpp"
#include "cotransport/sim.hpp"

namespace ct = cotransport;

namespace {

std::vector<ct::metrics::ForceSample> force_trace(int n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ct::metrics::ForceSample> s;
  s.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = 1e-3 * i;
    s.push_back({t, ct::Vec2(20.0 + g(rng), g(rng)), ct::Vec2(5.0 * std::sin(t), g(rng)),
                 ct::Vec2(0.5 + 0.1 * std::cos(t), 0.0)});
  }
  return s;
}

void BM_Efficiency(benchmark::State& st) {
  const auto s = force_trace(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(ct::metrics::efficiency(s, {}));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_EfficiencyParallel(benchmark::State& st) {
  const auto s = force_trace(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(ct::metrics::efficiency_parallel(s, {}));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

std::vector<ct::sim::Scenario> short_suite() {
  auto suite = ct::sim::bundled_suite();
  for (auto& s : suite) s.duration = 5.0;
  return suite;
}

void BM_Suite(benchmark::State& st) {
  const auto suite = short_suite();
  for (auto _ : st) benchmark::DoNotOptimize(ct::sim::run_suite(suite));
}

void BM_SuiteParallel(benchmark::State& st) {
  const auto suite = short_suite();
  for (auto _ : st) benchmark::DoNotOptimize(ct::sim::run_suite_parallel(suite));
}

void BM_FootstepPlan(benchmark::State& st) {
  ct::GaitConfig cfg;
  ct::ComplianceParams p;
  ct::apply_case(p, 3);
  const ct::PlanarState robot{ct::Vec2::Zero(), ct::Vec2(0.3, 0.05)};
  const ct::PlanarState object{p.x_d, ct::Vec2(0.3, 0.0)};
  const auto goals =
      ct::admittance::build_goal_set(robot, object, ct::IntentEstimate{}, 0.0, p, cfg);
  const ct::FootPose stance{ct::Vec2(0.0, -0.1), 0.0, ct::FootSide::Right};
  for (auto _ : st) {
    benchmark::DoNotOptimize(ct::mpc::solve_footstep_plan(robot, object, ct::Vec2(0.3, 0.0),
                                                          goals, stance, p, {}, cfg));
  }
}

}  // namespace

BENCHMARK(BM_Efficiency)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EfficiencyParallel)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Suite)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_SuiteParallel)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_FootstepPlan)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
