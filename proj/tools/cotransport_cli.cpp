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

// Command-line front end: run a scenario, run the bundled suite, serve the
// live loop, or recompute metrics from a tick log.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cotransport/live_server.hpp"
#include "cotransport/metrics.hpp"
#include "cotransport/scenario.hpp"
#include "cotransport/sim.hpp"

namespace {

namespace cs = cotransport::sim;
namespace fs = std::filesystem;

cotransport::live::LiveServer* g_server = nullptr;

void on_signal(int) {
  // stop() joins threads; hand it to a detached helper to stay signal-safe enough.
  if (g_server != nullptr) std::thread([] { g_server->stop(); }).detach();
}

void print_summary_row(const cs::RunSummary& s) {
  std::printf("%-18s case %d  eta %.3f (fwd %.3f)  |eps| %.3f/%.3f  settle %s  %s\n",
              s.scenario.c_str(), s.compliance_case, s.eta_mean, s.eta_mean_forward,
              s.max_abs_eps_x, s.max_abs_eps_y,
              s.settling_time ? std::to_string(*s.settling_time).c_str() : "never",
              s.fault ? s.fault->c_str() : "ok");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar human-humanoid co-transport simulator"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir;
  std::optional<int> case_override;
  std::optional<std::uint64_t> seed_override;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("scenario", scenario_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run->add_option("--case", case_override, "Compliance case 1..4")->check(CLI::Range(1, 4));
  run->add_option("--seed", seed_override, "Random seed");

  std::string suite_out = "out/suite";
  bool serial = false;
  auto* suite = app.add_subcommand("suite", "Run all bundled scenarios");
  suite->add_option("--out", suite_out, "Output root directory");
  suite->add_flag("--serial", serial, "Run scenarios one after another");

  std::string export_dir;
  auto* scen = app.add_subcommand("scenarios", "Write the bundled scenarios as JSON files");
  scen->add_option("dir", export_dir, "Destination directory")->required();

  cotransport::live::LiveConfig live;
  auto* serve = app.add_subcommand("serve", "Run the live loop for a leader client");
  serve->add_option("--port", live.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", live.bind_address, "Bind address");
  serve->add_option("--hz", live.broadcast_hz, "State broadcast rate");

  std::string log_file, metrics_out;
  bool forward = false;
  auto* met = app.add_subcommand("metrics", "Recompute the metrics CSV from a tick log");
  met->add_option("log", log_file, "ticks.csv written by run/suite")->required()->check(CLI::ExistingFile);
  met->add_option("--out", metrics_out, "Output file (default stdout)");
  met->add_flag("--forward", forward, "Use the forward-projected force variant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cs::Scenario s = cs::load_scenario(scenario_file);
      if (case_override) s.compliance_case = *case_override;
      if (seed_override) s.seed = *seed_override;
      s.validate();
      if (out_dir.empty()) out_dir = (fs::path("out") / s.name).string();
      const cs::RunResult r = cs::run_scenario(s);
      cs::write_outputs(out_dir, r);
      std::cout << cs::summary_to_json(r.summary) << '\n';
      return r.summary.fault ? 2 : 0;
    }
    if (*suite) {
      const auto scenarios = cs::bundled_suite();
      const auto results = serial ? cs::run_suite(scenarios) : cs::run_suite_parallel(scenarios);
      int faults = 0;
      for (const cs::RunResult& r : results) {
        cs::write_outputs((fs::path(suite_out) / r.summary.scenario).string(), r);
        print_summary_row(r.summary);
        faults += r.summary.planner_faults;
      }
      return faults > 0 ? 2 : 0;
    }
    if (*scen) {
      fs::create_directories(export_dir);
      for (const cs::Scenario& s : cs::bundled_suite()) {
        std::ofstream f(fs::path(export_dir) / (s.name + ".json"));
        f << cs::scenario_to_json(s) << '\n';
      }
      return 0;
    }
    if (*serve) {
      cotransport::live::LiveServer server(cotransport::live::idle_scenario(), cs::SimConfig{},
                                           live);
      server.start();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::fprintf(stderr, "serving on %s:%d\n", live.bind_address.c_str(), server.port());
      server.wait();
      g_server = nullptr;
      return 0;
    }
    if (*met) {
      std::ifstream in(log_file);
      const cs::SimLog log = cs::read_tick_csv(in);
      auto samples = cs::force_samples(log);
      if (forward) {
        std::vector<double> headings;
        for (const auto& r : log.ticks) headings.push_back(r.stance.heading);
        samples = cotransport::metrics::forward_projection(samples, headings);
      }
      const auto eta = cotransport::metrics::efficiency(samples, cotransport::metrics::EffortWindow{});
      if (metrics_out.empty()) {
        cs::write_metrics_csv(std::cout, log, eta);
      } else {
        std::ofstream f(metrics_out);
        cs::write_metrics_csv(f, log, eta);
      }
      std::fprintf(stderr, "mean eta %.6f over %zu windows\n",
                   cotransport::metrics::mean_efficiency(eta), eta.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
