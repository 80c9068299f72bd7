//
// Copyright 2025 The dpmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpmon: monitors simulated evolving mechanisms for differential-privacy
// violations and reproduces the detection experiments as CSV files.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpmon/errors.hpp"
#include "dpmon/harness.hpp"
#include "dpmon/panel.hpp"
#include "dpmon/threshold.hpp"

namespace {

struct ThresholdCliOptions {
  dpmon::ThresholdRequest request;
  std::string cache_path;  // empty = no cache
  unsigned threads = 0;
};

double resolve_threshold(const ThresholdCliOptions& opts) {
  if (opts.cache_path.empty()) {
    return dpmon::quantile(opts.request, opts.threads);
  }
  return dpmon::cached_quantile(opts.request, opts.cache_path, opts.threads);
}

std::vector<double> parse_real_list(const std::string& csv,
                                    const std::string& what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string token =
        csv.substr(start, comma == std::string::npos ? comma : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "cannot parse '" + token + "' as a real");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::string summary_path_for(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) ==
          0) {
    return out_path.substr(0, out_path.size() - suffix.size()) + ".summary.csv";
  }
  return out_path + ".summary.csv";
}

std::string format_label(double bound) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "le(%g)", bound);
  return buf;
}

void print_scenario_summary(const dpmon::ScenarioResult& summary) {
  std::printf("scenario %s: detect fraction at horizon %.3f, false alarms %.3f",
              summary.scenario_id.c_str(), summary.detection_curve.back(),
              summary.false_alarm_frac);
  if (summary.mean_delay) {
    std::printf(", mean delay %.2f, median delay %.2f", *summary.mean_delay,
                *summary.median_delay);
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential differential-privacy violation monitor"};
  app.require_subcommand(1);

  // Shared experiment knobs (per-subcommand copies).
  struct ExperimentOptions {
    int n = dpmon::kDefaultSampleSize;
    int horizon = dpmon::kDefaultHorizon;
    int reps = dpmon::kDefaultReplications;
    int change_time = dpmon::kDefaultChangeTime;
    double alpha = dpmon::kDefaultAlpha;
    double beta = dpmon::kDefaultBeta;
    double c_stab = dpmon::kDefaultStabilization;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    int grid = dpmon::kDefaultThresholdGrid;
    int mc_reps = dpmon::kDefaultThresholdReps;
    std::uint64_t threshold_seed = dpmon::kDefaultThresholdSeed;
    std::string cache_path = "threshold_cache.txt";
    double q_override = 0.0;
    bool has_q_override = false;
  };

  auto add_threshold_source = [](CLI::App* cmd, ExperimentOptions& opts) {
    cmd->add_option("--c-stab", opts.c_stab,
                    "Variance stabilization floor for sigma_hat")
        ->capture_default_str();
    cmd->add_option("--grid", opts.grid,
                    "Brownian path grid for threshold calibration")
        ->capture_default_str();
    cmd->add_option("--mc-reps", opts.mc_reps,
                    "Monte Carlo replications for threshold calibration")
        ->capture_default_str();
    cmd->add_option("--threshold-seed", opts.threshold_seed,
                    "Seed of the threshold calibration")
        ->capture_default_str();
    cmd->add_option("--cache", opts.cache_path, "Threshold cache file")
        ->capture_default_str();
    cmd->add_option("--q", opts.q_override,
                    "Use this threshold directly, skip calibration");
    cmd->add_option("--threads", opts.threads,
                    "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
  };

  auto member_threshold =
      [](const ExperimentOptions& opts, double alpha) -> double {
    if (opts.has_q_override) return opts.q_override;
    dpmon::ThresholdRequest request;
    request.alpha = alpha;
    request.beta = opts.beta;
    request.grid = opts.grid;
    request.reps = opts.mc_reps;
    request.seed = opts.threshold_seed;
    ThresholdCliOptions cli_opts{request, opts.cache_path, opts.threads};
    return resolve_threshold(cli_opts);
  };

  // --- threshold ---
  ThresholdCliOptions threshold_opts;
  CLI::App* cmd_threshold =
      app.add_subcommand("threshold", "Print the detection threshold q(alpha)");
  cmd_threshold->add_option("--alpha", threshold_opts.request.alpha, "Level")
      ->capture_default_str();
  cmd_threshold->add_option("--beta", threshold_opts.request.beta,
                            "Weight parameter in [0, 1/2)")
      ->capture_default_str();
  cmd_threshold->add_option("--grid", threshold_opts.request.grid,
                            "Brownian path grid points")
      ->capture_default_str();
  cmd_threshold->add_option("--reps", threshold_opts.request.reps,
                            "Monte Carlo replications")
      ->capture_default_str();
  cmd_threshold->add_option("--seed", threshold_opts.request.seed,
                            "Calibration seed")
      ->capture_default_str();
  cmd_threshold->add_option("--cache", threshold_opts.cache_path,
                            "Cache file (computed thresholds are reused)");
  cmd_threshold->add_option("--threads", threshold_opts.threads,
                            "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();

  // --- run ---
  ExperimentOptions run_opts;
  std::string run_scenario = "a";
  std::string run_scenario_file;
  std::string run_out = "results.csv";
  std::string run_summary_out;
  CLI::App* cmd_run = app.add_subcommand(
      "run", "Run one monitored scenario and write per-replication CSV");
  cmd_run->add_option("--scenario", run_scenario, "Built-in scenario id (a..h)")
      ->capture_default_str();
  cmd_run->add_option("--scenario-file", run_scenario_file,
                      "JSON scenario override (see docs/scenario_schema.md)");
  cmd_run->add_option("--n", run_opts.n, "Samples per input per time step")
      ->capture_default_str();
  cmd_run->add_option("--t-horizon", run_opts.horizon, "Monitoring horizon T")
      ->capture_default_str();
  cmd_run->add_option("--reps", run_opts.reps, "Independent replications")
      ->capture_default_str();
  cmd_run->add_option("--alpha", run_opts.alpha, "Level")->capture_default_str();
  cmd_run->add_option("--beta", run_opts.beta, "Weight parameter")
      ->capture_default_str();
  cmd_run->add_option("--seed", run_opts.seed, "Experiment seed")
      ->capture_default_str();
  cmd_run->add_option("--change-time", run_opts.change_time,
                      "Override the built-in scenario change time")
      ->capture_default_str();
  cmd_run->add_option("--out", run_out, "Results CSV path")
      ->capture_default_str();
  cmd_run->add_option("--summary-out", run_summary_out,
                      "Summary CSV path (default: <out>.summary.csv)");
  add_threshold_source(cmd_run, run_opts);

  // --- panel ---
  ExperimentOptions panel_opts;
  std::string panel_base = "laplace-scale";
  std::string panel_events = "-1,-0.5,0,0.5";
  double panel_global_alpha = 0.05;
  bool panel_shared = false;
  std::string panel_out = "panel.csv";
  CLI::App* cmd_panel = app.add_subcommand(
      "panel", "Monitor one mechanism with several events at once");
  cmd_panel
      ->add_option("--scenario-base", panel_base,
                   "Panel base (laplace-scale: Laplace noise scale 1 -> 0.9)")
      ->capture_default_str();
  cmd_panel
      ->add_option("--events", panel_events,
                   "Comma-separated half-line bounds, one member per bound")
      ->capture_default_str();
  cmd_panel->add_option("--global-alpha", panel_global_alpha,
                        "Panel-wide level (split across members)")
      ->capture_default_str();
  cmd_panel->add_flag("--shared-batches", panel_shared,
                      "Members share the sample batches at each time step");
  cmd_panel->add_option("--n", panel_opts.n, "Samples per input per time step")
      ->capture_default_str();
  cmd_panel->add_option("--t-horizon", panel_opts.horizon, "Monitoring horizon")
      ->capture_default_str();
  cmd_panel->add_option("--reps", panel_opts.reps, "Independent replications")
      ->capture_default_str();
  cmd_panel->add_option("--beta", panel_opts.beta, "Weight parameter")
      ->capture_default_str();
  cmd_panel->add_option("--seed", panel_opts.seed, "Experiment seed")
      ->capture_default_str();
  cmd_panel->add_option("--change-time", panel_opts.change_time, "Change time")
      ->capture_default_str();
  cmd_panel->add_option("--out", panel_out, "Panel CSV path")
      ->capture_default_str();
  add_threshold_source(cmd_panel, panel_opts);

  // --- sweep-n ---
  ExperimentOptions sweep_opts;
  std::string sweep_scenario = "b";
  std::string sweep_n_list = "200,500,1000,2000";
  std::string sweep_out = "sweep.csv";
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep-n", "Repeat one scenario across sample sizes");
  cmd_sweep->add_option("--scenario", sweep_scenario, "Built-in scenario id")
      ->capture_default_str();
  cmd_sweep->add_option("--n-list", sweep_n_list, "Comma-separated sample sizes")
      ->capture_default_str();
  cmd_sweep->add_option("--t-horizon", sweep_opts.horizon, "Monitoring horizon")
      ->capture_default_str();
  cmd_sweep->add_option("--reps", sweep_opts.reps, "Independent replications")
      ->capture_default_str();
  cmd_sweep->add_option("--alpha", sweep_opts.alpha, "Level")
      ->capture_default_str();
  cmd_sweep->add_option("--beta", sweep_opts.beta, "Weight parameter")
      ->capture_default_str();
  cmd_sweep->add_option("--seed", sweep_opts.seed, "Experiment seed")
      ->capture_default_str();
  cmd_sweep->add_option("--change-time", sweep_opts.change_time, "Change time")
      ->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out, "Sweep CSV path")
      ->capture_default_str();
  add_threshold_source(cmd_sweep, sweep_opts);

  CLI11_PARSE(app, argc, argv);

  run_opts.has_q_override = cmd_run->count("--q") > 0;
  panel_opts.has_q_override = cmd_panel->count("--q") > 0;
  sweep_opts.has_q_override = cmd_sweep->count("--q") > 0;

  auto builtin_id = [](const std::string& name) {
    if (name.size() != 1) {
      throw dpmon::ConfigError("unknown scenario '" + name +
                               "', expected one of a..h");
    }
    return name[0];
  };

  try {
    if (cmd_threshold->parsed()) {
      std::printf("%.17g\n", resolve_threshold(threshold_opts));
      return 0;
    }

    if (cmd_run->parsed()) {
      dpmon::ScenarioSpec scenario =
          run_scenario_file.empty()
              ? dpmon::build_scenario(builtin_id(run_scenario))
              : dpmon::load_scenario_file(run_scenario_file);
      if (cmd_run->count("--change-time") > 0 || run_scenario_file.empty()) {
        scenario.change_time = run_opts.change_time;
      }
      dpmon::MonitorParams params;
      params.n = run_opts.n;
      params.horizon = run_opts.horizon;
      params.alpha = run_opts.alpha;
      params.beta = run_opts.beta;
      params.c_stab = run_opts.c_stab;
      params.q = member_threshold(run_opts, run_opts.alpha);
      const dpmon::ExperimentOutcome outcome = dpmon::run_experiment(
          scenario, run_opts.reps, params, run_opts.seed, run_opts.threads);
      dpmon::write_results_csv(run_out, outcome.records, params.q);
      const dpmon::ScenarioResult summaries[1] = {outcome.summary};
      dpmon::write_summary_csv(run_summary_out.empty()
                                   ? summary_path_for(run_out)
                                   : run_summary_out,
                               summaries);
      std::printf("q = %.9g\n", params.q);
      print_scenario_summary(outcome.summary);
      return 0;
    }

    if (cmd_panel->parsed()) {
      if (panel_base != "laplace-scale") {
        throw dpmon::ConfigError("panel: unknown --scenario-base '" +
                                 panel_base + "' (available: laplace-scale)");
      }
      const std::vector<double> bounds =
          parse_real_list(panel_events, "--events");

      std::vector<double> database(10, 0.0);
      std::vector<double> database_prime(10, 0.0);
      database_prime[0] = 1.0;
      std::vector<dpmon::AuditTuple> members;
      std::vector<std::string> labels;
      for (double bound : bounds) {
        dpmon::AuditTuple member;
        member.input_x = database;
        member.input_x_prime = database_prime;
        member.event = dpmon::HalfLineLE{bound};
        member.epsilon = 1.0;
        members.push_back(member);
        labels.push_back(format_label(bound));
      }
      const dpmon::PanelConfig config =
          dpmon::make_panel_config(std::move(members), panel_global_alpha);

      dpmon::MechanismTimeline timeline{
          dpmon::LaplaceSum{database, dpmon::LaplaceNoise{1.0}},
          {{panel_opts.change_time,
            dpmon::LaplaceSum{database, dpmon::LaplaceNoise{0.9}}}}};

      dpmon::PanelRunParams params;
      params.n = panel_opts.n;
      params.horizon = panel_opts.horizon;
      params.beta = panel_opts.beta;
      params.q_member = member_threshold(panel_opts, config.per_member_alpha);
      params.reps = panel_opts.reps;
      params.seed = panel_opts.seed;
      params.shared_batches = panel_shared;
      params.c_stab = panel_opts.c_stab;
      params.threads = panel_opts.threads;

      const dpmon::PanelResult result = dpmon::panel_run(config, timeline, params);
      dpmon::write_panel_csv(panel_out, labels, result);
      std::printf("per-member alpha = %.9g, q = %.9g\n", config.per_member_alpha,
                  params.q_member);
      for (std::size_t m = 0; m < labels.size(); ++m) {
        std::printf("member %s: detect fraction at horizon %.3f\n",
                    labels[m].c_str(), result.member_curves[m].back());
      }
      std::printf("aggregate: detect fraction at horizon %.3f\n",
                  result.aggregate_curve.back());
      return 0;
    }

    if (cmd_sweep->parsed()) {
      dpmon::ScenarioSpec scenario =
          dpmon::build_scenario(builtin_id(sweep_scenario));
      scenario.change_time = sweep_opts.change_time;
      const std::vector<double> n_values = parse_real_list(sweep_n_list, "--n-list");

      dpmon::MonitorParams params;
      params.horizon = sweep_opts.horizon;
      params.alpha = sweep_opts.alpha;
      params.beta = sweep_opts.beta;
      params.c_stab = sweep_opts.c_stab;
      params.q = member_threshold(sweep_opts, sweep_opts.alpha);

      std::vector<dpmon::SweepEntry> entries;
      std::map<int, double> mean_delay_by_n;
      for (double n_real : n_values) {
        const int n = static_cast<int>(n_real);
        params.n = n;
        const dpmon::ExperimentOutcome outcome = dpmon::run_experiment(
            scenario, sweep_opts.reps, params, sweep_opts.seed,
            sweep_opts.threads);
        entries.push_back(dpmon::SweepEntry{n, outcome.summary});
        if (outcome.summary.mean_delay) {
          mean_delay_by_n[n] = *outcome.summary.mean_delay;
        }
        std::printf("n = %d: ", n);
        print_scenario_summary(outcome.summary);
      }
      dpmon::write_sweep_csv(sweep_out, entries);

      if (mean_delay_by_n.size() >= 2) {
        std::printf("\n%8s %12s %22s %18s\n", "n", "mean_delay",
                    "delay*n^(1/(2(1-b)))", "delay/rate");
        for (const dpmon::DelayRateRow& row : dpmon::delay_rate_check(
                 mean_delay_by_n, sweep_opts.horizon, sweep_opts.beta)) {
          std::printf("%8d %12.4f %22.4f %18.4f\n", row.n, row.mean_delay,
                      row.delay_times_n_rate, row.delay_over_rate);
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dpmon: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
