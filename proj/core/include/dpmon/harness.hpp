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

#ifndef DPMON_HARNESS_HPP_
#define DPMON_HARNESS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpmon/estimation.hpp"
#include "dpmon/mechanisms.hpp"

namespace dpmon {

// Experiment defaults (also the CLI defaults).
inline constexpr int kDefaultSampleSize = 750;
inline constexpr int kDefaultHorizon = 100;
inline constexpr int kDefaultChangeTime = 50;
inline constexpr int kDefaultReplications = 100;
inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultBeta = 0.25;

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

// One monitored deployment: a mechanism that is swapped at change_time, plus
// the audit tuple used to watch it. `harmful` records the ground truth of
// whether the swap breaks the target privacy level.
struct ScenarioSpec {
  std::string id;
  MechanismSpec pre_change;
  MechanismSpec post_change;
  int change_time = kDefaultChangeTime;
  AuditTuple tuple;
  bool harmful = false;
};

// Checks the tuple, that both mechanism phases produce the same output kind
// (scalar vs bit sequence), and that the event applies to that kind.
void validate(const ScenarioSpec& scenario);

// The eight built-in scenarios, id in 'a'..'h': (a) Laplace noise-scale
// decrease, (b) Laplace-to-Gaussian noise swap, (c) RNM reporting the max
// noisy value, (d) SVT2 -> SVT4, (e) SVT2 -> SVT5, (f) SVT2 -> SVT6,
// (g) RNM with exponential noise (benign), (h) SVT2 -> SVT1 (benign).
ScenarioSpec build_scenario(char id);

// Scenario override file (JSON; schema in docs/scenario_schema.md).
ScenarioSpec load_scenario_file(const std::string& path);

// ---------------------------------------------------------------------------
// Single monitoring run
// ---------------------------------------------------------------------------

struct MonitorParams {
  int n = kDefaultSampleSize;
  int horizon = kDefaultHorizon;
  double alpha = kDefaultAlpha;  // recorded; the decision uses q
  double beta = kDefaultBeta;
  double q = 0.0;                // threshold from the calibration module
  double c_stab = kDefaultStabilization;
};

struct RunRecord {
  std::string scenario_id;
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<double> d_values;        // index tau-1
  std::optional<int> first_detection;  // tau of the first crossing
  std::optional<int> delay;            // first_detection - change_time,
                                       // present only for post-change detections
};

struct MonitorTrace {
  std::vector<double> d_values;
  std::optional<int> first_detection;
};

// Core monitoring loop: at each time t it draws a batch of n outputs for each
// of the two inputs from the mechanism active at t, forms the standardized
// statistic and feeds the detector. All randomness comes from `stream`.
MonitorTrace monitor_timeline(const MechanismTimeline& timeline,
                              const AuditTuple& tuple,
                              const MonitorParams& params,
                              RandomStream& stream);

// One replication of a scenario. The stream is derived from
// (seed, replication); equal arguments reproduce the record exactly.
RunRecord run_monitor(const ScenarioSpec& scenario, const MonitorParams& params,
                      std::uint64_t seed, int replication = 0);

// ---------------------------------------------------------------------------
// Replicated experiments
// ---------------------------------------------------------------------------

struct ScenarioResult {
  std::string scenario_id;
  std::vector<double> detection_curve;  // P(first_detection <= tau), absorbing
  std::optional<double> mean_delay;     // over replications with a delay
  std::optional<double> median_delay;
  double false_alarm_frac = 0.0;        // first_detection before change_time
  int replications = 0;
};

struct ExperimentOutcome {
  std::vector<RunRecord> records;  // in replication order
  ScenarioResult summary;
};

// reps independent replications (replication r uses the stream derived from
// (seed, r)); parallel across replications, deterministic merge.
ExperimentOutcome run_experiment(const ScenarioSpec& scenario, int reps,
                                 const MonitorParams& params,
                                 std::uint64_t seed, unsigned threads = 0);

ScenarioResult summarize(const ScenarioSpec& scenario,
                         std::span<const RunRecord> records);

// ---------------------------------------------------------------------------
// Detection-delay rate table
// ---------------------------------------------------------------------------

struct DelayRateRow {
  int n = 0;
  double mean_delay = 0.0;
  // mean_delay * n^(1/(2(1-beta))): flat across n when delays track the
  // theoretical rate in n.
  double delay_times_n_rate = 0.0;
  // mean_delay / (T^((1/2-beta)/(1-beta)) / n^(1/(2(1-beta)))), the full
  // rate including the horizon factor.
  double delay_over_rate = 0.0;
};

// Descriptive rate table from mean delays per sample size; requires at least
// two sample sizes.
std::vector<DelayRateRow> delay_rate_check(
    const std::map<int, double>& mean_delay_by_n, int horizon, double beta);

// ---------------------------------------------------------------------------
// CSV emission. All reals are printed with 9 significant digits and no
// timestamps are written, so equal inputs give byte-identical files.
// ---------------------------------------------------------------------------

// One row per replication per tau:
// scenario,rep,tau,d_value,q,detected,first_detection
// `detected` is the absorbing 0/1 flag at tau; `first_detection` is empty
// for replications that never detect.
void write_results_csv(const std::string& path,
                       std::span<const RunRecord> records, double q);

// Curve section (scenario,tau,detect_fraction) followed by a per-scenario
// summary block (scenario,mean_delay,median_delay,false_alarm_frac); empty
// fields where no replication detected.
void write_summary_csv(const std::string& path,
                       std::span<const ScenarioResult> results);

// Sample-size sweep of one scenario: curve section
// (scenario,n,tau,detect_fraction) followed by a per-n summary block
// (scenario,n,mean_delay,median_delay,false_alarm_frac).
struct SweepEntry {
  int n = 0;
  ScenarioResult result;
};
void write_sweep_csv(const std::string& path,
                     std::span<const SweepEntry> entries);

}  // namespace dpmon

#endif  // DPMON_HARNESS_HPP_
