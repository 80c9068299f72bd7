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

#include "dpmon/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dpmon/detector.hpp"
#include "dpmon/errors.hpp"
#include "dpmon/parallel.hpp"

namespace dpmon {
namespace {

bool produces_bits(const MechanismSpec& spec) {
  return std::holds_alternative<Svt>(spec);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return out;
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void validate(const ScenarioSpec& scenario) {
  validate(scenario.tuple);
  validate(scenario.pre_change);
  validate(scenario.post_change);
  if (scenario.id.empty()) throw ConfigError("ScenarioSpec: id must be set");
  if (scenario.change_time < 1) {
    throw ConfigError("ScenarioSpec: change_time must be >= 1");
  }
  if (produces_bits(scenario.pre_change) != produces_bits(scenario.post_change)) {
    throw ConfigError(
        "ScenarioSpec: pre- and post-change mechanisms must share an output "
        "space");
  }
  const bool bit_event = std::holds_alternative<ExactBits>(scenario.tuple.event);
  if (bit_event != produces_bits(scenario.pre_change)) {
    throw ConfigError("ScenarioSpec: event type does not match the mechanism "
                      "output space");
  }
}

ScenarioSpec build_scenario(char id) {
  const std::vector<double> zeros10(10, 0.0);
  std::vector<double> one_first(10, 0.0);
  one_first[0] = 1.0;
  const std::vector<double> fives_low{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const std::vector<double> fives_high{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<double> rnm_x{1, 1, 1, 1, 1};
  const std::vector<double> rnm_xp{2, 2, 2, 2, 2};

  auto svt = [](const std::vector<double>& queries, SvtVariant variant) {
    return Svt{queries, variant, /*epsilon=*/1.0, /*threshold=*/1.0,
               /*bound=*/1, /*sensitivity=*/1.0};
  };

  ScenarioSpec s;
  s.id = std::string(1, id);
  s.change_time = kDefaultChangeTime;
  s.tuple.epsilon = 1.0;
  switch (id) {
    case 'a':  // Laplace mechanism, noise scale 1 -> 0.5
      s.pre_change = LaplaceSum{zeros10, LaplaceNoise{1.0}};
      s.post_change = LaplaceSum{zeros10, LaplaceNoise{0.5}};
      s.tuple.input_x = zeros10;
      s.tuple.input_x_prime = one_first;
      s.tuple.event = HalfLineLE{0.0};
      s.harmful = true;
      break;
    case 'b':  // Laplace mechanism, noise swapped for Gaussian of equal variance
      s.pre_change = LaplaceSum{zeros10, LaplaceNoise{1.0}};
      s.post_change = LaplaceSum{zeros10, GaussianNoise{2.0}};
      s.tuple.input_x = zeros10;
      s.tuple.input_x_prime = one_first;
      s.tuple.event = HalfLineLE{-1.0};
      s.harmful = true;
      break;
    case 'c':  // RNM reports the maximum noisy value instead of its index
      s.pre_change = ReportNoisyMax{rnm_x, 1.0, RnmVariant::kReturnIndex};
      s.post_change = ReportNoisyMax{rnm_x, 1.0, RnmVariant::kReturnMaxValue};
      s.tuple.input_x = rnm_x;
      s.tuple.input_x_prime = rnm_xp;
      s.tuple.event = HalfLineLE{2.0};
      s.harmful = true;
      break;
    case 'd':  // SVT2 -> SVT4
      s.pre_change = svt(fives_low, SvtVariant::kV2);
      s.post_change = svt(fives_low, SvtVariant::kV4);
      s.tuple.input_x = fives_low;
      s.tuple.input_x_prime = fives_high;
      s.tuple.event = ExactBits{{0, 0, 0, 0, 0, 0, 1}};
      s.harmful = true;
      break;
    case 'e':  // SVT2 -> SVT5; event = noiseless SVT2 trace on Q(x)
      s.pre_change = svt(fives_low, SvtVariant::kV2);
      s.post_change = svt(fives_low, SvtVariant::kV5);
      s.tuple.input_x = fives_low;
      s.tuple.input_x_prime = fives_high;
      s.tuple.event = ExactBits{{0, 0, 0, 0, 0, 1}};
      s.harmful = true;
      break;
    case 'f':  // SVT2 -> SVT6; event = noiseless no-abort trace on Q(x)
      s.pre_change = svt(fives_high, SvtVariant::kV2);
      s.post_change = svt(fives_high, SvtVariant::kV6);
      s.tuple.input_x = fives_high;
      s.tuple.input_x_prime = fives_low;
      s.tuple.event = ExactBits{{1, 1, 1, 1, 1, 0, 0, 0, 0, 0}};
      s.harmful = true;
      break;
    case 'g':  // RNM with exponential noise (benign)
      s.pre_change = ReportNoisyMax{rnm_x, 1.0, RnmVariant::kReturnIndex};
      s.post_change =
          ReportNoisyMax{rnm_x, 1.0, RnmVariant::kExponentialNoiseIndex};
      s.tuple.input_x = rnm_x;
      s.tuple.input_x_prime = rnm_xp;
      s.tuple.event = PointSet{{3.0}};
      s.harmful = false;
      break;
    case 'h':  // SVT2 -> SVT1 (benign)
      s.pre_change = svt(fives_low, SvtVariant::kV2);
      s.post_change = svt(fives_low, SvtVariant::kV1);
      s.tuple.input_x = fives_low;
      s.tuple.input_x_prime = fives_high;
      s.tuple.event = ExactBits{{0, 0, 0, 0, 0, 0, 1}};
      s.harmful = false;
      break;
    default:
      throw ConfigError(std::string("build_scenario: unknown id '") + id +
                        "', expected a..h");
  }
  return s;
}

MonitorTrace monitor_timeline(const MechanismTimeline& timeline,
                              const AuditTuple& tuple,
                              const MonitorParams& params,
                              RandomStream& stream) {
  validate(tuple);
  Detector detector(params.horizon, params.beta, params.q);
  MonitorTrace trace;
  trace.d_values.reserve(static_cast<std::size_t>(params.horizon));
  for (int t = 1; t <= params.horizon; ++t) {
    const MechanismSpec& active = timeline.at(t);
    const int n_x = count_hits_sampled(with_input(active, tuple.input_x),
                                       params.n, tuple.event, stream);
    const int n_y = count_hits_sampled(with_input(active, tuple.input_x_prime),
                                       params.n, tuple.event, stream);
    const StepStatistic stat =
        estimate_step(params.n, n_x, n_y, tuple.epsilon, params.c_stab);
    trace.d_values.push_back(detector.push(stat.ratio).d_value);
  }
  trace.first_detection = detector.first_crossing();
  return trace;
}

RunRecord run_monitor(const ScenarioSpec& scenario, const MonitorParams& params,
                      std::uint64_t seed, int replication) {
  validate(scenario);
  if (scenario.change_time > params.horizon) {
    throw ConfigError("run_monitor: change_time must lie within the horizon");
  }
  MechanismTimeline timeline{scenario.pre_change,
                             {{scenario.change_time, scenario.post_change}}};
  RandomStream stream(seed, {static_cast<std::uint64_t>(replication)});
  MonitorTrace trace = monitor_timeline(timeline, scenario.tuple, params, stream);

  RunRecord record;
  record.scenario_id = scenario.id;
  record.replication = replication;
  record.seed = seed;
  record.d_values = std::move(trace.d_values);
  record.first_detection = trace.first_detection;
  if (record.first_detection &&
      *record.first_detection >= scenario.change_time) {
    record.delay = *record.first_detection - scenario.change_time;
  }
  return record;
}

ExperimentOutcome run_experiment(const ScenarioSpec& scenario, int reps,
                                 const MonitorParams& params,
                                 std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw ConfigError("run_experiment: reps must be >= 1");
  validate(scenario);

  ExperimentOutcome outcome;
  outcome.records.resize(static_cast<std::size_t>(reps));
  parallel_for(
      static_cast<std::size_t>(reps),
      [&](std::size_t r) {
        outcome.records[r] =
            run_monitor(scenario, params, seed, static_cast<int>(r));
      },
      threads);
  outcome.summary = summarize(scenario, outcome.records);
  return outcome;
}

ScenarioResult summarize(const ScenarioSpec& scenario,
                         std::span<const RunRecord> records) {
  if (records.empty()) throw ConfigError("summarize: no records");
  const std::size_t horizon = records.front().d_values.size();

  ScenarioResult result;
  result.scenario_id = scenario.id;
  result.replications = static_cast<int>(records.size());
  result.detection_curve.assign(horizon, 0.0);

  std::vector<double> delays;
  int false_alarms = 0;
  for (const RunRecord& record : records) {
    if (record.first_detection) {
      for (std::size_t tau = static_cast<std::size_t>(*record.first_detection);
           tau <= horizon; ++tau) {
        result.detection_curve[tau - 1] += 1.0;
      }
      if (*record.first_detection < scenario.change_time) ++false_alarms;
    }
    if (record.delay) delays.push_back(static_cast<double>(*record.delay));
  }
  for (double& frac : result.detection_curve) {
    frac /= static_cast<double>(records.size());
  }
  result.false_alarm_frac =
      static_cast<double>(false_alarms) / static_cast<double>(records.size());
  if (!delays.empty()) {
    result.mean_delay = mean_of(delays);
    result.median_delay = median_of(delays);
  }
  return result;
}

std::vector<DelayRateRow> delay_rate_check(
    const std::map<int, double>& mean_delay_by_n, int horizon, double beta) {
  if (mean_delay_by_n.size() < 2) {
    throw ConfigError("delay_rate_check: need at least two sample sizes");
  }
  if (horizon < 1) throw ConfigError("delay_rate_check: horizon must be >= 1");
  const double n_exponent = 1.0 / (2.0 * (1.0 - beta));
  const double horizon_factor =
      std::pow(static_cast<double>(horizon), (0.5 - beta) / (1.0 - beta));

  std::vector<DelayRateRow> rows;
  rows.reserve(mean_delay_by_n.size());
  for (const auto& [n, delay] : mean_delay_by_n) {
    DelayRateRow row;
    row.n = n;
    row.mean_delay = delay;
    row.delay_times_n_rate = delay * std::pow(static_cast<double>(n), n_exponent);
    row.delay_over_rate = row.delay_times_n_rate / horizon_factor;
    rows.push_back(row);
  }
  return rows;
}

void write_results_csv(const std::string& path,
                       std::span<const RunRecord> records, double q) {
  std::ofstream out = open_for_write(path);
  out << "scenario,rep,tau,d_value,q,detected,first_detection\n";
  const std::string q_str = format_real(q);
  for (const RunRecord& record : records) {
    const std::string first = record.first_detection
                                  ? std::to_string(*record.first_detection)
                                  : std::string();
    for (std::size_t i = 0; i < record.d_values.size(); ++i) {
      const int tau = static_cast<int>(i) + 1;
      const bool detected =
          record.first_detection && *record.first_detection <= tau;
      out << record.scenario_id << ',' << record.replication << ',' << tau
          << ',' << format_real(record.d_values[i]) << ',' << q_str << ','
          << (detected ? '1' : '0') << ',' << first << '\n';
    }
  }
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const std::string& path,
                       std::span<const ScenarioResult> results) {
  std::ofstream out = open_for_write(path);
  out << "scenario,tau,detect_fraction\n";
  for (const ScenarioResult& result : results) {
    for (std::size_t i = 0; i < result.detection_curve.size(); ++i) {
      out << result.scenario_id << ',' << (i + 1) << ','
          << format_real(result.detection_curve[i]) << '\n';
    }
  }
  out << "scenario,mean_delay,median_delay,false_alarm_frac\n";
  for (const ScenarioResult& result : results) {
    out << result.scenario_id << ','
        << (result.mean_delay ? format_real(*result.mean_delay) : "") << ','
        << (result.median_delay ? format_real(*result.median_delay) : "")
        << ',' << format_real(result.false_alarm_frac) << '\n';
  }
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

void write_sweep_csv(const std::string& path,
                     std::span<const SweepEntry> entries) {
  std::ofstream out = open_for_write(path);
  out << "scenario,n,tau,detect_fraction\n";
  for (const SweepEntry& entry : entries) {
    const ScenarioResult& result = entry.result;
    for (std::size_t i = 0; i < result.detection_curve.size(); ++i) {
      out << result.scenario_id << ',' << entry.n << ',' << (i + 1) << ','
          << format_real(result.detection_curve[i]) << '\n';
    }
  }
  out << "scenario,n,mean_delay,median_delay,false_alarm_frac\n";
  for (const SweepEntry& entry : entries) {
    const ScenarioResult& result = entry.result;
    out << result.scenario_id << ',' << entry.n << ','
        << (result.mean_delay ? format_real(*result.mean_delay) : "") << ','
        << (result.median_delay ? format_real(*result.median_delay) : "")
        << ',' << format_real(result.false_alarm_frac) << '\n';
  }
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace dpmon
