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

#include "dpmon/panel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>

#include "dpmon/detector.hpp"
#include "dpmon/errors.hpp"
#include "dpmon/harness.hpp"
#include "dpmon/parallel.hpp"

namespace dpmon {
namespace {

std::vector<double> curve_from_first_detections(
    const std::vector<std::optional<int>>& first_detections, int horizon) {
  std::vector<double> curve(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& first : first_detections) {
    if (!first) continue;
    for (int tau = *first; tau <= horizon; ++tau) {
      curve[static_cast<std::size_t>(tau) - 1] += 1.0;
    }
  }
  for (double& frac : curve) frac /= static_cast<double>(first_detections.size());
  return curve;
}

}  // namespace

PanelConfig make_panel_config(std::vector<AuditTuple> members,
                              double global_alpha) {
  if (members.empty()) throw ConfigError("PanelConfig: need at least one member");
  if (!(global_alpha > 0.0 && global_alpha < 1.0)) {
    throw ConfigError("PanelConfig: global_alpha must lie in (0,1)");
  }
  for (const AuditTuple& member : members) validate(member);
  PanelConfig config;
  config.per_member_alpha = global_alpha / static_cast<double>(members.size());
  config.global_alpha = global_alpha;
  config.members = std::move(members);
  return config;
}

PanelResult panel_run(const PanelConfig& config,
                      const MechanismTimeline& timeline,
                      const PanelRunParams& params) {
  const std::size_t n_members = config.members.size();
  if (n_members == 0) throw ConfigError("panel_run: empty panel");
  if (params.reps < 1) throw ConfigError("panel_run: reps must be >= 1");
  if (params.shared_batches) {
    for (const AuditTuple& member : config.members) {
      if (member.input_x != config.members[0].input_x ||
          member.input_x_prime != config.members[0].input_x_prime) {
        throw ConfigError(
            "panel_run: shared batches require identical member inputs");
      }
    }
  }

  // first_detection[r][m]
  std::vector<std::vector<std::optional<int>>> first_detection(
      static_cast<std::size_t>(params.reps),
      std::vector<std::optional<int>>(n_members));

  MonitorParams monitor_params;
  monitor_params.n = params.n;
  monitor_params.horizon = params.horizon;
  monitor_params.alpha = config.per_member_alpha;
  monitor_params.beta = params.beta;
  monitor_params.q = params.q_member;
  monitor_params.c_stab = params.c_stab;

  parallel_for(
      static_cast<std::size_t>(params.reps),
      [&](std::size_t r) {
        if (params.shared_batches) {
          // One pair of batches per time step, every member applies its own
          // event to the same outputs.
          RandomStream stream(params.seed, {static_cast<std::uint64_t>(r)});
          std::vector<Detector> detectors;
          detectors.reserve(n_members);
          for (std::size_t m = 0; m < n_members; ++m) {
            detectors.emplace_back(params.horizon, params.beta, params.q_member);
          }
          for (int t = 1; t <= params.horizon; ++t) {
            const MechanismSpec& active = timeline.at(t);
            const auto batch_x = sample_batch(
                with_input(active, config.members[0].input_x), params.n, stream);
            const auto batch_y = sample_batch(
                with_input(active, config.members[0].input_x_prime), params.n,
                stream);
            for (std::size_t m = 0; m < n_members; ++m) {
              const AuditTuple& member = config.members[m];
              const int n_x = count_hits(batch_x, member.event);
              const int n_y = count_hits(batch_y, member.event);
              const StepStatistic stat = estimate_step(
                  params.n, n_x, n_y, member.epsilon, params.c_stab);
              detectors[m].push(stat.ratio);
            }
          }
          for (std::size_t m = 0; m < n_members; ++m) {
            first_detection[r][m] = detectors[m].first_crossing();
          }
        } else {
          for (std::size_t m = 0; m < n_members; ++m) {
            RandomStream stream(params.seed, {static_cast<std::uint64_t>(r),
                                              static_cast<std::uint64_t>(m)});
            const MonitorTrace trace = monitor_timeline(
                timeline, config.members[m], monitor_params, stream);
            first_detection[r][m] = trace.first_detection;
          }
        }
      },
      params.threads);

  PanelResult result;
  result.member_curves.reserve(n_members);
  for (std::size_t m = 0; m < n_members; ++m) {
    std::vector<std::optional<int>> member_firsts;
    member_firsts.reserve(first_detection.size());
    for (const auto& per_rep : first_detection) {
      member_firsts.push_back(per_rep[m]);
    }
    result.member_curves.push_back(
        curve_from_first_detections(member_firsts, params.horizon));
  }

  // Panel-level first detection: earliest member crossing per replication.
  std::vector<std::optional<int>> aggregate_firsts;
  aggregate_firsts.reserve(first_detection.size());
  for (const auto& per_rep : first_detection) {
    std::optional<int> earliest;
    for (const auto& first : per_rep) {
      if (first && (!earliest || *first < *earliest)) earliest = first;
    }
    aggregate_firsts.push_back(earliest);
  }
  result.aggregate_curve =
      curve_from_first_detections(aggregate_firsts, params.horizon);
  return result;
}

void write_panel_csv(const std::string& path,
                     const std::vector<std::string>& member_labels,
                     const PanelResult& result) {
  if (member_labels.size() != result.member_curves.size()) {
    throw ConfigError("write_panel_csv: one label per member required");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  auto write_curve = [&out](const std::string& label,
                            const std::vector<double>& curve) {
    char buf[40];
    for (std::size_t i = 0; i < curve.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", curve[i]);
      out << label << ',' << (i + 1) << ',' << buf << '\n';
    }
  };

  out << "member,tau,detect_fraction\n";
  for (std::size_t m = 0; m < member_labels.size(); ++m) {
    write_curve(member_labels[m], result.member_curves[m]);
  }
  write_curve("aggregate", result.aggregate_curve);
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace dpmon
