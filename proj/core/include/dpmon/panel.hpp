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

#ifndef DPMON_PANEL_HPP_
#define DPMON_PANEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dpmon/estimation.hpp"
#include "dpmon/mechanisms.hpp"

namespace dpmon {

// Several monitoring configurations watching the same evolving mechanism,
// combined with a Bonferroni correction: each member runs at
// global_alpha / #members and the panel reports a violation as soon as any
// member does.
struct PanelConfig {
  std::vector<AuditTuple> members;
  double global_alpha = 0.05;
  double per_member_alpha = 0.0;  // global_alpha / members.size()
};

// Builds the config and fills in per_member_alpha; rejects empty panels.
PanelConfig make_panel_config(std::vector<AuditTuple> members,
                              double global_alpha);

struct PanelRunParams {
  int n = 750;
  int horizon = 100;
  double beta = 0.25;
  double q_member = 0.0;  // threshold calibrated at per_member_alpha
  int reps = 100;
  std::uint64_t seed = 1;
  // With shared batches every member evaluates its event on the same two
  // output batches per time step (requires identical member inputs);
  // otherwise each member draws its own fresh batches.
  bool shared_batches = false;
  double c_stab = kDefaultStabilization;
  unsigned threads = 0;
};

struct PanelResult {
  // member_curves[m][tau-1]: absorbing detection fraction of member m.
  std::vector<std::vector<double>> member_curves;
  // Panel decision: detected at tau iff some member has detected by tau.
  std::vector<double> aggregate_curve;
};

// Runs the panel over the timeline. Member m of replication r uses the
// stream derived from (seed, r, m) (or the shared (seed, r) stream when
// batches are shared), so results are reproducible and thread-count
// independent.
PanelResult panel_run(const PanelConfig& config,
                      const MechanismTimeline& timeline,
                      const PanelRunParams& params);

// member,tau,detect_fraction rows for every member label plus "aggregate";
// reals with 9 significant digits.
void write_panel_csv(const std::string& path,
                     const std::vector<std::string>& member_labels,
                     const PanelResult& result);

}  // namespace dpmon

#endif  // DPMON_PANEL_HPP_
