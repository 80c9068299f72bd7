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

#ifndef DPMON_BASELINE_HPP_
#define DPMON_BASELINE_HPP_

#include <optional>
#include <span>
#include <vector>

#include "dpmon/estimation.hpp"

namespace dpmon {

// One-sided interval (lower, +inf) for the gap at one time point. The
// per-step decision is "violation" exactly when 0 falls outside, i.e. when
// lower >= 0.
struct ConfidenceInterval {
  double lower = 0.0;
  double level = 0.0;

  bool violation() const { return lower >= 0.0; }
};

// lower = p_hat + normal_quantile(level) * sigma_hat. Uses the raw
// (unstabilized) sigma_hat. Requires level in (0,1).
ConfidenceInterval naive_interval(const StepStatistic& step, double level);

struct NaiveMonitorResult {
  std::vector<bool> violation_at;       // per-step flag, absorbing
  std::optional<int> first_violation;   // 1-based time of first flag
  bool overall = false;
};

// Per-step tests at level alpha/T (Bonferroni): a step flags a violation when
// p_hat/sigma_hat >= -normal_quantile(alpha/T). The degenerate sigma_hat == 0
// batches use the conventions ratio = 0 for p_hat == 0 and ratio = +inf for
// p_hat > 0. Flags are absorbing over time.
NaiveMonitorResult naive_monitor(std::span<const StepStatistic> steps,
                                 double alpha, int horizon);

}  // namespace dpmon

#endif  // DPMON_BASELINE_HPP_
