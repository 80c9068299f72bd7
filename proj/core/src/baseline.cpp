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

#include "dpmon/baseline.hpp"

#include <cstddef>

#include "dpmon/errors.hpp"
#include "dpmon/stats.hpp"

namespace dpmon {

ConfidenceInterval naive_interval(const StepStatistic& step, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("naive_interval: level must lie in (0,1)");
  }
  return ConfidenceInterval{step.p_hat + normal_quantile(level) * step.sigma_hat,
                            level};
}

NaiveMonitorResult naive_monitor(std::span<const StepStatistic> steps,
                                 double alpha, int horizon) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("naive_monitor: alpha must lie in (0,1)");
  }
  if (horizon < 1 || steps.size() > static_cast<std::size_t>(horizon)) {
    throw ConfigError("naive_monitor: need horizon >= max(1, #steps)");
  }
  const double per_step_threshold = -normal_quantile(alpha / horizon);

  NaiveMonitorResult result;
  result.violation_at.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepStatistic& step = steps[i];
    bool flag;
    if (step.sigma_hat > 0.0) {
      flag = step.p_hat / step.sigma_hat >= per_step_threshold;
    } else {
      // ratio := 0 for the 0/0 batch, +inf when the gap estimate is positive.
      flag = step.p_hat > 0.0;
    }
    if (flag && !result.first_violation) {
      result.first_violation = static_cast<int>(i) + 1;
    }
    result.violation_at.push_back(result.first_violation.has_value());
  }
  result.overall = result.first_violation.has_value();
  return result;
}

}  // namespace dpmon
