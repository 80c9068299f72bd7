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

#include "dpmon/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "dpmon/errors.hpp"

namespace dpmon {

Detector::Detector(int horizon, double beta, double q)
    : horizon_(horizon), beta_(beta), q_(q) {
  if (horizon < 1) throw ConfigError("Detector: horizon T must be >= 1");
  if (!(beta >= 0.0 && beta < 0.5)) {
    throw ConfigError("Detector: beta must lie in [0, 1/2)");
  }
  prefix_sums_.reserve(static_cast<std::size_t>(horizon) + 1);
  prefix_sums_.push_back(0.0);
  lookback_scale_.reserve(static_cast<std::size_t>(horizon));
  const double horizon_scale =
      std::pow(static_cast<double>(horizon), 0.5 - beta);
  for (int l = 0; l < horizon; ++l) {
    lookback_scale_.push_back(
        1.0 / (std::pow(static_cast<double>(l + 1), beta) * horizon_scale));
  }
}

Detector::PushResult Detector::push(double ratio) {
  const int tau = current_time() + 1;
  if (tau > horizon_) {
    throw ContractViolation("Detector: push past the horizon T");
  }
  prefix_sums_.push_back(prefix_sums_.back() + ratio);

  const double s_tau = prefix_sums_[static_cast<std::size_t>(tau)];
  double d = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < tau; ++l) {
    const double window_sum =
        s_tau - prefix_sums_[static_cast<std::size_t>(tau - l - 1)];
    d = std::max(d, window_sum * lookback_scale_[static_cast<std::size_t>(l)]);
  }

  max_d_ = tau == 1 ? d : std::max(max_d_, d);
  if (!first_crossing_ && d > q_) first_crossing_ = tau;
  return PushResult{d, first_crossing_.has_value()};
}

double Detector::max_d_value() const {
  if (current_time() < 1) {
    throw ContractViolation("Detector: max_d_value needs at least one push");
  }
  return max_d_;
}

}  // namespace dpmon
