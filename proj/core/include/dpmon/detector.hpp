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

#ifndef DPMON_DETECTOR_HPP_
#define DPMON_DETECTOR_HPP_

#include <optional>
#include <vector>

namespace dpmon {

// Weighted lookback aggregator over standardized per-step statistics.
//
// After the ratio r_tau arrives, the detector value is
//
//   d(tau) = max over l in {0,...,tau-1} of
//            (S_tau - S_{tau-l-1}) / ((l+1)^beta * T^(1/2-beta)),
//
// where S is the running prefix sum of ratios. A crossing (d > q) is
// absorbing: once detected, the decision stays "detected", while d values
// keep being produced so callers can record full trajectories. O(tau) per
// push via prefix sums; exactness over speed at monitoring scale.
class Detector {
 public:
  // Requires T >= 1, beta in [0, 1/2), both checked (ConfigError).
  Detector(int horizon, double beta, double q);

  struct PushResult {
    double d_value = 0.0;
    bool detected = false;
  };

  // Feeds the ratio for time tau = current_time()+1. Throws
  // ContractViolation past the horizon.
  PushResult push(double ratio);

  // Running maximum of all d values so far; requires at least one push.
  double max_d_value() const;

  int horizon() const { return horizon_; }
  double beta() const { return beta_; }
  double q() const { return q_; }
  int current_time() const { return static_cast<int>(prefix_sums_.size()) - 1; }
  std::optional<int> first_crossing() const { return first_crossing_; }
  bool detected() const { return first_crossing_.has_value(); }

 private:
  int horizon_;
  double beta_;
  double q_;
  std::vector<double> prefix_sums_;     // S_0 = 0, S_1, ..., S_tau
  std::vector<double> lookback_scale_;  // 1 / ((l+1)^beta * T^(1/2-beta))
  std::optional<int> first_crossing_;
  double max_d_ = 0.0;
};

}  // namespace dpmon

#endif  // DPMON_DETECTOR_HPP_
