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

#ifndef DPMON_ESTIMATION_HPP_
#define DPMON_ESTIMATION_HPP_

#include <span>
#include <vector>

#include "dpmon/mechanisms.hpp"

namespace dpmon {

// Default variance stabilization constant. Any fixed tiny value behaves
// identically at experiment scale; exposed as a knob everywhere it is used.
inline constexpr double kDefaultStabilization = 1e-6;

// One monitoring configuration: two neighboring inputs, a target event and
// the advertised privacy level the mechanism is held to.
struct AuditTuple {
  std::vector<double> input_x;
  std::vector<double> input_x_prime;
  Event event;
  double epsilon = 1.0;
};

// Throws ConfigError unless epsilon > 0 and the two inputs have equal length
// (neighboring inputs as modeled here always do).
void validate(const AuditTuple& tuple);

// Per-time-point estimate. Exact integer counts are kept next to the derived
// reals so the defining identities can be asserted bit-exactly.
struct StepStatistic {
  int n = 0;
  int n_x = 0;             // hits among the x-batch
  int n_y = 0;             // hits among the x'-batch
  double p_hat = 0.0;      // (n_x - e^eps * n_y) / n
  double sigma_hat = 0.0;  // sqrt of the plug-in variance estimate
  double sigma_stab = 0.0; // max(sigma_hat, c_stab)
  double ratio = 0.0;      // p_hat / sigma_stab, with 0/0 := 0
};

// Number of outputs belonging to the event.
int count_hits(std::span<const Output> outputs, const Event& event);

// Standardized gap estimate from the two hit counts. Requires
// 0 <= n_x, n_y <= n, n >= 1, c_stab >= 0. No clamping is applied to p_hat.
// When sigma_hat and p_hat are both zero the ratio is defined as 0, also for
// c_stab == 0.
StepStatistic estimate_step(int n, int n_x, int n_y, double epsilon,
                            double c_stab);

// Population-level gap P_x - e^eps * P_y; test/oracle helper for
// configurations with closed-form output probabilities.
double true_gap(double prob_x, double prob_y, double epsilon);

}  // namespace dpmon

#endif  // DPMON_ESTIMATION_HPP_
