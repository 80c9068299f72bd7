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

#include "dpmon/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpmon/errors.hpp"

namespace dpmon {

void validate(const AuditTuple& tuple) {
  if (!(tuple.epsilon > 0.0)) {
    throw ConfigError("AuditTuple: epsilon must be > 0");
  }
  if (tuple.input_x.size() != tuple.input_x_prime.size()) {
    throw ConfigError("AuditTuple: neighboring inputs must have equal length");
  }
}

int count_hits(std::span<const Output> outputs, const Event& event) {
  int hits = 0;
  for (const Output& output : outputs) {
    if (event_contains(event, output)) ++hits;
  }
  return hits;
}

StepStatistic estimate_step(int n, int n_x, int n_y, double epsilon,
                            double c_stab) {
  if (n < 1) throw ContractViolation("estimate_step: n must be >= 1");
  if (n_x < 0 || n_x > n || n_y < 0 || n_y > n) {
    throw ContractViolation("estimate_step: counts must lie in [0, n]");
  }
  if (c_stab < 0.0) {
    throw ContractViolation("estimate_step: c_stab must be >= 0");
  }

  const double nn = static_cast<double>(n);
  const double e_eps = std::exp(epsilon);
  const double fx = n_x / nn;
  const double fy = n_y / nn;

  StepStatistic stat;
  stat.n = n;
  stat.n_x = n_x;
  stat.n_y = n_y;
  // The n_y terms are exactly zero for n_y == 0 (and the variance term also
  // for n_y == n); skipping them keeps the result well-defined even when
  // exp(epsilon) overflows.
  stat.p_hat = n_y == 0 ? fx : (n_x - e_eps * n_y) / nn;
  const double var_y = (n_y == 0 || n_y == n)
                           ? 0.0
                           : e_eps * e_eps * (fy / nn) * (1.0 - fy);
  stat.sigma_hat = std::sqrt(fx / nn * (1.0 - fx) + var_y);
  stat.sigma_stab = std::max(stat.sigma_hat, c_stab);
  if (stat.sigma_stab > 0.0) {
    stat.ratio = stat.p_hat / stat.sigma_stab;
  } else if (stat.p_hat == 0.0) {
    stat.ratio = 0.0;  // 0/0 := 0
  } else {
    // Unstabilized degenerate batch (c_stab == 0, counts at a corner): the
    // sign of the gap is certain, so the ratio saturates.
    stat.ratio = std::copysign(std::numeric_limits<double>::infinity(),
                               stat.p_hat);
  }
  return stat;
}

double true_gap(double prob_x, double prob_y, double epsilon) {
  return prob_x - std::exp(epsilon) * prob_y;
}

}  // namespace dpmon
