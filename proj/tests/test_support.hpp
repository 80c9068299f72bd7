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

// Test-only uniform sources and independent oracles. Everything here is kept
// independent of the library paths it is used to check: the oracles evaluate
// the defining formulas literally.

#ifndef DPMON_TESTS_TEST_SUPPORT_HPP_
#define DPMON_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpmon/random.hpp"

namespace dpmon_test {

// Constant source; 0.5 turns every symmetric inverse-CDF noise draw into
// exactly zero (noiseless traces).
class ConstSource final : public dpmon::UniformSource {
 public:
  explicit ConstSource(double value) : value_(value) {}
  double next_uniform() override { return value_; }

 private:
  double value_;
};

// Replays a fixed sequence; throws when exhausted.
class SequenceSource final : public dpmon::UniformSource {
 public:
  explicit SequenceSource(std::vector<double> values)
      : values_(std::move(values)) {}
  double next_uniform() override {
    if (index_ >= values_.size()) {
      throw std::out_of_range("SequenceSource exhausted");
    }
    return values_[index_++];
  }
  std::size_t consumed() const { return index_; }

 private:
  std::vector<double> values_;
  std::size_t index_ = 0;
};

// Counts draws passed through to an inner source.
class CountingSource final : public dpmon::UniformSource {
 public:
  explicit CountingSource(dpmon::UniformSource& inner) : inner_(&inner) {}
  double next_uniform() override {
    ++count_;
    return inner_->next_uniform();
  }
  std::size_t count() const { return count_; }

 private:
  dpmon::UniformSource* inner_;
  std::size_t count_ = 0;
};

// Literal evaluation of the weighted lookback aggregation: for every tau the
// maximum over l < tau of the window sum of the last l+1 ratios divided by
// (l+1)^beta * T^(1/2-beta). Quadratic double loop, no prefix sums.
inline std::vector<double> brute_force_detector_values(
    std::span<const double> ratios, int horizon, double beta) {
  std::vector<double> d_values;
  const double horizon_scale = std::pow(static_cast<double>(horizon), 0.5 - beta);
  for (std::size_t tau = 1; tau <= ratios.size(); ++tau) {
    double best = -1e300;
    for (std::size_t l = 0; l < tau; ++l) {
      double window_sum = 0.0;
      for (std::size_t t = tau - l; t <= tau; ++t) {
        window_sum += ratios[t - 1];
      }
      const double value =
          window_sum / (std::pow(static_cast<double>(l + 1), beta) * horizon_scale);
      best = std::max(best, value);
    }
    d_values.push_back(best);
  }
  return d_values;
}

// Literal pair scan of the weighted Brownian increments, division form.
inline double brute_force_sup_pairs(std::span<const double> path, double beta) {
  const int grid = static_cast<int>(path.size()) - 1;
  double best = -1e300;
  for (int u = 0; u < grid; ++u) {
    for (int v = u + 1; v <= grid; ++v) {
      const double gap = static_cast<double>(v - u) / grid;
      best = std::max(best, (path[v] - path[u]) / std::pow(gap, beta));
    }
  }
  return best;
}

inline double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

inline double variance_of(std::span<const double> values) {
  const double mean = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size() - 1);
}

}  // namespace dpmon_test

#endif  // DPMON_TESTS_TEST_SUPPORT_HPP_
