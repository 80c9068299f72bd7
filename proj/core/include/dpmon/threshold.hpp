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

#ifndef DPMON_THRESHOLD_HPP_
#define DPMON_THRESHOLD_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpmon/random.hpp"

namespace dpmon {

// Calibration constants fixed per release; changing any of them changes every
// cached threshold key.
inline constexpr int kDefaultThresholdGrid = 2000;
inline constexpr int kDefaultThresholdReps = 200000;
inline constexpr std::uint64_t kDefaultThresholdSeed = 20240601;

// Monte Carlo request for q(alpha), the upper-alpha quantile of the supremum
// of beta-weighted Brownian increments
//
//   D = sup over 0 <= x < y <= 1 of (B(y) - B(x)) / (y - x)^beta.
//
// (The increment is oriented so the denominator is a fractional power of a
// positive gap; the mirrored orientation would put a negative base under the
// power.)
struct ThresholdRequest {
  double alpha = 0.05;
  double beta = 0.25;
  int grid = kDefaultThresholdGrid;   // G, path discretization points
  int reps = kDefaultThresholdReps;   // R, Monte Carlo replications
  std::uint64_t seed = kDefaultThresholdSeed;
};

// Standard Brownian path on the grid k/G, k = 0..G: cumulative sums of
// independent Normal(0, 1/G) increments. Returns G+1 values starting at 0.
std::vector<double> simulate_brownian_path(int grid, UniformSource& rng);

// One draw of D on a discrete grid: simulates a path and scans all grid
// pairs u < v (direct O(G^2)). Requires grid >= 2.
double simulate_sup_increment(double beta, int grid, UniformSource& rng);

// reps independent draws of D; draw i uses the stream derived from
// (seed, i), so the result is independent of the thread count.
// threads == 0 means hardware concurrency.
std::vector<double> sup_increment_draws(double beta, int grid, int reps,
                                        std::uint64_t seed,
                                        unsigned threads = 0);

// Empirical upper-alpha quantile: order statistic at rank ceil((1-alpha)*R),
// no interpolation (conservative). Warns on stderr when reps*alpha < 10.
double empirical_upper_quantile(std::vector<double> draws, double alpha);

// q(alpha) for the request; deterministic given the seed.
double quantile(const ThresholdRequest& req, unsigned threads = 0);

// Several alphas against one set of draws (one simulation pass).
std::vector<double> quantiles(const ThresholdRequest& base,
                              std::span<const double> alphas,
                              unsigned threads = 0);

// Cache-backed quantile. The cache is a human-readable text table, one
// record per line: `alpha beta grid reps seed q`, reals with 17 significant
// digits. An entry matches only on all five key fields. Corrupt or
// unreadable files are recomputed and rewritten with a warning; writes are
// atomic (temp file + rename).
double cached_quantile(const ThresholdRequest& req,
                       const std::string& cache_path, unsigned threads = 0);

// Cache-backed variant of quantiles(): simulates at most once for all alphas
// missing from the cache.
std::vector<double> cached_quantiles(const ThresholdRequest& base,
                                     std::span<const double> alphas,
                                     const std::string& cache_path,
                                     unsigned threads = 0);

}  // namespace dpmon

#endif  // DPMON_THRESHOLD_HPP_
