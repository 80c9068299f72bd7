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

#ifndef DPMON_STATS_HPP_
#define DPMON_STATS_HPP_

#include "dpmon/random.hpp"

namespace dpmon {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile function (inverse CDF). Requires p in (0,1).
// Accuracy is near machine precision (rational approximation plus one
// Halley refinement step against normal_cdf).
double normal_quantile(double p);

// CDF of Laplace(mu, scale) at x.
double laplace_cdf(double x, double mu, double scale);

// Inverse-CDF samplers; each consumes exactly one uniform per variate.
// u = 0.5 maps to zero noise for the symmetric distributions, which is what
// makes deterministic "noiseless" traces possible in tests.
double sample_laplace(UniformSource& rng, double scale);
double sample_gaussian(UniformSource& rng, double stddev);
double sample_exponential(UniformSource& rng, double scale);

}  // namespace dpmon

#endif  // DPMON_STATS_HPP_
