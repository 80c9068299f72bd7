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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpmon/errors.hpp"
#include "dpmon/threshold.hpp"
#include "test_support.hpp"

using namespace dpmon;
using dpmon_test::ConstSource;

namespace {

std::string temp_path(const std::string& name) {
  return "dpmon_test_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("threshold") {

TEST_CASE("flat path gives a zero supremum") {
  ConstSource mid(0.5);  // every Gaussian increment is exactly zero
  CHECK(simulate_sup_increment(0.25, 64, mid) == 0.0);
  CHECK(simulate_sup_increment(0.0, 2, mid) == 0.0);
}

TEST_CASE("grid contracts") {
  ConstSource mid(0.5);
  CHECK_THROWS_AS(simulate_sup_increment(0.25, 1, mid), ConfigError);
  CHECK_THROWS_AS(sup_increment_draws(0.25, 2, 0, 1), ConfigError);
  CHECK_THROWS_AS(quantile(ThresholdRequest{0.0, 0.25, 100, 100, 1}), ConfigError);
  CHECK_THROWS_AS(quantile(ThresholdRequest{0.05, 0.5, 100, 100, 1}), ConfigError);
}

TEST_CASE("beta = 0 reduces to the running-minimum form") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    RandomStream path_stream(seed);
    const auto path = simulate_brownian_path(256, path_stream);
    double best = -1e300;
    double running_min = 0.0;
    for (std::size_t v = 1; v < path.size(); ++v) {
      running_min = std::min(running_min, path[v - 1]);
      best = std::max(best, path[v] - running_min);
    }
    RandomStream sup_stream(seed);
    CHECK(simulate_sup_increment(0.0, 256, sup_stream) == best);
  }
}

TEST_CASE("matches the literal pair scan") {
  for (double beta : {0.0, 0.25, 0.4}) {
    for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
      RandomStream path_stream(seed);
      const auto path = simulate_brownian_path(64, path_stream);
      const double expected = dpmon_test::brute_force_sup_pairs(path, beta);
      RandomStream sup_stream(seed);
      const double actual = simulate_sup_increment(beta, 64, sup_stream);
      CHECK(actual == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("path marginals: B(1) is standard normal") {
  const int grid = 1000;
  const int reps = 100000;
  std::vector<double> endpoints(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream stream(500, {static_cast<std::uint64_t>(r)});
    endpoints[static_cast<std::size_t>(r)] =
        simulate_brownian_path(grid, stream).back();
  }
  CHECK(std::fabs(dpmon_test::mean_of(endpoints)) <= 0.015);
  const double var = dpmon_test::variance_of(endpoints);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("sup-increment draws are positive in practice") {
  const auto draws = sup_increment_draws(0.25, 128, 2000, 77);
  int positive = 0;
  for (double d : draws) {
    REQUIRE(d >= 0.0);
    if (d > 0.0) ++positive;
  }
  CHECK(positive >= 1998);  // >= 99.9%
}

TEST_CASE("empirical quantile rank convention") {
  std::vector<double> draws;
  for (int i = 100; i >= 1; --i) draws.push_back(i);  // unsorted on purpose
  // rank ceil(0.95 * 100) = 95 -> 95th smallest.
  CHECK(empirical_upper_quantile(draws, 0.05) == 95.0);
  CHECK(empirical_upper_quantile(draws, 0.5) == 50.0);
  // Tiny reps*alpha only warns, still returns the order statistic.
  CHECK(empirical_upper_quantile({1.0, 2.0, 3.0}, 0.1) == 3.0);
  CHECK_THROWS_AS(empirical_upper_quantile({}, 0.1), ConfigError);
}

TEST_CASE("quantiles are monotone in alpha and beta") {
  ThresholdRequest req;
  req.grid = 300;
  req.reps = 4000;
  req.seed = 99;

  req.beta = 0.25;
  req.alpha = 0.01;
  const double q01 = quantile(req);
  req.alpha = 0.05;
  const double q05 = quantile(req);
  CHECK(q01 >= q05);

  // Same seed couples the paths, so monotonicity in beta is exact.
  req.alpha = 0.05;
  req.beta = 0.0;
  const double qb0 = quantile(req);
  req.beta = 0.25;
  const double qb25 = quantile(req);
  req.beta = 0.4;
  const double qb40 = quantile(req);
  CHECK(qb0 <= qb25);
  CHECK(qb25 <= qb40);

  // Determinism: repeating the request reproduces the value.
  req.beta = 0.25;
  CHECK(quantile(req) == qb25);
}

TEST_CASE("threshold cache") {
  const std::string path = temp_path("cache.txt");
  std::remove(path.c_str());

  ThresholdRequest req;
  req.alpha = 0.05;
  req.beta = 0.25;
  req.grid = 200;
  req.reps = 2000;
  req.seed = 7;

  SUBCASE("hit returns the stored value without recomputation") {
    // Pre-seed the cache with a sentinel value for this exact key; a cache
    // hit must return it verbatim.
    {
      std::ofstream out(path);
      out << "0.050000000000000003 0.25 200 2000 7 123.25\n";
    }
    CHECK(cached_quantile(req, path) == 123.25);
  }

  SUBCASE("compute, store, reuse") {
    const double q = cached_quantile(req, path);
    const std::string bytes = slurp(path);
    CHECK(cached_quantile(req, path) == q);
    CHECK(slurp(path) == bytes);  // unchanged on a pure hit

    ThresholdRequest other = req;
    other.seed = 8;
    const double q_other = cached_quantile(other, path);
    CHECK(q_other != q);
    CHECK(slurp(path).size() > bytes.size());  // miss appended a row
  }

  SUBCASE("record format: six space-separated fields, 17-digit reals") {
    const double q = cached_quantile(req, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    std::istringstream fields(line);
    std::string alpha_s, beta_s, grid_s, reps_s, seed_s, q_s, extra;
    const bool parsed = static_cast<bool>(
        fields >> alpha_s >> beta_s >> grid_s >> reps_s >> seed_s >> q_s);
    REQUIRE(parsed);
    const bool has_extra = static_cast<bool>(fields >> extra);
    CHECK_FALSE(has_extra);
    CHECK(line.find("  ") == std::string::npos);  // single spaces
    CHECK(grid_s == "200");
    CHECK(reps_s == "2000");
    CHECK(seed_s == "7");
    // 17 significant digits round-trip doubles exactly.
    CHECK(std::stod(alpha_s) == 0.05);
    CHECK(std::stod(q_s) == q);
    char expected[40];
    std::snprintf(expected, sizeof(expected), "%.17g", 0.05);
    CHECK(alpha_s == expected);
  }

  SUBCASE("corrupt cache recomputes and rewrites") {
    {
      std::ofstream out(path);
      out << "not a record at all\n";
    }
    const double q = cached_quantile(req, path);
    CHECK(std::isfinite(q));
    // The rewritten file parses cleanly now.
    CHECK(cached_quantile(req, path) == q);
  }

  SUBCASE("shared draws serve several alphas at once") {
    const double alphas[2] = {0.05, 0.0125};
    const auto qs = cached_quantiles(req, alphas, path);
    CHECK(qs[0] == cached_quantile(req, path));
    ThresholdRequest strict = req;
    strict.alpha = 0.0125;
    CHECK(qs[1] == cached_quantile(strict, path));
    CHECK(qs[1] >= qs[0]);
  }

  std::remove(path.c_str());
}

TEST_CASE("grid refinement changes the quantile only slightly") {
  ThresholdRequest coarse{0.05, 0.25, 500, 100000, kDefaultThresholdSeed};
  ThresholdRequest fine{0.05, 0.25, 2000, 100000, kDefaultThresholdSeed};
  const double q_coarse = quantile(coarse);
  const double q_fine = quantile(fine);
  CHECK(std::fabs(q_fine - q_coarse) < 0.05);
  // The discrete supremum under-estimates, so refining cannot lose more than
  // Monte Carlo noise.
  CHECK(q_fine >= q_coarse - 0.02);
}

}  // TEST_SUITE
