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

#include "dpmon/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpmon/errors.hpp"
#include "dpmon/parallel.hpp"
#include "dpmon/stats.hpp"

namespace dpmon {
namespace {

void validate_request(const ThresholdRequest& req) {
  if (!(req.alpha > 0.0 && req.alpha < 1.0)) {
    throw ConfigError("ThresholdRequest: alpha must lie in (0,1)");
  }
  if (!(req.beta >= 0.0 && req.beta < 0.5)) {
    throw ConfigError("ThresholdRequest: beta must lie in [0, 1/2)");
  }
  if (req.grid < 2) throw ConfigError("ThresholdRequest: grid must be >= 2");
  if (req.reps < 1) throw ConfigError("ThresholdRequest: reps must be >= 1");
}

// (g/G)^(-beta) for gap g; weights[0] is unused.
std::vector<double> gap_weights(double beta, int grid) {
  std::vector<double> weights(static_cast<std::size_t>(grid) + 1, 0.0);
  for (int g = 1; g <= grid; ++g) {
    weights[static_cast<std::size_t>(g)] =
        std::pow(static_cast<double>(g) / grid, -beta);
  }
  return weights;
}

// max over all pairs u < v of (B(v) - B(u)) * weight(v - u). The weight
// multiply is hoisted out of the inner max; weights are positive, so this
// selects exactly the same maximum as multiplying per pair.
double sup_over_pairs(const std::vector<double>& path,
                      const std::vector<double>& weights) {
  const int grid = static_cast<int>(path.size()) - 1;
  const double* b = path.data();
  double best = -std::numeric_limits<double>::infinity();
  for (int g = 1; g <= grid; ++g) {
    const double* hi = b + g;
    const int count = grid - g + 1;
    double gap_max = -std::numeric_limits<double>::infinity();
#pragma omp simd reduction(max : gap_max)
    for (int i = 0; i < count; ++i) {
      const double diff = hi[i] - b[i];
      gap_max = gap_max > diff ? gap_max : diff;
    }
    best = std::max(best, gap_max * weights[static_cast<std::size_t>(g)]);
  }
  return best;
}

struct CacheEntry {
  double alpha;
  double beta;
  int grid;
  int reps;
  std::uint64_t seed;
  double q;

  bool matches(const ThresholdRequest& req, double req_alpha) const {
    return alpha == req_alpha && beta == req.beta && grid == req.grid &&
           reps == req.reps && seed == req.seed;
  }
};

struct CacheTable {
  std::vector<CacheEntry> entries;
  bool dirty = false;  // true when the on-disk content needs rewriting
};

CacheTable load_cache(const std::string& path) {
  CacheTable table;
  std::ifstream in(path);
  if (!in) return table;  // absent cache: nothing to load

  std::string line;
  bool corrupt = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    CacheEntry entry{};
    std::string extra;
    if (fields >> entry.alpha >> entry.beta >> entry.grid >> entry.reps >>
            entry.seed >> entry.q &&
        !(fields >> extra)) {
      table.entries.push_back(entry);
    } else {
      corrupt = true;
    }
  }
  if (corrupt) {
    std::fprintf(stderr,
                 "dpmon: warning: threshold cache %s is corrupt; "
                 "recomputing and rewriting\n",
                 path.c_str());
    table.dirty = true;
  }
  return table;
}

void store_cache(const CacheTable& table, const std::string& path) {
  const std::string tmp_path = path + ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) {
      throw std::runtime_error("threshold cache: cannot write " + tmp_path);
    }
    char line[160];
    for (const CacheEntry& e : table.entries) {
      std::snprintf(line, sizeof(line), "%.17g %.17g %d %d %llu %.17g\n",
                    e.alpha, e.beta, e.grid, e.reps,
                    static_cast<unsigned long long>(e.seed), e.q);
      out << line;
    }
  }
  if (std::rename(tmp_path.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("threshold cache: cannot rename " + tmp_path +
                             " to " + path);
  }
}

}  // namespace

std::vector<double> simulate_brownian_path(int grid, UniformSource& rng) {
  if (grid < 1) throw ConfigError("simulate_brownian_path: grid must be >= 1");
  std::vector<double> path(static_cast<std::size_t>(grid) + 1);
  const double step_sd = std::sqrt(1.0 / grid);
  path[0] = 0.0;
  for (int k = 1; k <= grid; ++k) {
    path[static_cast<std::size_t>(k)] =
        path[static_cast<std::size_t>(k) - 1] + sample_gaussian(rng, step_sd);
  }
  return path;
}

double simulate_sup_increment(double beta, int grid, UniformSource& rng) {
  if (grid < 2) throw ConfigError("simulate_sup_increment: grid must be >= 2");
  const std::vector<double> weights = gap_weights(beta, grid);
  const std::vector<double> path = simulate_brownian_path(grid, rng);
  return sup_over_pairs(path, weights);
}

std::vector<double> sup_increment_draws(double beta, int grid, int reps,
                                        std::uint64_t seed, unsigned threads) {
  if (grid < 2) throw ConfigError("sup_increment_draws: grid must be >= 2");
  if (reps < 1) throw ConfigError("sup_increment_draws: reps must be >= 1");
  const std::vector<double> weights = gap_weights(beta, grid);
  std::vector<double> draws(static_cast<std::size_t>(reps));
  parallel_for(
      static_cast<std::size_t>(reps),
      [&](std::size_t i) {
        RandomStream stream(seed, {static_cast<std::uint64_t>(i)});
        const std::vector<double> path = simulate_brownian_path(grid, stream);
        draws[i] = sup_over_pairs(path, weights);
      },
      threads);
  return draws;
}

double empirical_upper_quantile(std::vector<double> draws, double alpha) {
  if (draws.empty()) {
    throw ConfigError("empirical_upper_quantile: no draws");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("empirical_upper_quantile: alpha must lie in (0,1)");
  }
  const double reps = static_cast<double>(draws.size());
  if (reps * alpha < 10.0) {
    std::fprintf(stderr,
                 "dpmon: warning: reps*alpha = %.3g < 10, the upper-%g "
                 "quantile estimate is unreliable\n",
                 reps * alpha, alpha);
  }
  // Order statistic at rank ceil((1-alpha)*R); conservative, no interpolation.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * reps));
  rank = std::clamp<std::size_t>(rank, 1, draws.size());
  std::nth_element(draws.begin(), draws.begin() + (rank - 1), draws.end());
  return draws[rank - 1];
}

double quantile(const ThresholdRequest& req, unsigned threads) {
  validate_request(req);
  return empirical_upper_quantile(
      sup_increment_draws(req.beta, req.grid, req.reps, req.seed, threads),
      req.alpha);
}

std::vector<double> quantiles(const ThresholdRequest& base,
                              std::span<const double> alphas,
                              unsigned threads) {
  std::vector<double> out;
  out.reserve(alphas.size());
  ThresholdRequest req = base;
  for (double alpha : alphas) {
    req.alpha = alpha;
    validate_request(req);
  }
  const std::vector<double> draws =
      sup_increment_draws(base.beta, base.grid, base.reps, base.seed, threads);
  for (double alpha : alphas) {
    out.push_back(empirical_upper_quantile(draws, alpha));
  }
  return out;
}

std::vector<double> cached_quantiles(const ThresholdRequest& base,
                                     std::span<const double> alphas,
                                     const std::string& cache_path,
                                     unsigned threads) {
  CacheTable table = load_cache(cache_path);

  std::vector<double> out(alphas.size(),
                          std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    ThresholdRequest req = base;
    req.alpha = alphas[i];
    validate_request(req);
    bool found = false;
    for (const CacheEntry& entry : table.entries) {
      if (entry.matches(base, alphas[i])) {
        out[i] = entry.q;
        found = true;
        break;
      }
    }
    if (!found) missing.push_back(i);
  }

  if (!missing.empty()) {
    const std::vector<double> draws = sup_increment_draws(
        base.beta, base.grid, base.reps, base.seed, threads);
    for (std::size_t i : missing) {
      out[i] = empirical_upper_quantile(draws, alphas[i]);
      table.entries.push_back(CacheEntry{alphas[i], base.beta, base.grid,
                                         base.reps, base.seed, out[i]});
    }
    table.dirty = true;
  }
  if (table.dirty) store_cache(table, cache_path);
  return out;
}

double cached_quantile(const ThresholdRequest& req,
                       const std::string& cache_path, unsigned threads) {
  const double alphas[1] = {req.alpha};
  return cached_quantiles(req, alphas, cache_path, threads)[0];
}

}  // namespace dpmon
