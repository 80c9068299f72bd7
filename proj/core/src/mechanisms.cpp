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

#include "dpmon/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "dpmon/errors.hpp"
#include "dpmon/stats.hpp"

namespace dpmon {
namespace {

void validate_laplace_sum(const LaplaceSum& spec) {
  for (double x : spec.database) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ConfigError("LaplaceSum: database entries must lie in [0,1]");
    }
  }
  if (const auto* lap = std::get_if<LaplaceNoise>(&spec.noise)) {
    if (!(lap->scale > 0.0)) {
      throw ConfigError("LaplaceSum: Laplace scale must be > 0");
    }
  } else {
    const auto& gauss = std::get<GaussianNoise>(spec.noise);
    if (!(gauss.variance > 0.0)) {
      throw ConfigError("LaplaceSum: Gaussian variance must be > 0");
    }
  }
}

void validate_rnm(const ReportNoisyMax& spec) {
  if (spec.queries.empty()) {
    throw ConfigError("ReportNoisyMax: query vector must be non-empty");
  }
  if (!(spec.epsilon > 0.0)) {
    throw ConfigError("ReportNoisyMax: epsilon must be > 0");
  }
}

void validate_svt(const Svt& spec) {
  if (!(spec.epsilon > 0.0)) throw ConfigError("Svt: epsilon must be > 0");
  if (spec.bound < 1) throw ConfigError("Svt: bound c must be >= 1");
  if (!(spec.sensitivity > 0.0)) {
    throw ConfigError("Svt: sensitivity Delta must be > 0");
  }
}

double checked_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": produced a non-finite value");
  }
  return v;
}

double laplace_sum_sample(const LaplaceSum& spec, UniformSource& rng) {
  const double sum =
      std::accumulate(spec.database.begin(), spec.database.end(), 0.0);
  double noise;
  if (const auto* lap = std::get_if<LaplaceNoise>(&spec.noise)) {
    noise = sample_laplace(rng, lap->scale);
  } else {
    noise = sample_gaussian(rng, std::sqrt(std::get<GaussianNoise>(spec.noise).variance));
  }
  return checked_finite(sum + noise, "LaplaceSum");
}

double rnm_sample(const ReportNoisyMax& spec, UniformSource& rng) {
  // Counting queries have sensitivity 1, so the Laplace scale is 2/epsilon.
  const double noise_scale = 2.0 / spec.epsilon;

  std::size_t argmax = 0;
  double max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.queries.size(); ++i) {
    const double noise = spec.variant == RnmVariant::kExponentialNoiseIndex
                             ? sample_exponential(rng, noise_scale)
                             : sample_laplace(rng, noise_scale);
    const double noisy = spec.queries[i] + noise;
    // Ties go to the lowest index (strict > keeps the earlier winner).
    if (noisy > max_value) {
      max_value = noisy;
      argmax = i;
    }
  }
  if (spec.variant == RnmVariant::kReturnMaxValue) {
    return checked_finite(max_value, "ReportNoisyMax");
  }
  return static_cast<double>(argmax + 1);  // 1-based index
}

Output run_laplace_sum_unchecked(const LaplaceSum& spec, UniformSource& rng) {
  return Scalar{laplace_sum_sample(spec, rng)};
}

Output run_rnm_unchecked(const ReportNoisyMax& spec, UniformSource& rng) {
  return Scalar{rnm_sample(spec, rng)};
}

struct SvtNoisePlan {
  double threshold_scale;
  double query_scale;  // 0 means the variant adds no query noise
  bool resample_threshold;
  bool bound_count;
};

SvtNoisePlan svt_noise_plan(const Svt& spec) {
  const double eps = spec.epsilon;
  const double delta = spec.sensitivity;
  const double c = static_cast<double>(spec.bound);
  switch (spec.variant) {
    case SvtVariant::kV1:
      // Correct non-resampling split: threshold noise drawn once at scale
      // 2*Delta/eps, query noise at 4*c*Delta/eps.
      return {2.0 * delta / eps, 4.0 * c * delta / eps, false, true};
    case SvtVariant::kV2:
      return {2.0 * c * delta / eps, 4.0 * c * delta / eps, true, true};
    case SvtVariant::kV4:
      // Miscalibrated: both noises sized as if each could spend the whole
      // budget on its own (no epsilon split, no bound factor), threshold
      // noise drawn once. Detectably leaks even at c = 1.
      return {delta / eps, 2.0 * delta / eps, false, true};
    case SvtVariant::kV5:
      // No query noise; everything else as in V2.
      return {2.0 * c * delta / eps, 0.0, true, true};
    case SvtVariant::kV6:
      // No abort bound; always answers all d queries.
      return {2.0 * c * delta / eps, 4.0 * c * delta / eps, true, false};
  }
  throw ConfigError("Svt: unknown variant");
}

void svt_sample_into(const Svt& spec, const SvtNoisePlan& plan,
                     UniformSource& rng, std::vector<std::uint8_t>& out) {
  out.clear();
  double threshold_noise = sample_laplace(rng, plan.threshold_scale);
  int count = 0;
  for (double query : spec.queries) {
    const double query_noise =
        plan.query_scale > 0.0 ? sample_laplace(rng, plan.query_scale) : 0.0;
    if (query + query_noise >= spec.threshold + threshold_noise) {
      out.push_back(1);
      if (plan.resample_threshold) {
        threshold_noise = sample_laplace(rng, plan.threshold_scale);
      }
      if (plan.bound_count && ++count >= spec.bound) break;
    } else {
      out.push_back(0);
    }
  }
}

Output run_svt_unchecked(const Svt& spec, UniformSource& rng) {
  Bits out;
  out.values.reserve(spec.queries.size());
  svt_sample_into(spec, svt_noise_plan(spec), rng, out.values);
  return out;
}

struct EventMismatch {
  const Event& event;
  const Output& output;
  [[noreturn]] void raise() const {
    throw ConfigError("event/output type mismatch: event " +
                      event_type_name(event) + " cannot be applied to output " +
                      output_type_name(output));
  }
};

}  // namespace

bool event_contains(const Event& event, const Output& output) {
  const EventMismatch mismatch{event, output};
  if (const auto* half_line = std::get_if<HalfLineLE>(&event)) {
    const auto* scalar = std::get_if<Scalar>(&output);
    if (scalar == nullptr) mismatch.raise();
    return scalar->value <= half_line->bound;
  }
  if (const auto* point_set = std::get_if<PointSet>(&event)) {
    const auto* scalar = std::get_if<Scalar>(&output);
    if (scalar == nullptr) mismatch.raise();
    return std::find(point_set->points.begin(), point_set->points.end(),
                     scalar->value) != point_set->points.end();
  }
  const auto& exact = std::get<ExactBits>(event);
  const auto* bits = std::get_if<Bits>(&output);
  if (bits == nullptr) mismatch.raise();
  return bits->values == exact.pattern;
}

std::string event_type_name(const Event& event) {
  if (std::holds_alternative<HalfLineLE>(event)) return "HalfLineLE";
  if (std::holds_alternative<PointSet>(event)) return "PointSet";
  return "ExactBits";
}

std::string output_type_name(const Output& output) {
  return std::holds_alternative<Scalar>(output) ? "Scalar" : "Bits";
}

void validate(const MechanismSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LaplaceSum>) {
          validate_laplace_sum(s);
        } else if constexpr (std::is_same_v<T, ReportNoisyMax>) {
          validate_rnm(s);
        } else {
          validate_svt(s);
        }
      },
      spec);
}

Output run_laplace_sum(const LaplaceSum& spec, UniformSource& rng) {
  validate_laplace_sum(spec);
  return run_laplace_sum_unchecked(spec, rng);
}

Output run_rnm(const ReportNoisyMax& spec, UniformSource& rng) {
  validate_rnm(spec);
  return run_rnm_unchecked(spec, rng);
}

Output run_svt(const Svt& spec, UniformSource& rng) {
  validate_svt(spec);
  return run_svt_unchecked(spec, rng);
}

Output run_mechanism(const MechanismSpec& spec, UniformSource& rng) {
  validate(spec);
  return std::visit(
      [&rng](const auto& s) -> Output {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LaplaceSum>) {
          return run_laplace_sum_unchecked(s, rng);
        } else if constexpr (std::is_same_v<T, ReportNoisyMax>) {
          return run_rnm_unchecked(s, rng);
        } else {
          return run_svt_unchecked(s, rng);
        }
      },
      spec);
}

std::vector<Output> sample_batch(const MechanismSpec& spec, int n,
                                 UniformSource& rng) {
  if (n < 1) throw ConfigError("sample_batch: n must be >= 1");
  validate(spec);
  std::vector<Output> outputs;
  outputs.reserve(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        for (int i = 0; i < n; ++i) {
          if constexpr (std::is_same_v<T, LaplaceSum>) {
            outputs.push_back(run_laplace_sum_unchecked(s, rng));
          } else if constexpr (std::is_same_v<T, ReportNoisyMax>) {
            outputs.push_back(run_rnm_unchecked(s, rng));
          } else {
            outputs.push_back(run_svt_unchecked(s, rng));
          }
        }
      },
      spec);
  return outputs;
}

int count_hits_sampled(const MechanismSpec& spec, int n, const Event& event,
                       UniformSource& rng) {
  if (n < 1) throw ConfigError("count_hits_sampled: n must be >= 1");
  validate(spec);
  int hits = 0;
  if (const auto* svt = std::get_if<Svt>(&spec)) {
    const auto* exact = std::get_if<ExactBits>(&event);
    if (exact == nullptr) {
      throw ConfigError("event/output type mismatch: event " +
                        event_type_name(event) +
                        " cannot be applied to output Bits");
    }
    const SvtNoisePlan plan = svt_noise_plan(*svt);
    std::vector<std::uint8_t> scratch;
    scratch.reserve(svt->queries.size());
    for (int i = 0; i < n; ++i) {
      svt_sample_into(*svt, plan, rng, scratch);
      if (scratch == exact->pattern) ++hits;
    }
    return hits;
  }
  for (int i = 0; i < n; ++i) {
    const double value =
        std::holds_alternative<LaplaceSum>(spec)
            ? laplace_sum_sample(std::get<LaplaceSum>(spec), rng)
            : rnm_sample(std::get<ReportNoisyMax>(spec), rng);
    if (event_contains(event, Output{Scalar{value}})) ++hits;
  }
  return hits;
}

MechanismSpec with_input(const MechanismSpec& spec,
                         const std::vector<double>& input) {
  MechanismSpec bound = spec;
  std::visit(
      [&input](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LaplaceSum>) {
          s.database = input;
        } else {
          s.queries = input;
        }
      },
      bound);
  return bound;
}

const std::vector<double>& input_of(const MechanismSpec& spec) {
  return std::visit(
      [](const auto& s) -> const std::vector<double>& {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LaplaceSum>) {
          return s.database;
        } else {
          return s.queries;
        }
      },
      spec);
}

const MechanismSpec& MechanismTimeline::at(int t) const {
  const MechanismSpec* current = &initial;
  for (const auto& [time, spec] : changes) {
    if (t >= time) {
      current = &spec;
    } else {
      break;
    }
  }
  return *current;
}

}  // namespace dpmon
