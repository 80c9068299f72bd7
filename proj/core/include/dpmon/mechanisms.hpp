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

#ifndef DPMON_MECHANISMS_HPP_
#define DPMON_MECHANISMS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dpmon/random.hpp"

namespace dpmon {

// ---------------------------------------------------------------------------
// Mechanism outputs
// ---------------------------------------------------------------------------

struct Scalar {
  double value = 0.0;
};

struct Bits {
  std::vector<std::uint8_t> values;  // each 0 or 1
};

// One mechanism run produces either a real value or a 0/1 sequence.
using Output = std::variant<Scalar, Bits>;

// ---------------------------------------------------------------------------
// Output events
// ---------------------------------------------------------------------------

// (-inf, bound]
struct HalfLineLE {
  double bound = 0.0;
};

// Finite set of reals, membership by exact equality (intended for
// integer-valued index outputs).
struct PointSet {
  std::vector<double> points;
};

// A single exact bit pattern.
struct ExactBits {
  std::vector<std::uint8_t> pattern;
};

using Event = std::variant<HalfLineLE, PointSet, ExactBits>;

// Membership test. HalfLineLE/PointSet apply to Scalar outputs only and
// ExactBits to Bits outputs only; a mismatch is a configuration error (throws
// ConfigError naming both types), never a silent false.
bool event_contains(const Event& event, const Output& output);

std::string event_type_name(const Event& event);
std::string output_type_name(const Output& output);

// ---------------------------------------------------------------------------
// Mechanism specifications
// ---------------------------------------------------------------------------

struct LaplaceNoise {
  double scale = 1.0;
};

struct GaussianNoise {
  double variance = 1.0;
};

// Noisy sum over a database with entries in [0,1] (sensitivity 1). The
// Gaussian option reproduces the "same mean and variance" noise swap:
// variance 2b^2 matches Laplace(b).
struct LaplaceSum {
  std::vector<double> database;
  std::variant<LaplaceNoise, GaussianNoise> noise;
};

enum class RnmVariant {
  kReturnIndex,            // correct: argmax index of Laplace-noised queries
  kReturnMaxValue,         // flawed: leaks the maximum noisy value itself
  kExponentialNoiseIndex,  // benign: argmax index under exponential noise
};

// Report Noisy Max over counting queries with per-query sensitivity 1.
struct ReportNoisyMax {
  std::vector<double> queries;
  double epsilon = 1.0;
  RnmVariant variant = RnmVariant::kReturnIndex;
};

// The SVT variant taxonomy follows the usual numbering for correct (1, 2)
// and flawed (4, 5, 6) incarnations of the sparse vector technique.
enum class SvtVariant { kV1, kV2, kV4, kV5, kV6 };

struct Svt {
  std::vector<double> queries;
  SvtVariant variant = SvtVariant::kV2;
  double epsilon = 1.0;
  double threshold = 1.0;    // Gamma
  int bound = 1;             // c, max number of 1-outputs before aborting
  double sensitivity = 1.0;  // Delta, shared by all queries
};

using MechanismSpec = std::variant<LaplaceSum, ReportNoisyMax, Svt>;

// Throws ConfigError on broken invariants (epsilon > 0, c >= 1, Delta > 0,
// positive noise scales/variance, database entries in [0,1], RNM needs at
// least one query).
void validate(const MechanismSpec& spec);

// ---------------------------------------------------------------------------
// Samplers. One call = one independent mechanism run; all randomness comes
// from the supplied stream, so equal streams give equal outputs.
// ---------------------------------------------------------------------------

Output run_laplace_sum(const LaplaceSum& spec, UniformSource& rng);
Output run_rnm(const ReportNoisyMax& spec, UniformSource& rng);
Output run_svt(const Svt& spec, UniformSource& rng);
Output run_mechanism(const MechanismSpec& spec, UniformSource& rng);

// n independent runs.
std::vector<Output> sample_batch(const MechanismSpec& spec, int n,
                                 UniformSource& rng);

// Draws n outputs and counts event membership without materializing the
// batch. Stream consumption and the count are identical to
// count_hits(sample_batch(spec, n, rng), event).
int count_hits_sampled(const MechanismSpec& spec, int n, const Event& event,
                       UniformSource& rng);

// Copy of spec with its input vector (database or queries) replaced; used to
// bind the two neighboring inputs of an audit tuple to one mechanism shape.
MechanismSpec with_input(const MechanismSpec& spec,
                         const std::vector<double>& input);

const std::vector<double>& input_of(const MechanismSpec& spec);

// ---------------------------------------------------------------------------
// Piecewise-constant evolution of the deployed mechanism: the algorithm is
// `initial` until the first change time, then each change takes effect at its
// time (inclusive). Change times must be strictly increasing.
// ---------------------------------------------------------------------------

struct MechanismTimeline {
  MechanismSpec initial;
  std::vector<std::pair<int, MechanismSpec>> changes;

  const MechanismSpec& at(int t) const;
};

}  // namespace dpmon

#endif  // DPMON_MECHANISMS_HPP_
