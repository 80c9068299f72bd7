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

#ifndef DPMON_RANDOM_HPP_
#define DPMON_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpmon {

// Source of i.i.d. uniforms on the open interval (0,1). Samplers draw through
// this interface so tests can substitute deterministic sources.
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double next_uniform() = 0;
};

// Seeded PRNG stream. Streams for parallel tasks are derived deterministically
// from a root seed and a path of indices, e.g. RandomStream(seed, {rep, t}).
// Equal (seed, path) always reproduces the same sequence.
class RandomStream final : public UniformSource {
 public:
  explicit RandomStream(std::uint64_t seed) : RandomStream(seed, {}) {}
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  // Uniform on (0,1); never returns 0 or 1, so inverse-CDF transforms of the
  // result are always finite.
  double next_uniform() override;

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpmon

#endif  // DPMON_RANDOM_HPP_
