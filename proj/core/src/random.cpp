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

#include "dpmon/random.hpp"

#include <vector>

namespace dpmon {

RandomStream::RandomStream(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> path) {
  // std::seed_seq is fully specified by the standard, so (seed, path) fixes
  // the stream on every platform. 64-bit words are split into 32-bit halves
  // because seed_seq folds inputs to 32 bits.
  std::vector<std::uint32_t> words;
  words.reserve(2 * (1 + path.size()));
  auto push64 = [&words](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push64(seed);
  for (std::uint64_t id : path) push64(id);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

double RandomStream::next_uniform() {
  // 53 random bits, centered in the bin: value lies strictly inside (0,1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace dpmon
