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

#include <vector>

#include "doctest.h"
#include "dpmon/random.hpp"
#include "test_support.hpp"

using dpmon::RandomStream;

TEST_SUITE("random") {

TEST_CASE("equal seed and path reproduce the sequence") {
  RandomStream a(42, {3, 7});
  RandomStream b(42, {3, 7});
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_uniform() == b.next_uniform());
  }
}

TEST_CASE("different derivation paths give different sequences") {
  RandomStream base(42);
  RandomStream child_a(42, {0});
  RandomStream child_b(42, {1});
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    const double u = base.next_uniform();
    const double a = child_a.next_uniform();
    const double b = child_b.next_uniform();
    all_equal = all_equal && u == a && a == b;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniforms lie strictly inside (0,1) and average to 1/2") {
  RandomStream stream(7);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = stream.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is 1/sqrt(12 n) ~ 6.5e-4; 5 sigma band.
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.0066));
}

}  // TEST_SUITE
