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
#include <vector>

#include "doctest.h"
#include "dpmon/detector.hpp"
#include "dpmon/errors.hpp"
#include "dpmon/random.hpp"
#include "test_support.hpp"

using namespace dpmon;

namespace {

std::vector<double> random_ratios(RandomStream& stream, int length) {
  std::vector<double> ratios;
  ratios.reserve(length);
  for (int i = 0; i < length; ++i) {
    ratios.push_back(4.0 * stream.next_uniform() - 2.0);
  }
  return ratios;
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("construction contracts") {
  CHECK_NOTHROW(Detector(100, 0.25, 2.0));
  CHECK_NOTHROW(Detector(1, 0.0, 2.0));
  CHECK_THROWS_AS(Detector(100, 0.5, 2.0), ConfigError);   // open boundary
  CHECK_THROWS_AS(Detector(100, -0.1, 2.0), ConfigError);
  CHECK_THROWS_AS(Detector(0, 0.25, 2.0), ConfigError);
}

TEST_CASE("first push is the scaled single ratio") {
  Detector detector(100, 0.25, 10.0);
  const auto result = detector.push(3.16228);
  // 100^(1/2 - 1/4) = 100^(1/4) = 3.16228, so the value is ~1.
  CHECK(result.d_value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(result.d_value == doctest::Approx(3.16228 / std::pow(100.0, 0.25)));
}

TEST_CASE("unweighted prefix maxima at beta = 0") {
  Detector detector(4, 0.0, 10.0);
  detector.push(1.0);
  const auto result = detector.push(1.0);
  CHECK(result.d_value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("all-zero ratios never detect") {
  Detector detector(100, 0.25, 1e-9);
  for (int t = 0; t < 100; ++t) {
    const auto result = detector.push(0.0);
    CHECK(result.d_value == 0.0);
    CHECK_FALSE(result.detected);
  }
  CHECK_FALSE(detector.first_crossing().has_value());
  CHECK(detector.max_d_value() == 0.0);
}

TEST_CASE("matches the brute-force evaluation") {
  RandomStream stream(314);
  for (double beta : {0.0, 0.25, 0.4}) {
    for (int rep = 0; rep < 100; ++rep) {
      const int length = 1 + static_cast<int>(stream.next_uniform() * 50);
      const int horizon = length + static_cast<int>(stream.next_uniform() * 20);
      const auto ratios = random_ratios(stream, length);
      const auto expected =
          dpmon_test::brute_force_detector_values(ratios, horizon, beta);
      Detector detector(horizon, beta, 1e12);
      for (int t = 0; t < length; ++t) {
        const double d = detector.push(ratios[t]).d_value;
        REQUIRE(d == doctest::Approx(expected[t]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adding a positive shift never decreases d values") {
  RandomStream stream(99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ratios = random_ratios(stream, 40);
    const double shift = stream.next_uniform();
    Detector base(40, 0.25, 1e12);
    Detector shifted(40, 0.25, 1e12);
    for (double r : ratios) {
      const double d0 = base.push(r).d_value;
      const double d1 = shifted.push(r + shift).d_value;
      REQUIRE(d1 >= d0);
    }
  }
}

TEST_CASE("single-step lookback is a lower bound") {
  RandomStream stream(7);
  const int horizon = 60;
  const double beta = 0.25;
  const double floor_scale = std::pow(static_cast<double>(horizon), 0.5 - beta);
  Detector detector(horizon, beta, 1e12);
  for (int t = 0; t < horizon; ++t) {
    const double r = 4.0 * stream.next_uniform() - 2.0;
    const double d = detector.push(r).d_value;
    REQUIRE(d >= r / floor_scale - 1e-12);
  }
}

TEST_CASE("detection is absorbing and the running max is monotone") {
  Detector detector(50, 0.25, 0.5);
  double previous_max = -1.0;
  bool crossed = false;
  RandomStream stream(55);
  for (int t = 0; t < 50; ++t) {
    const double r = t == 10 ? 25.0 : 0.1 * stream.next_uniform();
    const auto result = detector.push(r);
    if (result.detected && !crossed) {
      crossed = true;
      CHECK(detector.first_crossing() == t + 1);
    }
    if (crossed) CHECK(result.detected);  // never un-detects
    CHECK(detector.max_d_value() >= previous_max);
    previous_max = detector.max_d_value();
  }
  CHECK(detector.first_crossing() == 11);
}

TEST_CASE("push past the horizon and early max are contract violations") {
  Detector detector(2, 0.25, 2.0);
  CHECK_THROWS_AS(detector.max_d_value(), ContractViolation);
  detector.push(0.0);
  detector.push(0.0);
  CHECK_THROWS_AS(detector.push(0.0), ContractViolation);
}

}  // TEST_SUITE
