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

#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "dpmon/errors.hpp"
#include "dpmon/panel.hpp"
#include "dpmon/threshold.hpp"
#include "test_support.hpp"

using namespace dpmon;

namespace {

AuditTuple laplace_member(double bound) {
  AuditTuple member;
  member.input_x.assign(10, 0.0);
  member.input_x_prime.assign(10, 0.0);
  member.input_x_prime[0] = 1.0;
  member.event = HalfLineLE{bound};
  member.epsilon = 1.0;
  return member;
}

MechanismTimeline scale_drop_timeline(int change_time, double post_scale) {
  return MechanismTimeline{
      LaplaceSum{std::vector<double>(10, 0.0), LaplaceNoise{1.0}},
      {{change_time, LaplaceSum{std::vector<double>(10, 0.0),
                                LaplaceNoise{post_scale}}}}};
}

PanelRunParams quick_params(double q) {
  PanelRunParams params;
  params.n = 100;
  params.horizon = 20;
  params.q_member = q;
  params.reps = 25;
  params.seed = 7;
  return params;
}

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("bonferroni split") {
  const PanelConfig config = make_panel_config(
      {laplace_member(-1), laplace_member(-0.5), laplace_member(0),
       laplace_member(0.5)},
      0.05);
  CHECK(config.per_member_alpha == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(config.per_member_alpha * 4 == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_THROWS_AS(make_panel_config({}, 0.05), ConfigError);
  CHECK_THROWS_AS(make_panel_config({laplace_member(0)}, 0.0), ConfigError);
}

TEST_CASE("single member panel equals that member") {
  const PanelConfig config = make_panel_config({laplace_member(0)}, 0.05);
  const PanelResult result =
      panel_run(config, scale_drop_timeline(10, 0.5), quick_params(1.0));
  REQUIRE(result.member_curves.size() == 1);
  CHECK(result.aggregate_curve == result.member_curves[0]);
}

TEST_CASE("aggregate dominates every member pointwise") {
  const PanelConfig config = make_panel_config(
      {laplace_member(-1), laplace_member(-0.5), laplace_member(0),
       laplace_member(0.5)},
      0.05);
  for (const bool shared : {false, true}) {
    PanelRunParams params = quick_params(1.0);
    params.shared_batches = shared;
    const PanelResult result =
        panel_run(config, scale_drop_timeline(10, 0.5), params);
    REQUIRE(result.member_curves.size() == 4);
    for (const auto& curve : result.member_curves) {
      REQUIRE(curve.size() == result.aggregate_curve.size());
      for (std::size_t tau = 0; tau < curve.size(); ++tau) {
        REQUIRE(result.aggregate_curve[tau] >= curve[tau]);
      }
    }
  }
}

TEST_CASE("deterministic given the seed, in both batch modes") {
  const PanelConfig config =
      make_panel_config({laplace_member(-0.5), laplace_member(0)}, 0.05);
  for (const bool shared : {false, true}) {
    PanelRunParams params = quick_params(1.5);
    params.shared_batches = shared;
    const PanelResult a = panel_run(config, scale_drop_timeline(10, 0.5), params);
    params.threads = 1;
    const PanelResult b = panel_run(config, scale_drop_timeline(10, 0.5), params);
    CHECK(a.member_curves == b.member_curves);
    CHECK(a.aggregate_curve == b.aggregate_curve);
  }
}

TEST_CASE("shared batches require identical member inputs") {
  AuditTuple odd = laplace_member(0);
  odd.input_x_prime[1] = 1.0;
  const PanelConfig config = make_panel_config({laplace_member(0), odd}, 0.05);
  PanelRunParams params = quick_params(1.0);
  params.shared_batches = true;
  CHECK_THROWS_AS(panel_run(config, scale_drop_timeline(10, 0.5), params),
                  ConfigError);
  params.shared_batches = false;
  CHECK_NOTHROW(panel_run(config, scale_drop_timeline(10, 0.5), params));
}

TEST_CASE("no violation keeps the aggregate false alarm rate near the level") {
  // Constant correct Laplace mechanism; members sit on or below the DP
  // boundary, so any detection is a false alarm.
  const PanelConfig config = make_panel_config(
      {laplace_member(-1), laplace_member(-0.5), laplace_member(0),
       laplace_member(0.5)},
      0.05);
  const MechanismTimeline constant{
      LaplaceSum{std::vector<double>(10, 0.0), LaplaceNoise{1.0}}, {}};

  PanelRunParams params;
  params.n = 750;
  params.horizon = 100;
  params.reps = 100;
  params.seed = 31;
  // Coarse calibration is enough for a bound with +0.05 slack.
  params.q_member = quantile(
      ThresholdRequest{config.per_member_alpha, params.beta, 500, 20000, 9});

  const PanelResult result = panel_run(config, constant, params);
  CHECK(result.aggregate_curve.back() <= 0.05 + 0.05);
}

TEST_CASE("panel csv layout") {
  const PanelConfig config =
      make_panel_config({laplace_member(-0.5), laplace_member(0)}, 0.05);
  const PanelResult result =
      panel_run(config, scale_drop_timeline(10, 0.5), quick_params(1.0));

  const std::string path = "dpmon_test_panel.csv";
  write_panel_csv(path, {"le(-0.5)", "le(0)"}, result);
  std::ifstream in(path);
  REQUIRE(in);
  std::string header;
  std::getline(in, header);
  CHECK(header == "member,tau,detect_fraction");
  int rows = 0;
  std::string line;
  bool saw_aggregate = false;
  while (std::getline(in, line)) {
    if (line.rfind("aggregate,", 0) == 0) saw_aggregate = true;
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3 * 20);
  CHECK(saw_aggregate);
  in.close();
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_panel_csv(path, {"only-one"}, result), ConfigError);
}

}  // TEST_SUITE
