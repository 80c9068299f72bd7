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

#include <benchmark/benchmark.h>

#include "dpmon/detector.hpp"
#include "dpmon/estimation.hpp"
#include "dpmon/harness.hpp"
#include "dpmon/mechanisms.hpp"
#include "dpmon/threshold.hpp"

namespace {

using namespace dpmon;

void BM_LaplaceSumSample(benchmark::State& state) {
  const LaplaceSum spec{std::vector<double>(10, 0.0), LaplaceNoise{1.0}};
  RandomStream stream(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_laplace_sum(spec, stream));
  }
}
BENCHMARK(BM_LaplaceSumSample);

void BM_RnmSample(benchmark::State& state) {
  const ReportNoisyMax spec{{1, 1, 1, 1, 1}, 1.0, RnmVariant::kReturnIndex};
  RandomStream stream(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_rnm(spec, stream));
  }
}
BENCHMARK(BM_RnmSample);

void BM_SvtSample(benchmark::State& state) {
  const Svt spec{{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, SvtVariant::kV2, 1.0, 1.0, 1,
                 1.0};
  RandomStream stream(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_svt(spec, stream));
  }
}
BENCHMARK(BM_SvtSample);

void BM_CountHitsSampled(benchmark::State& state) {
  const MechanismSpec spec =
      Svt{{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, SvtVariant::kV2, 1.0, 1.0, 1, 1.0};
  const Event event = ExactBits{{0, 0, 0, 0, 0, 1}};
  const int n = static_cast<int>(state.range(0));
  RandomStream stream(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_hits_sampled(spec, n, event, stream));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CountHitsSampled)->Arg(750);

void BM_DetectorHorizon(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  RandomStream stream(5);
  std::vector<double> ratios;
  for (int t = 0; t < horizon; ++t) {
    ratios.push_back(2.0 * stream.next_uniform() - 1.0);
  }
  for (auto _ : state) {
    Detector detector(horizon, 0.25, 1e9);
    double acc = 0.0;
    for (double r : ratios) acc += detector.push(r).d_value;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_DetectorHorizon)->Arg(100)->Arg(400);

void BM_SupIncrement(benchmark::State& state) {
  const int grid = static_cast<int>(state.range(0));
  RandomStream stream(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_sup_increment(0.25, grid, stream));
  }
}
BENCHMARK(BM_SupIncrement)->Arg(500)->Arg(2000);

void BM_MonitorReplication(benchmark::State& state) {
  const ScenarioSpec scenario = build_scenario('a');
  MonitorParams params;
  params.q = 2.5;
  int replication = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_monitor(scenario, params, 42, replication++));
  }
}
BENCHMARK(BM_MonitorReplication);

}  // namespace

BENCHMARK_MAIN();
