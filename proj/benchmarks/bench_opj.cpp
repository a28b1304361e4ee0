/*
* Copyright 2026 The OPJ Authors.
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     https://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* ============================================================================
*/
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "opj/jackknife.hpp"
#include "opj/regression.hpp"
#include "opj/rng.hpp"
#include "opj/simulation.hpp"
#include "opj/stratify.hpp"

namespace {

opj::ExperimentData simulated_dataset(int n0, int n1, uint64_t seed) {
  opj::ScenarioSpec spec;
  spec.outcome = opj::OutcomeForm::kLinear;
  spec.effect = opj::EffectForm::kLinear;
  spec.n0 = n0;
  spec.n1 = n1;
  opj::RngStream rng(seed, opj::stream_id("bench_data"));
  opj::ExperimentData data;
  data.x = opj::gen_covariates(n0 + n1, rng);
  data.w.assign(n0 + n1, 0);
  for (int i = n0; i < n0 + n1; ++i) data.w[i] = 1;
  rng.shuffle(data.w);
  data.y = opj::gen_outcome(spec, data.x, data.w, rng);
  return data;
}

void BM_KdeFit(benchmark::State& state) {
  opj::RngStream rng(1, opj::stream_id("bench_kde"));
  std::vector<double> values(state.range(0));
  for (auto& v : values) v = rng.next_normal();
  for (auto _ : state) {
    auto kde = opj::kde_fit(values);
    benchmark::DoNotOptimize(kde.density.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdeFit)->Arg(400)->Arg(2000);

void BM_RootCumBoundaries(benchmark::State& state) {
  opj::RngStream rng(2, opj::stream_id("bench_cuts"));
  std::vector<double> values(400);
  for (auto& v : values) v = rng.next_normal();
  const auto kde = opj::kde_fit(values);
  for (auto _ : state) {
    auto boundaries = opj::root_cum_boundaries(kde, 5);
    benchmark::DoNotOptimize(boundaries.cuts.data());
  }
}
BENCHMARK(BM_RootCumBoundaries);

void BM_FitOls(benchmark::State& state) {
  const auto data = simulated_dataset(state.range(0) / 2, state.range(0) / 2, 3);
  std::vector<int> subset(data.n());
  std::iota(subset.begin(), subset.end(), 0);
  for (auto _ : state) {
    auto model = opj::fit_ols(data, subset);
    benchmark::DoNotOptimize(model.coefficients.data());
  }
}
BENCHMARK(BM_FitOls)->Arg(1000)->Arg(2000);

void BM_OpjRun(benchmark::State& state) {
  const auto data = simulated_dataset(1000, 1000, 4);
  opj::JackknifeConfig config;
  config.seed = 5;
  for (auto _ : state) {
    auto result = opj::opj_run(data, opj::Estimand::kDifference, config);
    benchmark::DoNotOptimize(result.report.point);
  }
}
BENCHMARK(BM_OpjRun)->Unit(benchmark::kMillisecond);

void BM_ImputationReport(benchmark::State& state) {
  const auto data = simulated_dataset(1000, 1000, 6);
  opj::JackknifeConfig config;
  config.seed = 7;
  for (auto _ : state) {
    auto report =
        opj::imputation_report(data, opj::Estimand::kDifference, config);
    benchmark::DoNotOptimize(report.point);
  }
}
BENCHMARK(BM_ImputationReport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
