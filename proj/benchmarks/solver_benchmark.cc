// Copyright 2026 The slowroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <string>

#include "slowroute/analysis.h"
#include "slowroute/equilibrium.h"
#include "slowroute/experiment.h"
#include "slowroute/instance_io.h"
#include "slowroute/witness_search.h"

namespace slowroute {
namespace {

// k parallel links, one class per quarter of the unit interval of beta.
Instance ParallelWithClasses(int links, int degree) {
  Instance inst = BuiltinInstance("k-link-uniform:k=" + std::to_string(links));
  for (Edge& e : inst.problem.edges) e.latency.degree = degree;
  inst.profile.classes[0] = {{0.1, 0.25}, {0.4, 0.25}, {0.7, 0.25},
                             {0.95, 0.25}};
  return inst;
}

void BM_SolveNashParallel(benchmark::State& state) {
  const Instance inst = ParallelWithClasses(static_cast<int>(state.range(0)),
                                            static_cast<int>(state.range(1)));
  const PerceivedCostContext ctx =
      PerceivedCostContext::Create(inst.problem, inst.profile, {0.8});
  for (auto _ : state) {
    EquilibriumResult r = SolveNash(ctx);
    benchmark::DoNotOptimize(r.total_latency);
  }
}
BENCHMARK(BM_SolveNashParallel)
    ->ArgsProduct({{2, 8, 32}, {1, 2}})
    ->ArgNames({"links", "d"});

void BM_SolveNashBraess(benchmark::State& state) {
  Instance inst = BuiltinInstance("braess");
  inst.profile.classes[0] = {{0.0, 0.5}, {1.0, 0.5}};
  const PerceivedCostContext ctx = PerceivedCostContext::Create(
      inst.problem, inst.profile, {static_cast<double>(state.range(0)) / 4});
  for (auto _ : state) {
    EquilibriumResult r = SolveNash(ctx);
    benchmark::DoNotOptimize(r.total_latency);
  }
}
BENCHMARK(BM_SolveNashBraess)->DenseRange(0, 4)->ArgName("gamma_x4");

void BM_SolveOptimum(benchmark::State& state) {
  const Instance inst =
      ParallelWithClasses(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    EquilibriumResult r = SolveOptimum(inst.problem);
    benchmark::DoNotOptimize(r.total_latency);
  }
}
BENCHMARK(BM_SolveOptimum)->Arg(2)->Arg(32)->ArgName("links");

void BM_PerversityRatio(benchmark::State& state) {
  const Instance inst = BuiltinInstance("two-class-two-link");
  for (auto _ : state) {
    PerversityRecord r = PerversityRatio(inst.problem, inst.profile, 0.75);
    benchmark::DoNotOptimize(r.ratio);
  }
}
BENCHMARK(BM_PerversityRatio);

void BM_WitnessSearch(benchmark::State& state) {
  WitnessFamily family = DefaultFamily(
      state.range(0) == 0 ? FamilyKind::kTwoLinkParallel : FamilyKind::kBraess);
  family.budget = 500;
  for (auto _ : state) {
    WitnessSearchResult r = SearchPerverseWitness(family, 0.5);
    benchmark::DoNotOptimize(r.evaluated);
  }
  state.SetItemsProcessed(state.iterations() * family.budget);
}
BENCHMARK(BM_WitnessSearch)->Arg(0)->Arg(1)->ArgName("braess")->Unit(
    benchmark::kMillisecond);

}  // namespace
}  // namespace slowroute

BENCHMARK_MAIN();
