// Copyright 2026 The qrepsim Authors
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

#include <random>

#include "qrepsim/optics.h"
#include "qrepsim/repeater.h"
#include "qrepsim/source.h"
#include "qrepsim/tomography.h"

using namespace qrepsim;

static void BM_TwoPhotonBsm(benchmark::State& state) {
  const auto src = ideal_spin_photon_state();
  for (auto _ : state) benchmark::DoNotOptimize(two_photon_bsm(src, src));
}
BENCHMARK(BM_TwoPhotonBsm);

static void BM_SwapBranches(benchmark::State& state) {
  const auto a = werner_state(0.9), b = werner_state(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(swap_branches(a, b));
}
BENCHMARK(BM_SwapBranches);

static void BM_PurifyExact(benchmark::State& state) {
  const auto w = werner_state(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(purify_pair_exact(w, w));
}
BENCHMARK(BM_PurifyExact);

static void BM_Mle(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto counts = simulate_counts(ideal_spin_photon_state(), standard_settings(), state.range(0),
                                      DetectorModel{}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mle_reconstruction(counts));
}
BENCHMARK(BM_Mle)->Arg(40)->Arg(10000);

static void BM_TwoLink(benchmark::State& state) {
  LinkSpec l;
  l.source_rate_hz = 1e6;
  l.p_success_override = 0.05;
  const std::array<NodeSpec, 3> nodes{};
  TwoLinkOptions opts;
  opts.max_rounds = state.range(0);
  std::mt19937_64 rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_two_link_protocol(l, l, nodes, rng, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoLink)->Arg(100000);

static void BM_Chain(benchmark::State& state) {
  LinkSpec l;
  l.source_rate_hz = 1e6;
  l.p_success_override = 0.1;
  ChainConfig cfg;
  cfg.nodes.assign(static_cast<size_t>(state.range(0)), NodeSpec{});
  cfg.links.assign(static_cast<size_t>(state.range(0) - 1), l);
  ChainOptions opts;
  opts.max_rounds = 100000;
  std::mt19937_64 rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_chain(cfg, rng, opts));
}
BENCHMARK(BM_Chain)->Arg(3)->Arg(9);

BENCHMARK_MAIN();
