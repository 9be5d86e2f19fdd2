/* Copyright 2026 The DeltaZip Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "deltazip/compress/obs.h"
#include "deltazip/compress/quantizer.h"
#include "deltazip/inference/sbmm.h"
#include "deltazip/rng.h"
#include "deltazip/simulator/simulator.h"

namespace {

using namespace deltazip;

compress::LayerDelta make_delta(Rng& rng, std::size_t out, std::size_t in) {
  compress::CompressConfig cfg;
  cfg.group_size = 64;
  const Matrix x = gaussian_matrix(rng, in, 2 * in, 1.0);
  return compress::obs_compress_layer("l", gaussian_matrix(rng, out, in, 0.02),
                                      compress::compute_hessian(x, 0.01), cfg)
      .delta;
}

struct SbmmSetup {
  Matrix base{1, 1};
  std::map<int, compress::LayerDelta> deltas;
  inference::BatchInput batch;
};

SbmmSetup sbmm_setup(int n_deltas, std::size_t batch, std::size_t dim) {
  Rng rng(1);
  SbmmSetup s;
  s.base = gaussian_matrix(rng, dim, dim, 0.05);
  for (int d = 0; d < n_deltas; ++d) s.deltas.emplace(d, make_delta(rng, dim, dim));
  for (std::size_t i = 0; i < batch; ++i) {
    std::vector<double> v(dim);
    for (double& e : v) e = rng.normal();
    s.batch.rows.push_back({static_cast<std::int64_t>(i), static_cast<int>(i % n_deltas), v});
  }
  return s;
}

// One base matmul over the whole batch plus one packed-delta product per group.
void BM_SbmmGrouped(benchmark::State& state) {
  const auto s = sbmm_setup(static_cast<int>(state.range(0)), 32, 256);
  for (auto _ : state) benchmark::DoNotOptimize(inference::sbmm(s.base, s.deltas, s.batch));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_SbmmGrouped)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

// Per-request base + delta, no batching across requests.
void BM_PerRequestLoop(benchmark::State& state) {
  const auto s = sbmm_setup(static_cast<int>(state.range(0)), 32, 256);
  for (auto _ : state) {
    for (const auto& row : s.batch.rows) {
      const Matrix x(row.x.size(), 1, row.x);
      benchmark::DoNotOptimize(inference::decoupled_linear(s.base, s.deltas.at(row.delta_id), x));
    }
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_PerRequestLoop)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ObsCompressLayer(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Matrix delta = gaussian_matrix(rng, dim, dim, 0.02);
  const Matrix h = compress::compute_hessian(gaussian_matrix(rng, dim, 2 * dim, 1.0), 0.01);
  compress::CompressConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compress::obs_compress_layer("l", delta, h, cfg));
  state.SetItemsProcessed(state.iterations() * dim * dim);
}
BENCHMARK(BM_ObsCompressLayer)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PackCodes(benchmark::State& state) {
  const int bits = static_cast<int>(state.range(0));
  const std::int32_t qmax = compress::qmax_for_bits(bits);
  Rng rng(3);
  std::vector<std::int32_t> codes(1 << 16);
  for (auto& c : codes) c = static_cast<std::int32_t>(rng.below(2 * qmax + 1)) - qmax;
  for (auto _ : state) benchmark::DoNotOptimize(compress::pack_codes(codes, bits));
  state.SetItemsProcessed(state.iterations() * codes.size());
}
BENCHMARK(BM_PackCodes)->Arg(2)->Arg(3)->Arg(4)->Arg(8);

void BM_RunSimDefaultScenario(benchmark::State& state) {
  simulator::WorkloadSpec ws;
  ws.seed = 7;
  const auto trace = simulator::gen_trace(ws);
  simulator::SimConfig cfg;
  cfg.mode = state.range(0) == 0 ? simulator::Mode::kDeltaZip : simulator::Mode::kScbBaseline;
  for (auto _ : state) benchmark::DoNotOptimize(simulator::run_sim(trace, cfg));
}
BENCHMARK(BM_RunSimDefaultScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
