/*
 * Copyright 2026 The UTDE Authors.
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
 */

// Serial reference vs OpenMP batch gradients and batch prediction on one
// desk-scale batch of fused xor episodes.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "utde/data/synthetic.hpp"
#include "utde/harness/pipeline.hpp"
#include "utde/harness/trainer.hpp"

namespace utde::harness {
namespace {

struct Fixture {
  RunConfig config;
  PreparedSplits data;
  std::vector<const EncodedEpisode*> batch;

  Fixture() {
    config.model.grid_size = 24;
    config.model.d_m = 4;
    config.model.d_t = 16;
    config.model.d_hidden = 16;
    config.model.d_timeembed = 16;
    config.model.time_embeddings = 8;
    config.model.fusion_layers = 3;
    config.model.heads = 4;
    config.alpha_hours = 24.0;
    data::SyntheticConfig g;
    g.n_episodes = 32;
    g.task = data::SyntheticTask::kXorFusion;
    g.seed = 1;
    std::vector<data::Episode> train = data::GenerateSynthetic(g);
    data = Prepare(config, Splits{train, train, {}});
    for (const EncodedEpisode& e : data.train) batch.push_back(&e);
  }
};

const Fixture& Shared() {
  static const Fixture f;
  return f;
}

void BM_BatchGradientsSerial(benchmark::State& state) {
  const Fixture& f = Shared();
  const Model model(f.config.model, 3);
  for (auto _ : state) benchmark::DoNotOptimize(BatchGradientsSerial(model, f.batch).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.batch.size()));
}

void BM_BatchGradientsParallel(benchmark::State& state) {
  const Fixture& f = Shared();
  const Model model(f.config.model, 3);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(BatchGradientsParallel(model, f.batch).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.batch.size()));
}

void BM_PredictScores(benchmark::State& state) {
  const Fixture& f = Shared();
  const Model model(f.config.model, 3);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(PredictScores(model, f.data.val, {}, parallel).data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.val.size()));
}

BENCHMARK(BM_BatchGradientsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradientsParallel)
    ->RangeMultiplier(2)
    ->Range(1, 8)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_PredictScores)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace utde::harness

BENCHMARK_MAIN();
