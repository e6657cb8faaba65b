// benchmarks/bench.cpp

// Copyright 2026  The magdiar Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "magdiar/cluster.hpp"
#include "magdiar/diarmetrics.hpp"
#include "magdiar/magface.hpp"
#include "magdiar/pipeline.hpp"
#include "magdiar/random.hpp"
#include "magdiar/synth.hpp"
#include "magdiar/vbx.hpp"
#include "magdiar/verify.hpp"

using namespace magdiar;

namespace {

SynthMeeting bench_meeting(int segments) {
  SynthSpec setup;
  setup.seed = 1;
  setup.n_speakers = 4;
  setup.n_segments = segments;
  return generate_meeting(setup);
}

void BM_AhcThreshold(benchmark::State& state) {
  const SynthMeeting m = bench_meeting(static_cast<int>(state.range(0)));
  const Matrix sim = similarity_matrix(m.embeddings, CosineMetric{});
  for (auto _ : state) benchmark::DoNotOptimize(ahc_threshold(sim, 0.5));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m.embeddings.size()));
}
BENCHMARK(BM_AhcThreshold)->Arg(100)->Arg(200)->Arg(400)->Arg(800)->Complexity();

void BM_Vbx(benchmark::State& state) {
  const SynthMeeting m = bench_meeting(static_cast<int>(state.range(0)));
  VbxClustering base;
  base.init = AhcClustering{0.5, CosineMetric{}};
  base.uncertainty = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(cluster_unknown_k(m.embeddings, base));
}
BENCHMARK(BM_Vbx)->Args({200, 0})->Args({200, 1})->Args({800, 0})->Args({800, 1});

void BM_TwoStep(benchmark::State& state) {
  const SynthMeeting m = bench_meeting(200);
  const TwoStepConfig cfg{50.0, static_cast<TwoStepVariant>(state.range(0)),
                          AhcClustering{0.5, CosineMetric{}}};
  for (auto _ : state) benchmark::DoNotOptimize(two_step_cluster(m.embeddings, cfg));
}
BENCHMARK(BM_TwoStep)->DenseRange(0, 2);

void BM_Der(benchmark::State& state) {
  const SynthMeeting m = bench_meeting(static_cast<int>(state.range(0)));
  const Annotation hyp = diarize(m.embeddings, {50.0, TwoStepVariant::kCentroidAssign,
                                                AhcClustering{0.5, CosineMetric{}}});
  for (auto _ : state) benchmark::DoNotOptimize(score_diarization(m.reference, hyp));
}
BENCHMARK(BM_Der)->Arg(200)->Arg(2000);

void BM_MagfaceGrad(benchmark::State& state) {
  Rng rng(3);
  const MagfaceParams p;
  const MagfaceBatch b = random_magface_batch(rng, static_cast<int>(state.range(0)), 100, 128, p);
  for (auto _ : state) benchmark::DoNotOptimize(magface_grad(b, p));
}
BENCHMARK(BM_MagfaceGrad)->Arg(8)->Arg(64)->Arg(256);

void BM_ScoreTrials(benchmark::State& state) {
  TrialSynthSpec setup;
  setup.seed = 4;
  const SynthTrials t = generate_trials(setup);
  const ScoringBackend backend =
      state.range(0) == 0 ? ScoringBackend{CosineBackend{}} : ScoringBackend{GmeBackend{}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_scores(score_trials(t.embeddings, t.trials, backend)));
  }
}
BENCHMARK(BM_ScoreTrials)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
