// benchmarks/audio-bench.cc


// Copyright 2026  The zevox Authors

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


#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "zevox/pitch.h"
#include "zevox/psola.h"

namespace zevox {
namespace {

Waveform Tone(double f0, double seconds) {
  Waveform w;
  w.rate = 16000;
  w.samples.resize(static_cast<std::size_t>(seconds * w.rate));
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * f0 * i / w.rate);
  return w;
}

void BM_ExtractF0(benchmark::State &state) {
  const Waveform w = Tone(150.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ExtractF0(w));
  state.SetItemsProcessed(state.iterations() * w.samples.size());
}
BENCHMARK(BM_ExtractF0)->Unit(benchmark::kMillisecond);

void BM_PsolaResynth(benchmark::State &state) {
  const Waveform w = Tone(150.0, 1.0);
  const F0Track src = ExtractF0(w);
  F0Track target = src;
  for (auto &f : target.frames)
    if (f.voiced) f.f0 *= 1.3;
  const PitchMarks marks = PlaceMarks(w, src);
  for (auto _ : state) benchmark::DoNotOptimize(PsolaResynth(w, marks, src, target));
  state.SetItemsProcessed(state.iterations() * w.samples.size());
}
BENCHMARK(BM_PsolaResynth)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zevox
