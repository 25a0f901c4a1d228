// benchmarks/metrics-bench.cc


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


#include <random>

#include <benchmark/benchmark.h>

#include "zevox/metrics.h"

namespace zevox {
namespace {

ScoreSet RandomScores(int n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  ScoreSet s;
  for (int i = 0; i < n; ++i) {
    s.tar.push_back(1.0 + g(rng));
    s.non.push_back(g(rng));
  }
  return s;
}

void BM_PavLlrs(benchmark::State &state) {
  const ScoreSet s = RandomScores(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(PavLlrs(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PavLlrs)->Range(1 << 8, 1 << 16)->Complexity();

void BM_Evaluate(benchmark::State &state) {
  const ScoreSet s = RandomScores(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Evaluate(s));
}
BENCHMARK(BM_Evaluate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zevox
