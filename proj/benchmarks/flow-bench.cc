// benchmarks/flow-bench.cc


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

#include "zevox/embeddings.h"
#include "zevox/flow.h"

namespace zevox {
namespace {

FlowModel MakeModel(FlowKind kind, int d) {
  if (kind == FlowKind::kLinear) return FlowModel::Linear(d, 10.0);
  FlowModel m = FlowModel::Coupling(d, 10.0, CouplingOptions{});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.1);
  Eigen::VectorXd p(m.num_parameters());
  for (auto &v : p) v = n(rng);
  m.SetParameters(p);
  return m;
}

Eigen::MatrixXd RandomBatch(int d, int n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) x(i, j) = g(rng);
  return x;
}

void BM_ForwardBatch(benchmark::State &state) {
  const auto kind = static_cast<FlowKind>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const FlowModel m = MakeModel(kind, d);
  const Eigen::MatrixXd x = RandomBatch(d, 128);
  Eigen::VectorXd logdet;
  for (auto _ : state) benchmark::DoNotOptimize(m.ForwardBatch(x, &logdet));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_ForwardBatch)
    ->Args({static_cast<int>(FlowKind::kLinear), 16})
    ->Args({static_cast<int>(FlowKind::kCoupling), 16});

void BM_NllGradient(benchmark::State &state) {
  const auto kind = static_cast<FlowKind>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const FlowModel m = MakeModel(kind, d);
  const Eigen::MatrixXd x = RandomBatch(d, 128);
  std::vector<int> cls(128);
  for (int i = 0; i < 128; ++i) cls[i] = i % 2;
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(m.Nll(x, cls, &grad));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_NllGradient)
    ->Args({static_cast<int>(FlowKind::kLinear), 16})
    ->Args({static_cast<int>(FlowKind::kCoupling), 16});

void BM_TrainLinear(benchmark::State &state) {
  SynthConfig sc;
  const Dataset ds = GenerateSynthetic(sc);
  TrainConfig tc;
  tc.epochs = 10;
  for (auto _ : state) benchmark::DoNotOptimize(TrainFlow(FlowKind::kLinear, ds, 10.0, tc));
}
BENCHMARK(BM_TrainLinear)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zevox
