// Copyright 2026 The HDPMF Authors
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

// Reference (serial) against OpenMP-parallel kernels on a synthetic dataset
// the size of ML-100K (943 x 1682, ~6.3% dense).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hdpmf/core_model.h"
#include "hdpmf/privacy.h"
#include "hdpmf/random.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {
namespace {

const RatingDataset& Data() {
  static const RatingDataset data = [] {
    KeyedStream s(1, StreamPurpose::kSynthetic);
    std::bernoulli_distribution observed(0.063);
    std::uniform_int_distribution<int> value(1, 5);
    std::vector<Rating> entries;
    for (Index i = 0; i < 943; ++i) {
      for (Index j = 0; j < 1682; ++j) {
        if (observed(s)) entries.push_back({i, j, double(value(s))});
      }
    }
    return RatingDataset(943, 1682, {}, std::move(entries));
  }();
  return data;
}

void BM_TrainEpoch(benchmark::State& state) {
  const auto mode = static_cast<ExecutionMode>(state.range(0));
  const auto update = static_cast<UpdateScheme>(state.range(1));
  const auto& data = Data();
  std::vector<Observation> obs;
  for (const auto& r : data.entries()) obs.push_back({r.user, r.item, r.value});
  const RatingIndex index(data.n_users(), data.n_items(), data.entries());
  const auto plan = BuildNoisePlan(data, 10, 4.0, 1.0, 1);
  FactorModel model = InitModel(data.n_users(), data.n_items(), 10, 1, 0.02,
                                RegularizationScheme::kPerRating);
  for (auto _ : state) {
    TrainEpochCentralized(model, obs, index, plan.shares(), 1e-3, update, mode);
    benchmark::DoNotOptimize(model.items.data().data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(obs.size()));
}
BENCHMARK(BM_TrainEpoch)
    ->ArgNames({"parallel", "batch"})
    ->ArgsProduct({{0, 1}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_BuildNoisePlan(benchmark::State& state) {
  const auto mode = static_cast<ExecutionMode>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildNoisePlan(Data(), 10, 4.0, 1.0, 1, mode));
  }
}
BENCHMARK(BM_BuildNoisePlan)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hdpmf

BENCHMARK_MAIN();
