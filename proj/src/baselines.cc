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

#include "hdpmf/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hdpmf/errors.h"
#include "hdpmf/random.h"

namespace hdpmf {

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kMf:
      return "mf";
    case Method::kDpmf:
      return "dpmf";
    case Method::kPdpmf:
      return "pdpmf";
    case Method::kHdpmf:
      return "hdpmf";
    case Method::kHdpmfR:
      return "hdpmf_r";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

FactorModel RunMf(const RatingDataset& train, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (train.empty()) throw UsageError("training set is empty");
  std::vector<Observation> observations;
  observations.reserve(train.size());
  for (const Rating& r : train.entries()) {
    observations.push_back({r.user, r.item, r.value});
  }
  return TrainCentralized(train.n_users(), train.n_items(), observations, {},
                          config, on_epoch);
}

double MinimumBudget(const RatingDataset& train,
                     const WeightAssignment& weights, double epsilon) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const Rating& r : train.entries()) {
    lowest = std::min(
        lowest, PersonalizedBudget(Weight(weights, r.user, r.item), epsilon));
  }
  if (!std::isfinite(lowest)) throw UsageError("training set is empty");
  return lowest;
}

ProtocolResult RunDpmf(const RatingDataset& train,
                       const WeightAssignment& weights, double epsilon,
                       const TrainConfig& config,
                       const ProtocolOptions& options) {
  return RunProtocol(train, nullptr, MinimumBudget(train, weights, epsilon),
                     config, options);
}

double SampleProbability(double budget, double threshold) {
  if (!(threshold > 0.0) || !(budget > 0.0)) {
    throw UsageError("budgets must be positive");
  }
  if (budget >= threshold) return 1.0;
  return std::expm1(budget) / std::expm1(threshold);
}

RatingDataset PdpSampleRatings(const RatingDataset& train,
                               const WeightAssignment& weights, double epsilon,
                               double threshold, std::uint64_t master_seed) {
  std::vector<Rating> kept;
  kept.reserve(train.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const Rating& r : train.entries()) {
    const double p = SampleProbability(
        PersonalizedBudget(Weight(weights, r.user, r.item), epsilon),
        threshold);
    if (p >= 1.0) {
      kept.push_back(r);
      continue;
    }
    KeyedStream stream(master_seed, StreamPurpose::kSampleMechanism,
                       static_cast<std::uint64_t>(r.user),
                       static_cast<std::uint64_t>(r.item));
    if (unit(stream) < p) kept.push_back(r);
  }
  return train.WithEntries(std::move(kept));
}

ProtocolResult RunPdpmf(const RatingDataset& train,
                        const WeightAssignment& weights, double epsilon,
                        const TrainConfig& config,
                        const ProtocolOptions& options) {
  const double threshold = epsilon;
  const RatingDataset sampled =
      PdpSampleRatings(train, weights, epsilon, threshold, config.master_seed);
  return RunProtocol(sampled, nullptr, threshold, config, options);
}

MethodRun RunMethod(Method method, const RatingDataset& train,
                    const WeightAssignment& weights, double epsilon,
                    const TrainConfig& config,
                    const ProtocolOptions& options) {
  switch (method) {
    case Method::kMf:
      return {RunMf(train, config, options.on_epoch), false};
    case Method::kDpmf:
      return {RunDpmf(train, weights, epsilon, config, options).model, false};
    case Method::kPdpmf:
      return {RunPdpmf(train, weights, epsilon, config, options).model, false};
    case Method::kHdpmf:
      return {RunHdpmf(train, weights, epsilon, config, options).model, true};
    case Method::kHdpmfR:
      return {RunHdpmf(train, weights, epsilon, config, options).model, false};
  }
  throw UsageError("unknown method");
}

}  // namespace hdpmf
