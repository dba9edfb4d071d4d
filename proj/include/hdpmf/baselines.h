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

#ifndef HDPMF_BASELINES_H_
#define HDPMF_BASELINES_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hdpmf/core_model.h"
#include "hdpmf/privacy.h"
#include "hdpmf/protocol.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {

enum class Method { kMf, kDpmf, kPdpmf, kHdpmf, kHdpmfR };

inline constexpr Method kAllMethods[] = {Method::kMf, Method::kDpmf,
                                         Method::kPdpmf, Method::kHdpmf,
                                         Method::kHdpmfR};

// "mf", "dpmf", "pdpmf", "hdpmf", "hdpmf_r".
std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

// Non-private, centralized, no noise and no weights.
FactorModel RunMf(const RatingDataset& train, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// min over observed (i, j) of W_ij * eps.
double MinimumBudget(const RatingDataset& train,
                     const WeightAssignment& weights, double epsilon);

// Uniform noise at the strictest observed budget; ratings are not stretched.
ProtocolResult RunDpmf(const RatingDataset& train,
                       const WeightAssignment& weights, double epsilon,
                       const TrainConfig& config,
                       const ProtocolOptions& options = {});

// Keep probability of a rating with budget `budget` under threshold t.
double SampleProbability(double budget, double threshold);

// Each rating kept independently with SampleProbability(W_ij * eps, t).
RatingDataset PdpSampleRatings(const RatingDataset& train,
                               const WeightAssignment& weights, double epsilon,
                               double threshold, std::uint64_t master_seed);

// Sample with t = eps, then train with uniform noise at budget t.
ProtocolResult RunPdpmf(const RatingDataset& train,
                        const WeightAssignment& weights, double epsilon,
                        const TrainConfig& config,
                        const ProtocolOptions& options = {});

struct MethodRun {
  FactorModel model;
  bool rescale = false;  // predictions divide by W_ij
};

// Dispatches to the runner for `method`. HDPMF and HDPMF-R train
// identically and differ only in `rescale`.
MethodRun RunMethod(Method method, const RatingDataset& train,
                    const WeightAssignment& weights, double epsilon,
                    const TrainConfig& config,
                    const ProtocolOptions& options = {});

}  // namespace hdpmf

#endif  // HDPMF_BASELINES_H_
