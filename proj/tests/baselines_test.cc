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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hdpmf/errors.h"
#include "test_util.h"

namespace hdpmf {
namespace {

TEST(MethodTest, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(ParseMethod(MethodName(m)), m);
  EXPECT_FALSE(ParseMethod("svd").has_value());
}

TEST(SampleProbabilityTest, ThresholdAndArithmetic) {
  EXPECT_DOUBLE_EQ(SampleProbability(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(SampleProbability(2.0, 1.0), 1.0);
  EXPECT_NEAR(SampleProbability(0.5, 1.0), 0.3775406687981454, 1e-12);
  EXPECT_THROW(SampleProbability(0.5, 0.0), UsageError);
}

TEST(PdpSampleTest, KeepRateMatchesProbability) {
  // 400 x 250 ratings, all with budget 0.5.
  std::vector<Rating> entries;
  for (Index i = 0; i < 400; ++i) {
    for (Index j = 0; j < 250; ++j) entries.push_back({i, j, 3.0});
  }
  const RatingDataset data(400, 250, {}, entries);
  WeightAssignment w{std::vector<double>(400, 0.5),
                     std::vector<double>(250, 1.0)};
  const auto kept = PdpSampleRatings(data, w, 1.0, 1.0, 42);
  const double rate = static_cast<double>(kept.size()) / data.size();
  EXPECT_NEAR(rate / SampleProbability(0.5, 1.0), 1.0, 0.01);
}

TEST(PdpSampleTest, SubsetNoDuplicatesAndMonotone) {
  const auto data = testing::SyntheticDataset(60, 50, 0.3, 3);
  const auto w = AllocateWeights(PrivacySpec{}, 60, 50, 3);
  const auto kept = PdpSampleRatings(data, w, 1.0, 1.0, 7);
  std::set<std::pair<Index, Index>> source;
  for (const auto& r : data.entries()) source.insert({r.user, r.item});
  std::set<std::pair<Index, Index>> seen;
  for (const auto& r : kept.entries()) {
    EXPECT_TRUE(source.count({r.user, r.item}));
    EXPECT_TRUE(seen.insert({r.user, r.item}).second);
  }
  // Same per-rating uniforms: higher budgets keep a superset.
  const auto more = PdpSampleRatings(data, w, 2.0, 1.0, 7);
  std::set<std::pair<Index, Index>> superset;
  for (const auto& r : more.entries()) superset.insert({r.user, r.item});
  for (const auto& key : seen) EXPECT_TRUE(superset.count(key));
  const auto all = PdpSampleRatings(data, w, 1.0, 1e-3, 7);
  EXPECT_EQ(all.size(), data.size());
}

TEST(BaselinesTest, MinimumBudget) {
  const RatingDataset data(2, 2, {}, {{0, 0, 1}, {1, 1, 2}});
  WeightAssignment w{{0.5, 1.0}, {1.0, 0.4}};
  EXPECT_DOUBLE_EQ(MinimumBudget(data, w, 2.0), 0.8);
}

TEST(BaselinesTest, PdpmfWithoutSamplingEqualsDpmf) {
  const auto data = testing::SyntheticDataset(30, 25, 0.3, 4);
  const auto ones = UniformWeights(30, 25);
  TrainConfig config;
  config.dim = 3;
  config.epochs = 5;
  const auto p = RunPdpmf(data, ones, 1.0, config);
  const auto d = RunDpmf(data, ones, 1.0, config);
  EXPECT_EQ(p.model.items, d.model.items);
  EXPECT_EQ(p.noise, d.noise);
}

TEST(BaselinesTest, DpmfWithUniformWeightsEqualsHdpmf) {
  const auto data = testing::SyntheticDataset(30, 25, 0.3, 4);
  const auto ones = UniformWeights(30, 25);
  TrainConfig config;
  config.dim = 3;
  config.epochs = 5;
  const auto d = RunDpmf(data, ones, 1.0, config);
  const auto h = RunHdpmf(data, ones, 1.0, config);
  EXPECT_EQ(d.model.items, h.model.items);
  EXPECT_EQ(d.noise.epsilon(), h.noise.epsilon());
}

TEST(BaselinesTest, DispatchAndRescaleFlag) {
  const auto data = testing::SyntheticDataset(10, 8, 0.4, 1);
  const auto w = AllocateWeights(PrivacySpec{}, 10, 8, 1);
  TrainConfig config;
  config.dim = 2;
  config.epochs = 2;
  const auto h = RunMethod(Method::kHdpmf, data, w, 1.0, config);
  const auto r = RunMethod(Method::kHdpmfR, data, w, 1.0, config);
  EXPECT_TRUE(h.rescale);
  EXPECT_FALSE(r.rescale);
  EXPECT_EQ(h.model.items, r.model.items);
  EXPECT_FALSE(RunMethod(Method::kMf, data, w, 1.0, config).rescale);
}

}  // namespace
}  // namespace hdpmf
