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

#include "hdpmf/rating_dataset.h"

#include <gtest/gtest.h>

#include <set>

#include "hdpmf/errors.h"
#include "test_util.h"

namespace hdpmf {
namespace {

TEST(RatingDatasetTest, RejectsInvalidEntries) {
  EXPECT_THROW(RatingDataset(2, 2, {}, {{2, 0, 3.0}}), UsageError);
  EXPECT_THROW(RatingDataset(2, 2, {}, {{0, 0, 6.0}}), UsageError);
  EXPECT_THROW(RatingDataset(2, 2, {}, {{0, 0, 3.0}, {0, 0, 4.0}}),
               UsageError);
  EXPECT_THROW(RatingDataset(2, 2, {3.0, 3.0}, {}), UsageError);
}

TEST(RatingDatasetTest, CountsAndWithEntries) {
  const RatingDataset d(3, 2, {}, {{0, 0, 1}, {0, 1, 2}, {2, 1, 5}});
  EXPECT_EQ(d.UserCounts(), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(d.ItemCounts(), (std::vector<std::size_t>{1, 2}));
  const auto sub = d.WithEntries({{1, 1, 4}});
  EXPECT_EQ(sub.n_users(), 3);
  EXPECT_EQ(sub.size(), 1u);
}

TEST(RatingIndexTest, AdjacencyIsSortedAndComplete) {
  const auto d = testing::SyntheticDataset(30, 25, 0.3, 4);
  const RatingIndex index(d.n_users(), d.n_items(), d.entries());
  std::set<std::size_t> seen;
  for (Index j = 0; j < d.n_items(); ++j) {
    Index last = -1;
    for (std::size_t p : index.ItemObservations(j)) {
      EXPECT_EQ(d.entries()[p].item, j);
      EXPECT_GT(d.entries()[p].user, last);
      last = d.entries()[p].user;
      seen.insert(p);
    }
  }
  EXPECT_EQ(seen.size(), d.size());
  std::size_t total = 0;
  for (Index i = 0; i < d.n_users(); ++i) {
    Index last = -1;
    for (std::size_t p : index.UserObservations(i)) {
      EXPECT_EQ(d.entries()[p].user, i);
      EXPECT_GT(d.entries()[p].item, last);
      last = d.entries()[p].item;
    }
    total += index.UserDegree(i);
  }
  EXPECT_EQ(total, d.size());
}

}  // namespace
}  // namespace hdpmf
