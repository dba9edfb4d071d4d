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

#include "hdpmf/data_io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hdpmf/errors.h"
#include "test_util.h"

namespace hdpmf {
namespace {

TEST(LoadTest, MovieLens100kLineAndRemap) {
  std::istringstream in("1\t3\t4\t881250949\n7\t3\t2\t1\n1\t9\t5\t2\n");
  const auto d = ParseMovieLens100k(in);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.entries()[0], (Rating{0, 0, 4.0}));
  EXPECT_EQ(d.entries()[1], (Rating{1, 0, 2.0}));
  EXPECT_EQ(d.entries()[2], (Rating{0, 1, 5.0}));
  EXPECT_EQ(d.user_ids(), (std::vector<std::string>{"1", "7"}));
  EXPECT_EQ(d.item_ids(), (std::vector<std::string>{"3", "9"}));
}

TEST(LoadTest, ParseErrorsCarryLineNumbers) {
  std::istringstream bad_rating("1\t3\t4\t1\n2\t3\t6\t1\n");
  try {
    ParseMovieLens100k(bad_rating);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream missing("1::1193::5::978300760\n1::1194::5\n");
  try {
    ParseMovieLens1m(missing);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream junk("1\t2\tx\t1\n");
  EXPECT_THROW(ParseMovieLens100k(junk), ParseError);
  EXPECT_THROW(LoadMovieLens100k("/nonexistent/u.data"), IoError);
}

TEST(LoadTest, MovieLens1m) {
  std::istringstream in("1::1193::5::978300760\n");
  const auto d = ParseMovieLens1m(in);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.entries()[0].value, 5.0);
}

TEST(LoadTest, Csv) {
  std::istringstream three("user,item,rating\na,x,1\nb,x,2.5\na,y,3\n");
  EXPECT_EQ(ParseCsv(three, {1, 5}).size(), 3u);
  std::istringstream dup("user,item,rating\na,x,1\na,x,2\n");
  EXPECT_THROW(ParseCsv(dup, {1, 5}), ParseError);
  std::istringstream off("user,item,rating\na,x,11\n");
  EXPECT_THROW(ParseCsv(off, {1, 10}), ParseError);
  std::istringstream empty("");
  EXPECT_TRUE(ParseCsv(empty, {1, 5}).empty());
  std::istringstream no_header("a,x,1\n");
  EXPECT_THROW(ParseCsv(no_header, {1, 5}), ParseError);
}

std::multiset<std::tuple<Index, Index, double>> AsSet(const RatingDataset& d) {
  std::multiset<std::tuple<Index, Index, double>> s;
  for (const auto& r : d.entries()) s.insert({r.user, r.item, r.value});
  return s;
}

TEST(SplitTest, LeaveNOutCounts) {
  std::vector<Rating> entries;
  for (Index j = 0; j < 30; ++j) entries.push_back({0, j, 3});
  for (Index j = 0; j < 8; ++j) entries.push_back({1, j, 4});
  const RatingDataset d(2, 30, {}, entries);
  const auto plan = SplitLeaveNOut(d, 10, 1);
  EXPECT_EQ(plan.train.UserCounts(), (std::vector<std::size_t>{20, 8}));
  EXPECT_EQ(plan.test.UserCounts(), (std::vector<std::size_t>{10, 0}));
}

TEST(SplitTest, PartitionPropertiesAndDeterminism) {
  const auto d = testing::SyntheticDataset(50, 40, 0.3, 2);
  const auto plan = SplitLeaveNOut(d, 5, 3);
  auto both = AsSet(plan.train);
  for (const auto& t : AsSet(plan.test)) both.insert(t);
  EXPECT_EQ(both, AsSet(d));
  std::size_t expected = 0;
  for (auto c : d.UserCounts()) expected += c > 5 ? 5 : 0;
  EXPECT_EQ(plan.test.size(), expected);
  const auto again = SplitLeaveNOut(d, 5, 3);
  EXPECT_EQ(AsSet(again.test), AsSet(plan.test));
  const auto other = SplitLeaveNOut(d, 5, 4);
  EXPECT_NE(AsSet(other.test), AsSet(plan.test));
  const auto train_counts = plan.train.UserCounts();
  for (const auto& r : plan.test.entries()) {
    EXPECT_GT(train_counts[r.user], 0u);
  }
}

TEST(SplitTest, LeaveOneOut) {
  const RatingDataset d(3, 3, {},
                        {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {2, 0, 4}, {2, 2, 5}});
  const auto plan = SplitLeaveOneOut(d, 1);
  EXPECT_EQ(plan.test.UserCounts(), (std::vector<std::size_t>{1, 0, 1}));
  EXPECT_EQ(plan.train.UserCounts(), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(SplitTest, KFold) {
  std::vector<Rating> entries;
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) entries.push_back({i, j, 3});
  }
  const RatingDataset d(10, 10, {}, entries);
  const auto folds = KFoldSplits(d, 5, 1);
  ASSERT_EQ(folds.size(), 5u);
  std::multiset<std::tuple<Index, Index, double>> uni;
  for (const auto& f : folds) {
    EXPECT_EQ(f.test.size(), 20u);
    EXPECT_EQ(f.train.size(), 80u);
    for (const auto& t : AsSet(f.test)) uni.insert(t);
  }
  EXPECT_EQ(uni, AsSet(d));
  const auto d7 = testing::SyntheticDataset(13, 11, 0.3, 1);
  const auto f7 = KFoldSplits(d7, 7, 2);
  std::size_t lo = d7.size(), hi = 0;
  for (const auto& f : f7) {
    lo = std::min(lo, f.test.size());
    hi = std::max(hi, f.test.size());
  }
  EXPECT_LE(hi - lo, 1u);
  EXPECT_THROW(KFoldSplits(d, 1, 1), UsageError);
}

TEST(SubsampleTest, CeilingPerUser) {
  std::vector<Rating> entries;
  for (Index j = 0; j < 10; ++j) entries.push_back({0, j, 3});
  for (Index j = 0; j < 3; ++j) entries.push_back({1, j, 3});
  const RatingDataset d(2, 10, {}, entries);
  EXPECT_EQ(SubsamplePerUser(d, 0.2, 1).UserCounts(),
            (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(AsSet(SubsamplePerUser(d, 1.0, 1)), AsSet(d));
  EXPECT_THROW(SubsamplePerUser(d, 0.0, 1), UsageError);
  const auto big = testing::SyntheticDataset(80, 60, 0.3, 5);
  const auto sub = SubsamplePerUser(big, 0.4, 9);
  std::size_t expect = 0;
  for (auto c : big.UserCounts()) expect += std::ceil(0.4 * c - 1e-9);
  EXPECT_EQ(sub.size(), expect);
  EXPECT_NEAR(sub.size(), 0.4 * big.size(), big.n_users());
}

}  // namespace
}  // namespace hdpmf
