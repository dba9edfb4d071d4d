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

#ifndef HDPMF_DATA_IO_H_
#define HDPMF_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "hdpmf/rating_dataset.h"

namespace hdpmf {

// Raw ids are remapped to dense indices in order of first appearance. All
// loaders throw ParseError (with the 1-based line) on malformed or
// off-scale lines, and IoError if the file cannot be opened.

// `user \t item \t rating \t timestamp`, scale [1, 5].
RatingDataset LoadMovieLens100k(const std::filesystem::path& path);
RatingDataset ParseMovieLens100k(std::istream& in);

// `user::item::rating::timestamp`, scale [1, 5].
RatingDataset LoadMovieLens1m(const std::filesystem::path& path);
RatingDataset ParseMovieLens1m(std::istream& in);

// Header `user,item,rating`; further columns are ignored. An empty file is
// an empty dataset.
RatingDataset LoadCsv(const std::filesystem::path& path, RatingScale scale);
RatingDataset ParseCsv(std::istream& in, RatingScale scale);

struct SplitPlan {
  RatingDataset train;
  RatingDataset test;
  std::string description;
};

// Per user, a seeded uniform choice of `n_test` ratings goes to test. Users
// with n_test or fewer ratings stay entirely in train.
SplitPlan SplitLeaveNOut(const RatingDataset& dataset, std::size_t n_test,
                         std::uint64_t master_seed);

// One test rating per user with at least two ratings.
SplitPlan SplitLeaveOneOut(const RatingDataset& dataset,
                           std::uint64_t master_seed);

// Seeded partition into k folds whose sizes differ by at most one; plan f
// validates on fold f and trains on the rest.
std::vector<SplitPlan> KFoldSplits(const RatingDataset& dataset, int k,
                                   std::uint64_t master_seed);

// Per user, keep ceil(fraction * count) seeded-random ratings.
RatingDataset SubsamplePerUser(const RatingDataset& dataset, double fraction,
                               std::uint64_t master_seed);

}  // namespace hdpmf

#endif  // HDPMF_DATA_IO_H_
