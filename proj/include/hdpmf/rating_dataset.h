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

#ifndef HDPMF_RATING_DATASET_H_
#define HDPMF_RATING_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hdpmf {

using Index = std::int32_t;

struct Rating {
  Index user = 0;
  Index item = 0;
  double value = 0.0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct RatingScale {
  double min = 1.0;
  double max = 5.0;

  // The sensitivity driver: max - min of the declared scale.
  double range() const { return max - min; }
  bool Contains(double r) const { return r >= min && r <= max; }
};

// Sparse user-item ratings over a fixed index space. Train/test splits share
// the index space of their source so model indices stay aligned.
class RatingDataset {
 public:
  RatingDataset() = default;

  // Throws UsageError if an entry is out of range, off-scale, or duplicated,
  // or if the scale is empty.
  RatingDataset(Index n_users, Index n_items, RatingScale scale,
                std::vector<Rating> entries);

  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  const RatingScale& scale() const { return scale_; }
  std::span<const Rating> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Raw identifiers from the source file, indexed by dense id. Empty for
  // synthetic datasets.
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  void set_ids(std::vector<std::string> user_ids,
               std::vector<std::string> item_ids);

  // Same index space, scale and ids; different entries.
  RatingDataset WithEntries(std::vector<Rating> entries) const;

  std::vector<std::size_t> UserCounts() const;
  std::vector<std::size_t> ItemCounts() const;

 private:
  Index n_users_ = 0;
  Index n_items_ = 0;
  RatingScale scale_;
  std::vector<Rating> entries_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
};

// Compressed adjacency over a list of observations, both item-major and
// user-major. Positions refer to the original observation order. Within an
// item the raters are ascending by user; within a user the items ascend.
class RatingIndex {
 public:
  RatingIndex(Index n_users, Index n_items, std::span<const Rating> entries);

  Index n_users() const { return static_cast<Index>(user_offsets_.size()) - 1; }
  Index n_items() const { return static_cast<Index>(item_offsets_.size()) - 1; }

  // Observation positions for the raters of item j.
  std::span<const std::size_t> ItemObservations(Index j) const {
    return {item_obs_.data() + item_offsets_[j],
            item_obs_.data() + item_offsets_[j + 1]};
  }
  std::span<const std::size_t> UserObservations(Index i) const {
    return {user_obs_.data() + user_offsets_[i],
            user_obs_.data() + user_offsets_[i + 1]};
  }
  std::size_t ItemDegree(Index j) const {
    return item_offsets_[j + 1] - item_offsets_[j];
  }
  std::size_t UserDegree(Index i) const {
    return user_offsets_[i + 1] - user_offsets_[i];
  }

 private:
  std::vector<std::size_t> item_offsets_;
  std::vector<std::size_t> item_obs_;
  std::vector<std::size_t> user_offsets_;
  std::vector<std::size_t> user_obs_;
};

}  // namespace hdpmf

#endif  // HDPMF_RATING_DATASET_H_
