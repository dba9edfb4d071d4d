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

#include <algorithm>
#include <string>
#include <utility>

#include "hdpmf/errors.h"

namespace hdpmf {

RatingDataset::RatingDataset(Index n_users, Index n_items, RatingScale scale,
                             std::vector<Rating> entries)
    : n_users_(n_users),
      n_items_(n_items),
      scale_(scale),
      entries_(std::move(entries)) {
  if (n_users < 0 || n_items < 0) {
    throw UsageError("negative dataset dimensions");
  }
  if (!(scale.range() > 0.0)) {
    throw UsageError("rating scale must satisfy max > min");
  }
  std::vector<std::pair<Index, Index>> keys;
  keys.reserve(entries_.size());
  for (const Rating& r : entries_) {
    if (r.user < 0 || r.user >= n_users || r.item < 0 || r.item >= n_items) {
      throw UsageError("rating (" + std::to_string(r.user) + ", " +
                       std::to_string(r.item) + ") outside the index space");
    }
    if (!scale.Contains(r.value)) {
      throw UsageError("rating " + std::to_string(r.value) +
                       " outside the declared scale");
    }
    keys.emplace_back(r.user, r.item);
  }
  std::sort(keys.begin(), keys.end());
  const auto dup = std::adjacent_find(keys.begin(), keys.end());
  if (dup != keys.end()) {
    throw UsageError("duplicate rating for (" + std::to_string(dup->first) +
                     ", " + std::to_string(dup->second) + ")");
  }
}

void RatingDataset::set_ids(std::vector<std::string> user_ids,
                            std::vector<std::string> item_ids) {
  if (user_ids.size() != static_cast<std::size_t>(n_users_) ||
      item_ids.size() != static_cast<std::size_t>(n_items_)) {
    throw UsageError("id tables do not match the dataset dimensions");
  }
  user_ids_ = std::move(user_ids);
  item_ids_ = std::move(item_ids);
}

RatingDataset RatingDataset::WithEntries(std::vector<Rating> entries) const {
  RatingDataset out(n_users_, n_items_, scale_, std::move(entries));
  out.user_ids_ = user_ids_;
  out.item_ids_ = item_ids_;
  return out;
}

std::vector<std::size_t> RatingDataset::UserCounts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_users_), 0);
  for (const Rating& r : entries_) ++counts[r.user];
  return counts;
}

std::vector<std::size_t> RatingDataset::ItemCounts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_items_), 0);
  for (const Rating& r : entries_) ++counts[r.item];
  return counts;
}

namespace {

// Counting sort of positions by `key`, ties broken by `tiebreak`.
template <typename Key, typename Tie>
void BuildCsr(std::size_t n_keys, std::span<const Rating> entries, Key key,
              Tie tiebreak, std::vector<std::size_t>& offsets,
              std::vector<std::size_t>& positions) {
  offsets.assign(n_keys + 1, 0);
  for (const Rating& r : entries) ++offsets[key(r) + 1];
  for (std::size_t k = 0; k < n_keys; ++k) offsets[k + 1] += offsets[k];
  positions.resize(entries.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t p = 0; p < entries.size(); ++p) {
    positions[cursor[key(entries[p])]++] = p;
  }
  for (std::size_t k = 0; k < n_keys; ++k) {
    std::sort(positions.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
              positions.begin() + static_cast<std::ptrdiff_t>(offsets[k + 1]),
              [&](std::size_t a, std::size_t b) {
                return tiebreak(entries[a]) < tiebreak(entries[b]);
              });
  }
}

}  // namespace

RatingIndex::RatingIndex(Index n_users, Index n_items,
                         std::span<const Rating> entries) {
  BuildCsr(
      static_cast<std::size_t>(n_items), entries,
      [](const Rating& r) { return static_cast<std::size_t>(r.item); },
      [](const Rating& r) { return r.user; }, item_offsets_, item_obs_);
  BuildCsr(
      static_cast<std::size_t>(n_users), entries,
      [](const Rating& r) { return static_cast<std::size_t>(r.user); },
      [](const Rating& r) { return r.item; }, user_offsets_, user_obs_);
}

}  // namespace hdpmf
