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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "hdpmf/errors.h"
#include "hdpmf/random.h"

namespace hdpmf {

namespace {

class IdMap {
 public:
  Index Lookup(std::string_view raw) {
    const auto [it, inserted] =
        ids_.try_emplace(std::string(raw), static_cast<Index>(raw_.size()));
    if (inserted) raw_.emplace_back(raw);
    return it->second;
  }
  Index size() const { return static_cast<Index>(raw_.size()); }
  std::vector<std::string> Release() { return std::move(raw_); }

 private:
  std::unordered_map<std::string, Index> ids_;
  std::vector<std::string> raw_;
};

std::vector<std::string_view> SplitFields(std::string_view line,
                                          std::string_view sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    if (at == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, at - start));
    start = at + sep.size();
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double ParseValue(std::string_view field, std::size_t line) {
  field = Trim(field);
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw ParseError("bad rating '" + std::string(field) + "'", line);
  }
  return value;
}

class Builder {
 public:
  explicit Builder(RatingScale scale) : scale_(scale) {}

  void Add(std::string_view user, std::string_view item,
           std::string_view rating, std::size_t line) {
    user = Trim(user);
    item = Trim(item);
    if (user.empty() || item.empty()) {
      throw ParseError("empty user or item id", line);
    }
    const double value = ParseValue(rating, line);
    if (!scale_.Contains(value)) {
      throw ParseError("rating " + std::string(Trim(rating)) +
                           " outside the declared scale",
                       line);
    }
    const Index u = users_.Lookup(user);
    const Index i = items_.Lookup(item);
    const auto key = (static_cast<std::uint64_t>(u) << 32) |
                     static_cast<std::uint32_t>(i);
    if (!seen_.try_emplace(key, line).second) {
      throw ParseError("duplicate rating for user " + std::string(user) +
                           " item " + std::string(item),
                       line);
    }
    entries_.push_back({u, i, value});
  }

  RatingDataset Finish() {
    RatingDataset out(users_.size(), items_.size(), scale_,
                      std::move(entries_));
    out.set_ids(users_.Release(), items_.Release());
    return out;
  }

 private:
  RatingScale scale_;
  IdMap users_;
  IdMap items_;
  std::unordered_map<std::uint64_t, std::size_t> seen_;
  std::vector<Rating> entries_;
};

RatingDataset ParseSeparated(std::istream& in, std::string_view sep) {
  Builder builder(RatingScale{1.0, 5.0});
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(Trim(line), sep);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " +
                           std::to_string(fields.size()),
                       number);
    }
    builder.Add(fields[0], fields[1], fields[2], number);
  }
  return builder.Finish();
}

std::ifstream Open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  return in;
}

}  // namespace

RatingDataset ParseMovieLens100k(std::istream& in) {
  return ParseSeparated(in, "\t");
}

RatingDataset LoadMovieLens100k(const std::filesystem::path& path) {
  auto in = Open(path);
  return ParseMovieLens100k(in);
}

RatingDataset ParseMovieLens1m(std::istream& in) {
  return ParseSeparated(in, "::");
}

RatingDataset LoadMovieLens1m(const std::filesystem::path& path) {
  auto in = Open(path);
  return ParseMovieLens1m(in);
}

RatingDataset ParseCsv(std::istream& in, RatingScale scale) {
  Builder builder(scale);
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(Trim(line), ",");
    if (!header_seen) {
      if (fields.size() < 3 || Trim(fields[0]) != "user" ||
          Trim(fields[1]) != "item" || Trim(fields[2]) != "rating") {
        throw ParseError("header must start with user,item,rating", number);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 3) {
      throw ParseError("expected at least 3 fields", number);
    }
    builder.Add(fields[0], fields[1], fields[2], number);
  }
  return builder.Finish();
}

RatingDataset LoadCsv(const std::filesystem::path& path, RatingScale scale) {
  auto in = Open(path);
  return ParseCsv(in, scale);
}

namespace {

// Entry positions grouped by user, each group in source order.
std::vector<std::vector<std::size_t>> PositionsByUser(
    const RatingDataset& dataset) {
  std::vector<std::vector<std::size_t>> groups(
      static_cast<std::size_t>(dataset.n_users()));
  const auto entries = dataset.entries();
  for (std::size_t p = 0; p < entries.size(); ++p) {
    groups[static_cast<std::size_t>(entries[p].user)].push_back(p);
  }
  return groups;
}

// Splits by a per-position flag, keeping source order on both sides.
std::pair<RatingDataset, RatingDataset> Partition(
    const RatingDataset& dataset, const std::vector<bool>& to_second) {
  std::vector<Rating> first;
  std::vector<Rating> second;
  const auto entries = dataset.entries();
  for (std::size_t p = 0; p < entries.size(); ++p) {
    (to_second[p] ? second : first).push_back(entries[p]);
  }
  return {dataset.WithEntries(std::move(first)),
          dataset.WithEntries(std::move(second))};
}

}  // namespace

SplitPlan SplitLeaveNOut(const RatingDataset& dataset, std::size_t n_test,
                         std::uint64_t master_seed) {
  std::vector<bool> is_test(dataset.size(), false);
  auto groups = PositionsByUser(dataset);
  for (std::size_t u = 0; u < groups.size(); ++u) {
    auto& group = groups[u];
    if (group.size() <= n_test) continue;
    KeyedStream stream(master_seed, StreamPurpose::kSplit, u);
    std::shuffle(group.begin(), group.end(), stream);
    for (std::size_t s = 0; s < n_test; ++s) is_test[group[s]] = true;
  }
  auto [train, test] = Partition(dataset, is_test);
  return {std::move(train), std::move(test),
          "leave-" + std::to_string(n_test) + "-out"};
}

SplitPlan SplitLeaveOneOut(const RatingDataset& dataset,
                           std::uint64_t master_seed) {
  SplitPlan plan = SplitLeaveNOut(dataset, 1, master_seed);
  plan.description = "leave-one-out";
  return plan;
}

std::vector<SplitPlan> KFoldSplits(const RatingDataset& dataset, int k,
                                   std::uint64_t master_seed) {
  if (k < 2) throw UsageError("k-fold needs k >= 2");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  KeyedStream stream(master_seed, StreamPurpose::kFolds);
  std::shuffle(order.begin(), order.end(), stream);
  std::vector<int> fold_of(dataset.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    fold_of[order[s]] = static_cast<int>(s % static_cast<std::size_t>(k));
  }
  std::vector<SplitPlan> plans;
  for (int f = 0; f < k; ++f) {
    std::vector<bool> in_fold(dataset.size());
    for (std::size_t p = 0; p < fold_of.size(); ++p) {
      in_fold[p] = fold_of[p] == f;
    }
    auto [train, test] = Partition(dataset, in_fold);
    plans.push_back({std::move(train), std::move(test),
                     "fold " + std::to_string(f + 1) + "/" +
                         std::to_string(k)});
  }
  return plans;
}

RatingDataset SubsamplePerUser(const RatingDataset& dataset, double fraction,
                               std::uint64_t master_seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("fraction must lie in (0, 1]");
  }
  std::vector<bool> dropped(dataset.size(), false);
  auto groups = PositionsByUser(dataset);
  for (std::size_t u = 0; u < groups.size(); ++u) {
    auto& group = groups[u];
    const auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(group.size()) - 1e-9));
    if (keep >= group.size()) continue;
    KeyedStream stream(master_seed, StreamPurpose::kSubsample, u);
    std::shuffle(group.begin(), group.end(), stream);
    for (std::size_t s = keep; s < group.size(); ++s) dropped[group[s]] = true;
  }
  return Partition(dataset, dropped).first;
}

}  // namespace hdpmf
