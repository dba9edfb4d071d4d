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

#ifndef HDPMF_CONFIG_H_
#define HDPMF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdpmf/baselines.h"
#include "hdpmf/core_model.h"
#include "hdpmf/privacy.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {

enum class DatasetFormat { kMovieLens100k, kMovieLens1m, kCsv };
enum class SplitKind { kLeaveNOut, kLeaveOneOut };

inline constexpr double kDefaultMfLearningRate = 0.02;
inline constexpr double kDefaultPrivateLearningRate = 0.001;

// One experiment: every method in `methods` runs on every seed. Values not
// given in the file keep these defaults.
struct ExperimentConfig {
  std::filesystem::path dataset = "ml-100k/u.data";
  std::string dataset_name;  // empty: derived from the path
  DatasetFormat format = DatasetFormat::kMovieLens100k;
  RatingScale scale;

  std::vector<Method> methods = {Method::kHdpmf};
  int dim = 10;
  int epochs = 100;
  double learning_rate = 0.0;  // 0: per-method default
  double lambda = 0.02;
  PrivacySpec privacy;

  UpdateScheme update = UpdateScheme::kSequential;
  RegularizationScheme regularization = RegularizationScheme::kPerRating;
  ExecutionMode execution = ExecutionMode::kReference;

  SplitKind split = SplitKind::kLeaveNOut;
  std::size_t n_test = 10;
  double fraction = 1.0;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  std::filesystem::path output = "results.csv";
  bool rescale = true;
  bool clamp = true;
  std::filesystem::path trace;       // empty: off
  std::filesystem::path loss_trace;  // empty: off

  // Throws ConfigError naming the key.
  void Validate() const;
  // Throws ConfigError naming the dataset path if it does not exist.
  void CheckFiles() const;

  double LearningRateFor(Method method) const;
  TrainConfig TrainConfigFor(Method method, std::uint64_t seed) const;
  std::string DatasetLabel() const;
  // The dataset path with a relative path resolved against HDPMF_DATA_DIR
  // when that variable is set.
  std::filesystem::path ResolvedDataset() const;

  // Every key with its effective value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> Effective() const;
};

// Sets one key. Throws ConfigError on an unknown key or a bad value.
void ApplySetting(ExperimentConfig& config, std::string_view key,
                  std::string_view value);

// Flat `key = value` lines; `#` starts a comment. The result is validated.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

std::string FormatDouble(double value);

}  // namespace hdpmf

#endif  // HDPMF_CONFIG_H_
