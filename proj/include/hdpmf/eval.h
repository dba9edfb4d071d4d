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

#ifndef HDPMF_EVAL_H_
#define HDPMF_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hdpmf/baselines.h"
#include "hdpmf/config.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {

// Both throw UsageError on empty or unequal-length input.
double Mse(std::span<const double> predictions, std::span<const double> truths);
double Mae(std::span<const double> predictions, std::span<const double> truths);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  double mse = 0.0;
  double mae = 0.0;
  std::string error;  // set when !ok
};

// Mean and sample (n - 1) standard deviation; stddev is 0 when n == 1.
struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

MetricSummary Summarize(std::span<const double> values);

struct ExperimentResult {
  Method method = Method::kHdpmf;
  std::string dataset;
  int dim = 0;
  double epsilon = 0.0;
  double f_uc = 0.0;
  double eps_uc = 0.0;
  double fraction = 1.0;
  std::vector<SeedOutcome> seeds;

  std::vector<double> Mses() const;  // successful seeds only
  std::vector<double> Maes() const;
  MetricSummary MseSummary() const { return Summarize(Mses()); }
  MetricSummary MaeSummary() const { return Summarize(Maes()); }
  bool partial() const;
};

// Runs one method over config.seeds on an already-loaded dataset. A run that
// diverges is recorded as a failed seed rather than thrown.
ExperimentResult RunExperiment(const ExperimentConfig& config, Method method,
                               const RatingDataset& dataset);

// Loads the dataset and runs every configured method.
std::vector<ExperimentResult> RunExperiment(const ExperimentConfig& config);

RatingDataset LoadDataset(const ExperimentConfig& config);

enum class Significance { kNone, k90, k95, k99 };
std::string_view SignificanceLabel(Significance level);

struct TTestResult {
  double t = 0.0;
  Significance level = Significance::kNone;
};

// Paired, one-sided: tests mean(a - b) > 0, i.e. `b` has the lower error.
// Pass the baseline as `a` and the candidate as `b`.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

// Seed rows, a blank line, aggregate rows, then the effective config as
// `# key = value` comment lines. Throws IoError if unwritable.
void WriteResults(std::ostream& out, std::span<const ExperimentResult> results,
                  const ExperimentConfig& config);
void EmitResults(std::span<const ExperimentResult> results,
                 const ExperimentConfig& config,
                 const std::filesystem::path& path);

// Reads back the seed rows written by WriteResults.
struct ResultRow {
  std::string method;
  std::string dataset;
  int dim = 0;
  double epsilon = 0.0;
  double f_uc = 0.0;
  double eps_uc = 0.0;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  double mse = 0.0;
  double mae = 0.0;
};
std::vector<ResultRow> ReadResultRows(std::istream& in);

inline constexpr const char* kResultsHeader =
    "method,dataset,K,eps,f_uc,eps_uc,fraction,seed,mse,mae";
inline constexpr const char* kAggregateHeader =
    "method,dataset,K,eps,f_uc,eps_uc,fraction,n,mse_mean,mse_std,mae_mean,"
    "mae_std,partial";

}  // namespace hdpmf

#endif  // HDPMF_EVAL_H_
