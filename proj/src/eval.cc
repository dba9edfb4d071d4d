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

#include "hdpmf/eval.h"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hdpmf/data_io.h"
#include "hdpmf/errors.h"
#include "hdpmf/protocol.h"

namespace hdpmf {

namespace {

void CheckPair(std::span<const double> p, std::span<const double> t) {
  if (p.empty() || p.size() != t.size()) {
    throw UsageError("metrics need equal-length, nonempty inputs");
  }
}

}  // namespace

double Mse(std::span<const double> predictions,
           std::span<const double> truths) {
  CheckPair(predictions, truths);
  double sum = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double d = predictions[k] - truths[k];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

double Mae(std::span<const double> predictions,
           std::span<const double> truths) {
  CheckPair(predictions, truths);
  double sum = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    sum += std::abs(predictions[k] - truths[k]);
  }
  return sum / static_cast<double>(predictions.size());
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.stddev = s.mean;
    return s;
  }
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<double> ExperimentResult::Mses() const {
  std::vector<double> out;
  for (const auto& s : seeds) {
    if (s.ok) out.push_back(s.mse);
  }
  return out;
}

std::vector<double> ExperimentResult::Maes() const {
  std::vector<double> out;
  for (const auto& s : seeds) {
    if (s.ok) out.push_back(s.mae);
  }
  return out;
}

bool ExperimentResult::partial() const {
  return std::any_of(seeds.begin(), seeds.end(),
                     [](const SeedOutcome& s) { return !s.ok; });
}

RatingDataset LoadDataset(const ExperimentConfig& config) {
  const auto path = config.ResolvedDataset();
  switch (config.format) {
    case DatasetFormat::kMovieLens100k:
      return LoadMovieLens100k(path);
    case DatasetFormat::kMovieLens1m:
      return LoadMovieLens1m(path);
    case DatasetFormat::kCsv:
      return LoadCsv(path, config.scale);
  }
  throw UsageError("unknown dataset format");
}

namespace {

std::filesystem::path PerRunPath(const std::filesystem::path& base,
                                 Method method, std::uint64_t seed) {
  return base.string() + "." + std::string(MethodName(method)) + "." +
         std::to_string(seed) + ".tsv";
}

SeedOutcome RunSeed(const ExperimentConfig& config, Method method,
                    const RatingDataset& dataset, std::uint64_t seed) {
  SplitPlan split = config.split == SplitKind::kLeaveNOut
                        ? SplitLeaveNOut(dataset, config.n_test, seed)
                        : SplitLeaveOneOut(dataset, seed);
  const RatingDataset train =
      config.fraction < 1.0
          ? SubsamplePerUser(split.train, config.fraction, seed)
          : std::move(split.train);
  const WeightAssignment weights = AllocateWeights(
      config.privacy, dataset.n_users(), dataset.n_items(), seed);
  const bool rescale = method == Method::kHdpmf && config.rescale;

  std::ofstream trace;
  std::ofstream loss;
  ProtocolOptions options;
  if (!config.trace.empty()) {
    trace.open(PerRunPath(config.trace, method, seed));
    if (!trace) throw IoError("cannot write trace " + config.trace.string());
    trace.precision(17);
    trace << "epoch\tphase\tindex\tmessages\tgrad_norm\n";
    options.trace = &trace;
  }
  std::vector<double> train_truth;
  if (!config.loss_trace.empty()) {
    loss.open(PerRunPath(config.loss_trace, method, seed));
    if (!loss) {
      throw IoError("cannot write loss trace " + config.loss_trace.string());
    }
    loss << "epoch\ttrain_mse\n";
    for (const Rating& r : train.entries()) train_truth.push_back(r.value);
    options.on_epoch = [&](int epoch, const FactorModel& model) {
      const auto pred = PredictAll(model, &weights, train.entries(),
                                   train.scale(), rescale, config.clamp);
      loss << epoch << '\t' << FormatDouble(Mse(pred, train_truth)) << '\n';
    };
  }

  SeedOutcome outcome;
  outcome.seed = seed;
  try {
    const MethodRun run =
        RunMethod(method, train, weights, config.privacy.epsilon,
                  config.TrainConfigFor(method, seed), options);
    const auto predictions =
        PredictAll(run.model, &weights, split.test.entries(),
                   dataset.scale(), rescale && run.rescale, config.clamp);
    std::vector<double> truths;
    truths.reserve(split.test.size());
    for (const Rating& r : split.test.entries()) truths.push_back(r.value);
    outcome.mse = Mse(predictions, truths);
    outcome.mae = Mae(predictions, truths);
    outcome.ok = true;
  } catch (const DivergedError& e) {
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config, Method method,
                               const RatingDataset& dataset) {
  config.Validate();
  ExperimentResult result;
  result.method = method;
  result.dataset = config.DatasetLabel();
  result.dim = config.dim;
  result.epsilon = config.privacy.epsilon;
  result.f_uc = config.privacy.f_uc;
  result.eps_uc = config.privacy.eps_uc;
  result.fraction = config.fraction;
  for (std::uint64_t seed : config.seeds) {
    result.seeds.push_back(RunSeed(config, method, dataset, seed));
  }
  return result;
}

std::vector<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const RatingDataset dataset = LoadDataset(config);
  std::vector<ExperimentResult> results;
  for (Method m : config.methods) {
    results.push_back(RunExperiment(config, m, dataset));
  }
  return results;
}

std::string_view SignificanceLabel(Significance level) {
  switch (level) {
    case Significance::kNone:
      return "none";
    case Significance::k90:
      return "90%";
    case Significance::k95:
      return "95%";
    case Significance::k99:
      return "99%";
  }
  return "none";
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw UsageError("paired t-test needs two equal-length samples, n >= 2");
  }
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = a[k] - b[k];
  const MetricSummary s = Summarize(d);
  TTestResult r;
  if (s.stddev == 0.0) {
    if (s.mean == 0.0) return r;
    r.t = s.mean > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    r.level = s.mean > 0.0 ? Significance::k99 : Significance::kNone;
    return r;
  }
  r.t = s.mean / (s.stddev / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  if (r.t >= boost::math::quantile(dist, 0.99)) {
    r.level = Significance::k99;
  } else if (r.t >= boost::math::quantile(dist, 0.95)) {
    r.level = Significance::k95;
  } else if (r.t >= boost::math::quantile(dist, 0.90)) {
    r.level = Significance::k90;
  }
  return r;
}

namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  return FormatDouble(v);
}

void WriteKey(std::ostream& out, const ExperimentResult& r) {
  out << MethodName(r.method) << ',' << r.dataset << ',' << r.dim << ','
      << Num(r.epsilon) << ',' << Num(r.f_uc) << ',' << Num(r.eps_uc) << ','
      << Num(r.fraction);
}

}  // namespace

void WriteResults(std::ostream& out, std::span<const ExperimentResult> results,
                  const ExperimentConfig& config) {
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    for (const auto& s : r.seeds) {
      WriteKey(out, r);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out << ',' << s.seed << ',' << Num(s.ok ? s.mse : nan) << ','
          << Num(s.ok ? s.mae : nan) << '\n';
    }
  }
  out << '\n' << kAggregateHeader << '\n';
  for (const auto& r : results) {
    const auto mse = r.MseSummary();
    const auto mae = r.MaeSummary();
    WriteKey(out, r);
    out << ',' << mse.n << ',' << Num(mse.mean) << ',' << Num(mse.stddev)
        << ',' << Num(mae.mean) << ',' << Num(mae.stddev) << ','
        << (r.partial() ? "true" : "false") << '\n';
  }
  out << '\n';
  for (const auto& [key, value] : config.Effective()) {
    out << "# " << key << " = " << value << '\n';
  }
}

void EmitResults(std::span<const ExperimentResult> results,
                 const ExperimentConfig& config,
                 const std::filesystem::path& path) {
  if (results.empty()) throw UsageError("no results to write");
  std::ostringstream buffer;
  WriteResults(buffer, results, config);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write results file " + path.string());
  out << buffer.str();
  if (!out) throw IoError("error writing results file " + path.string());
}

namespace {

double ParseNumber(const std::string& field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw ParseError("bad number '" + field + "'", 0);
  }
  return v;
}

}  // namespace

std::vector<ResultRow> ReadResultRows(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw ParseError("missing results header", 1);
  }
  ++number;
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) break;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 10) throw ParseError("expected 10 fields", number);
    try {
      ResultRow r;
      r.method = f[0];
      r.dataset = f[1];
      r.dim = std::stoi(f[2]);
      r.epsilon = ParseNumber(f[3]);
      r.f_uc = ParseNumber(f[4]);
      r.eps_uc = ParseNumber(f[5]);
      r.fraction = ParseNumber(f[6]);
      r.seed = std::stoull(f[7]);
      r.mse = ParseNumber(f[8]);
      r.mae = ParseNumber(f[9]);
      rows.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), number);
    }
  }
  return rows;
}

}  // namespace hdpmf
