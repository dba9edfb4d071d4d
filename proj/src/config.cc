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

#include "hdpmf/config.h"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <system_error>

#include "hdpmf/errors.h"

namespace hdpmf {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Fail(std::string_view key, const std::string& why) {
  throw ConfigError("config key '" + std::string(key) + "': " + why);
}

double ToDouble(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [end, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    Fail(key, "expected a number, got '" + std::string(value) + "'");
  }
  return out;
}

long long ToInteger(std::string_view key, std::string_view value) {
  long long out = 0;
  const auto [end, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    Fail(key, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

bool ToBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  Fail(key, "expected true or false, got '" + std::string(value) + "'");
}

std::vector<std::string_view> SplitList(std::string_view value) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto at = value.find(',', start);
    const auto piece = Trim(value.substr(
        start, at == std::string_view::npos ? std::string_view::npos
                                            : at - start));
    if (!piece.empty()) out.push_back(piece);
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::string_view FormatName(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::kMovieLens100k:
      return "ml-100k";
    case DatasetFormat::kMovieLens1m:
      return "ml-1m";
    case DatasetFormat::kCsv:
      return "csv";
  }
  return "";
}

}  // namespace

std::string FormatDouble(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       value);
  return std::string(buf.data(), end);
}

void ApplySetting(ExperimentConfig& c, std::string_view key,
                  std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  auto real = [&] { return ToDouble(key, value); };
  auto integer = [&] { return ToInteger(key, value); };
  auto positive_int = [&] {
    const long long v = integer();
    if (v < 1 || v > 1'000'000) Fail(key, "must be a positive integer");
    return static_cast<int>(v);
  };
  if (key == "dataset") {
    c.dataset = std::string(value);
  } else if (key == "dataset_name") {
    c.dataset_name = std::string(value);
  } else if (key == "format") {
    if (value == "ml-100k") c.format = DatasetFormat::kMovieLens100k;
    else if (value == "ml-1m") c.format = DatasetFormat::kMovieLens1m;
    else if (value == "csv") c.format = DatasetFormat::kCsv;
    else Fail(key, "expected ml-100k, ml-1m or csv");
  } else if (key == "scale_min") {
    c.scale.min = real();
  } else if (key == "scale_max") {
    c.scale.max = real();
  } else if (key == "method") {
    std::vector<Method> methods;
    for (auto name : SplitList(value)) {
      const auto m = ParseMethod(name);
      if (!m) Fail(key, "unknown method '" + std::string(name) + "'");
      methods.push_back(*m);
    }
    if (methods.empty()) Fail(key, "no method given");
    c.methods = methods;
    if (methods.size() == 1 && methods[0] == Method::kHdpmfR) {
      c.rescale = false;
    }
  } else if (key == "K" || key == "dim") {
    c.dim = positive_int();
  } else if (key == "epochs" || key == "T") {
    c.epochs = positive_int();
  } else if (key == "learning_rate") {
    c.learning_rate = real();
  } else if (key == "lambda") {
    c.lambda = real();
  } else if (key == "epsilon" || key == "eps") {
    c.privacy.epsilon = real();
  } else if (key == "f_uc") {
    c.privacy.f_uc = real();
  } else if (key == "f_um") {
    c.privacy.f_um = real();
  } else if (key == "eps_uc") {
    c.privacy.eps_uc = real();
  } else if (key == "eps_um") {
    c.privacy.eps_um = real();
  } else if (key == "f_ic") {
    c.privacy.f_ic = real();
  } else if (key == "f_im") {
    c.privacy.f_im = real();
  } else if (key == "eps_ic") {
    c.privacy.eps_ic = real();
  } else if (key == "eps_im") {
    c.privacy.eps_im = real();
  } else if (key == "update") {
    if (value == "sequential") c.update = UpdateScheme::kSequential;
    else if (value == "batch") c.update = UpdateScheme::kBatch;
    else Fail(key, "expected sequential or batch");
  } else if (key == "regularization") {
    if (value == "per_rating") {
      c.regularization = RegularizationScheme::kPerRating;
    } else if (value == "per_entity") {
      c.regularization = RegularizationScheme::kPerEntity;
    } else {
      Fail(key, "expected per_rating or per_entity");
    }
  } else if (key == "execution") {
    if (value == "reference") c.execution = ExecutionMode::kReference;
    else if (value == "parallel") c.execution = ExecutionMode::kParallel;
    else Fail(key, "expected reference or parallel");
  } else if (key == "split") {
    if (value == "leave_n_out") c.split = SplitKind::kLeaveNOut;
    else if (value == "leave_one_out") c.split = SplitKind::kLeaveOneOut;
    else Fail(key, "expected leave_n_out or leave_one_out");
  } else if (key == "n_test") {
    const long long v = integer();
    if (v < 1) Fail(key, "must be >= 1");
    c.n_test = static_cast<std::size_t>(v);
  } else if (key == "fraction") {
    c.fraction = real();
  } else if (key == "seeds") {
    std::vector<std::uint64_t> seeds;
    for (auto s : SplitList(value)) {
      const long long v = ToInteger(key, s);
      if (v < 0) Fail(key, "seeds must be non-negative");
      seeds.push_back(static_cast<std::uint64_t>(v));
    }
    c.seeds = seeds;
  } else if (key == "output") {
    c.output = std::string(value);
  } else if (key == "rescale") {
    c.rescale = ToBool(key, value);
  } else if (key == "clamp") {
    c.clamp = ToBool(key, value);
  } else if (key == "trace") {
    c.trace = std::string(value);
  } else if (key == "loss_trace") {
    c.loss_trace = std::string(value);
  } else {
    Fail(key, "unknown key");
  }
}

void ExperimentConfig::Validate() const {
  if (dataset.empty()) Fail("dataset", "must be set");
  if (!(scale.max > scale.min)) Fail("scale_max", "must exceed scale_min");
  if (methods.empty()) Fail("method", "no method given");
  if (!(learning_rate >= 0.0)) Fail("learning_rate", "must be >= 0");
  if (!(lambda >= 0.0)) Fail("lambda", "must be >= 0");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    Fail("fraction", "must lie in (0, 1]");
  }
  if (seeds.empty()) Fail("seeds", "at least one seed is required");
  if (!(privacy.epsilon > 0.0)) Fail("epsilon", "must be > 0");
  try {
    privacy.Validate();
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::CheckFiles() const {
  const auto path = ResolvedDataset();
  if (!std::filesystem::exists(path)) {
    throw ConfigError("dataset file not found: " + path.string());
  }
}

double ExperimentConfig::LearningRateFor(Method method) const {
  if (learning_rate > 0.0) return learning_rate;
  return method == Method::kMf ? kDefaultMfLearningRate
                               : kDefaultPrivateLearningRate;
}

TrainConfig ExperimentConfig::TrainConfigFor(Method method,
                                             std::uint64_t seed) const {
  TrainConfig t;
  t.epochs = epochs;
  t.initial_learning_rate = LearningRateFor(method);
  t.lambda = lambda;
  t.dim = dim;
  t.master_seed = seed;
  t.update = update;
  t.regularization = regularization;
  t.execution = execution;
  return t;
}

std::string ExperimentConfig::DatasetLabel() const {
  if (!dataset_name.empty()) return dataset_name;
  const auto parent = dataset.parent_path().filename().string();
  return parent.empty() ? dataset.stem().string() : parent;
}

std::filesystem::path ExperimentConfig::ResolvedDataset() const {
  if (dataset.is_absolute()) return dataset;
  if (const char* dir = std::getenv("HDPMF_DATA_DIR"); dir && *dir) {
    return std::filesystem::path(dir) / dataset;
  }
  return dataset;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::Effective()
    const {
  std::string method_list;
  for (Method m : methods) {
    if (!method_list.empty()) method_list += ",";
    method_list += MethodName(m);
  }
  std::string seed_list;
  for (auto s : seeds) {
    if (!seed_list.empty()) seed_list += ",";
    seed_list += std::to_string(s);
  }
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"dataset", dataset.string()},
      {"dataset_name", DatasetLabel()},
      {"format", std::string(FormatName(format))},
      {"scale_min", FormatDouble(scale.min)},
      {"scale_max", FormatDouble(scale.max)},
      {"method", method_list},
      {"K", std::to_string(dim)},
      {"epochs", std::to_string(epochs)},
      {"learning_rate", FormatDouble(learning_rate)},
      {"lambda", FormatDouble(lambda)},
      {"epsilon", FormatDouble(privacy.epsilon)},
      {"f_uc", FormatDouble(privacy.f_uc)},
      {"f_um", FormatDouble(privacy.f_um)},
      {"eps_uc", FormatDouble(privacy.eps_uc)},
      {"eps_um", FormatDouble(privacy.eps_um)},
      {"f_ic", FormatDouble(privacy.f_ic)},
      {"f_im", FormatDouble(privacy.f_im)},
      {"eps_ic", FormatDouble(privacy.eps_ic)},
      {"eps_im", FormatDouble(privacy.eps_im)},
      {"update", update == UpdateScheme::kSequential ? "sequential" : "batch"},
      {"regularization", regularization == RegularizationScheme::kPerRating
                             ? "per_rating"
                             : "per_entity"},
      {"execution",
       execution == ExecutionMode::kReference ? "reference" : "parallel"},
      {"split", split == SplitKind::kLeaveNOut ? "leave_n_out"
                                               : "leave_one_out"},
      {"n_test", std::to_string(n_test)},
      {"fraction", FormatDouble(fraction)},
      {"seeds", seed_list},
      {"output", output.string()},
      {"rescale", b(rescale)},
      {"clamp", b(clamp)},
      {"trace", trace.string()},
      {"loss_trace", loss_trace.string()},
  };
}

ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": expected key = value");
    }
    ApplySetting(config, view.substr(0, eq), view.substr(eq + 1));
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return ParseConfig(in);
}

}  // namespace hdpmf
