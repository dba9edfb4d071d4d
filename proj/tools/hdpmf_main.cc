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

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdpmf/config.h"
#include "hdpmf/errors.h"
#include "hdpmf/eval.h"
#include "hdpmf/privacy.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

hdpmf::ExperimentConfig BuildConfig(const std::string& path,
                                    const std::vector<std::string>& sets) {
  hdpmf::ExperimentConfig config = hdpmf::LoadConfig(path);
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw hdpmf::ConfigError("--set expects key=value, got '" + s + "'");
    }
    hdpmf::ApplySetting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  config.Validate();
  config.CheckFiles();
  return config;
}

void PrintSummary(const std::vector<hdpmf::ExperimentResult>& results) {
  for (const auto& r : results) {
    const auto mse = r.MseSummary();
    const auto mae = r.MaeSummary();
    std::printf("%-8s K=%d eps=%g f_uc=%g eps_uc=%g fraction=%g  "
                "MSE %.4f +/- %.4f  MAE %.4f +/- %.4f  (n=%zu%s)\n",
                std::string(hdpmf::MethodName(r.method)).c_str(), r.dim,
                r.epsilon, r.f_uc, r.eps_uc, r.fraction, mse.mean, mse.stddev,
                mae.mean, mae.stddev, mse.n, r.partial() ? ", partial" : "");
    for (const auto& s : r.seeds) {
      if (!s.ok) {
        std::fprintf(stderr, "  seed %llu failed: %s\n",
                     static_cast<unsigned long long>(s.seed), s.error.c_str());
      }
    }
  }
  // HDPMF against every other method run on the same setting.
  for (const auto& cand : results) {
    if (cand.method != hdpmf::Method::kHdpmf || cand.partial()) continue;
    for (const auto& base : results) {
      if (&base == &cand || base.partial() || base.dim != cand.dim ||
          base.eps_uc != cand.eps_uc || base.f_uc != cand.f_uc ||
          base.fraction != cand.fraction || base.seeds.size() < 2) {
        continue;
      }
      const auto t = hdpmf::PairedTTest(base.Mses(), cand.Mses());
      std::printf("t-test hdpmf < %s (f_uc=%g eps_uc=%g fraction=%g): "
                  "t = %.4f, significance %s\n",
                  std::string(hdpmf::MethodName(base.method)).c_str(),
                  cand.f_uc, cand.eps_uc, cand.fraction, t.t,
                  std::string(hdpmf::SignificanceLabel(t.level)).c_str());
    }
  }
}

bool AnyFailed(const std::vector<hdpmf::ExperimentResult>& results) {
  for (const auto& r : results) {
    if (r.partial()) return true;
  }
  return false;
}

int RunCommand(const std::string& path, const std::vector<std::string>& sets) {
  const auto config = BuildConfig(path, sets);
  const auto results = hdpmf::RunExperiment(config);
  hdpmf::EmitResults(results, config, config.output);
  PrintSummary(results);
  std::printf("results written to %s\n", config.output.string().c_str());
  return AnyFailed(results) ? kExitRunFailure : kExitOk;
}

int SweepCommand(const std::string& path, const std::vector<std::string>& sets,
                 const std::string& key, const std::vector<std::string>& values) {
  if (key != "eps_uc" && key != "f_uc" && key != "fraction") {
    throw hdpmf::ConfigError("sweep key must be eps_uc, f_uc or fraction");
  }
  auto base = BuildConfig(path, sets);
  if (key == "fraction") base.split = hdpmf::SplitKind::kLeaveOneOut;
  const auto dataset = hdpmf::LoadDataset(base);
  std::vector<hdpmf::ExperimentResult> results;
  for (const std::string& value : values) {
    auto config = base;
    hdpmf::ApplySetting(config, key, value);
    config.Validate();
    for (hdpmf::Method m : config.methods) {
      results.push_back(hdpmf::RunExperiment(config, m, dataset));
    }
  }
  hdpmf::EmitResults(results, base, base.output);
  PrintSummary(results);
  std::printf("results written to %s\n", base.output.string().c_str());
  return AnyFailed(results) ? kExitRunFailure : kExitOk;
}

int CheckNoiseCommand(int dim, double range, double epsilon,
                      const std::vector<std::size_t>& raters,
                      std::size_t samples, std::uint64_t seed) {
  bool all_passed = true;
  for (std::size_t n : raters) {
    const auto r =
        hdpmf::CheckNoiseComposition(dim, range, epsilon, n, samples, seed);
    std::printf(
        "raters=%zu samples=%zu b=%.6f mean=%.6f (tol %.6f) "
        "variance=%.4f expected=%.4f rel_err=%.5f ks=%.6f  %s\n",
        n, samples, r.scale, r.mean, r.mean_tolerance, r.variance,
        r.expected_variance, r.variance_relative_error(), r.ks_distance,
        r.passed() ? "PASS" : "FAIL");
    all_passed = all_passed && r.passed();
  }
  return all_passed ? kExitOk : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous differentially private matrix factorization"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", sets, "Override a config key (key=value)");

  std::string sweep_key;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--set", sets, "Override a config key (key=value)");
  sweep->add_option("--key", sweep_key, "eps_uc, f_uc or fraction")
      ->required();
  sweep->add_option("--values", sweep_values, "Values to sweep")
      ->required()
      ->delimiter(',');

  int dim = 10;
  double range = 4.0;
  double epsilon = 1.0;
  std::vector<std::size_t> raters{1, 5, 50};
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  auto* check = app.add_subcommand(
      "check-noise", "Monte-Carlo check of the decomposed item noise");
  check->add_option("--dim", dim, "Latent dimension K")
      ->check(CLI::PositiveNumber);
  check->add_option("--range", range, "Rating range (max - min)")
      ->check(CLI::PositiveNumber);
  check->add_option("--epsilon", epsilon, "Privacy budget")
      ->check(CLI::PositiveNumber);
  check->add_option("--raters", raters, "Raters per item")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  check->add_option("--samples", samples, "Monte-Carlo samples")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}));
  check->add_option("--seed", seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run) return RunCommand(config_path, sets);
    if (*sweep) return SweepCommand(config_path, sets, sweep_key, sweep_values);
    if (*check) {
      return CheckNoiseCommand(dim, range, epsilon, raters, samples, seed);
    }
  } catch (const hdpmf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRunFailure;
  }
  return kExitOk;
}
