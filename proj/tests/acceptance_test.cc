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

// Acceptance checks. Each criterion prints one line:
//   AC<n> <name>: PASS|FAIL <measurements>
// Run one with --criterion N, or all without arguments. The exit status is
// nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hdpmf/baselines.h"
#include "hdpmf/config.h"
#include "hdpmf/core_model.h"
#include "hdpmf/eval.h"
#include "hdpmf/privacy.h"
#include "hdpmf/protocol.h"
#include "hdpmf/random.h"
#include "test_util.h"

namespace hdpmf {
namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

template <typename... Args>
std::string Fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

ExperimentConfig MovieLensConfig() {
  ExperimentConfig c;
  const char* dir = std::getenv("HDPMF_DATA_DIR");
  c.dataset = std::filesystem::path(dir && *dir ? dir : "/root/data") /
              "ml-100k" / "u.data";
  return c;
}

// Loaded on first use so that the synthetic criteria run without it.
const RatingDataset& MovieLens() {
  static const RatingDataset data = [] {
    const auto c = MovieLensConfig();
    c.CheckFiles();
    return LoadDataset(c);
  }();
  return data;
}

// Default setting: leave-10-out, T = 100, seeds 1..5, default privacy spec.
const ExperimentResult& Run(Method method, int dim) {
  static std::map<std::pair<Method, int>, ExperimentResult> cache;
  const auto key = std::make_pair(method, dim);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto config = MovieLensConfig();
  config.dim = dim;
  return cache.emplace(key, RunExperiment(config, method, MovieLens()))
      .first->second;
}

std::string Describe(const ExperimentResult& r) {
  const auto mse = r.MseSummary();
  const auto mae = r.MaeSummary();
  return Fmt("%s K=%d MSE %.4f+/-%.4f MAE %.4f+/-%.4f n=%zu",
             std::string(MethodName(r.method)).c_str(), r.dim, mse.mean,
             mse.stddev, mae.mean, mae.stddev, mse.n);
}

bool Complete(const ExperimentResult& r) {
  return !r.partial() && r.seeds.size() == 5;
}

Verdict NonPrivateReproduction() {
  const auto start = std::chrono::steady_clock::now();
  const auto& mf = Run(Method::kMf, 10);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  const double mse = mf.MseSummary().mean;
  const double mae = mf.MaeSummary().mean;
  const bool ok = Complete(mf) && mse >= 0.87 && mse <= 0.98 && mae >= 0.73 &&
                  mae <= 0.80 && seconds < 600;
  return {ok, Describe(mf) +
                  Fmt(" (bands MSE [0.87,0.98] MAE [0.73,0.80]) %.1fs",
                      seconds)};
}

Verdict HdpmfReproduction() {
  const auto& k10 = Run(Method::kHdpmf, 10);
  const auto& k5 = Run(Method::kHdpmf, 5);
  const double m10 = k10.MseSummary().mean;
  const double m5 = k5.MseSummary().mean;
  const bool ok = Complete(k10) && Complete(k5) && m10 >= 1.30 &&
                  m10 <= 1.65 && m5 >= 1.10 && m5 <= 1.40;
  return {ok, Describe(k10) + " band [1.30,1.65]; " + Describe(k5) +
                  " band [1.10,1.40]"};
}

Verdict MethodOrdering() {
  const auto& mf = Run(Method::kMf, 10);
  const auto& h = Run(Method::kHdpmf, 10);
  const auto& p = Run(Method::kPdpmf, 10);
  const auto& d = Run(Method::kDpmf, 10);
  const double a = mf.MseSummary().mean, b = h.MseSummary().mean,
               c = p.MseSummary().mean, e = d.MseSummary().mean;
  bool ok = Complete(mf) && Complete(h) && Complete(p) && Complete(d) &&
            a < b && b < c && c < e;
  std::string t_detail = "t-test n/a";
  if (Complete(h) && Complete(p)) {
    const auto t = PairedTTest(p.Mses(), h.Mses());
    ok = ok && t.level != Significance::kNone;
    t_detail = Fmt("t-test hdpmf<pdpmf t=%.3f level %s (need >= 90%%)", t.t,
                   std::string(SignificanceLabel(t.level)).c_str());
  }
  return {ok, Fmt("MSE mf %.4f < hdpmf %.4f < pdpmf %.4f < dpmf %.4f; ", a, b,
                  c, e) +
                  t_detail};
}

Verdict Ablation() {
  const auto& r = Run(Method::kHdpmfR, 10);
  const auto& d = Run(Method::kDpmf, 10);
  const double a = r.MseSummary().mean, b = d.MseSummary().mean;
  return {Complete(r) && Complete(d) && a > b,
          Fmt("hdpmf_r MSE %.4f > dpmf MSE %.4f", a, b)};
}

Verdict NoiseComposition() {
  bool ok = true;
  std::string detail;
  for (std::size_t raters : {1u, 5u, 50u}) {
    const auto r = CheckNoiseComposition(10, 4.0, 1.0, raters, 1'000'000, 1);
    const bool pass = r.variance_relative_error() <= 0.01 &&
                      r.ks_distance < 0.002 &&
                      std::abs(r.scale - 8.0 * std::sqrt(10.0)) < 1e-12;
    ok = ok && pass;
    detail += Fmt("raters=%zu var %.2f/%.2f rel %.4f ks %.5f; ", raters,
                  r.variance, r.expected_variance, r.variance_relative_error(),
                  r.ks_distance);
  }
  return {ok, detail + "(tol var 1%, ks 0.002)"};
}

Verdict GradientOracle() {
  int instances = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    KeyedStream s(seed, StreamPurpose::kSynthetic, 7);
    std::uniform_int_distribution<int> size(1, 5);
    const Index n = size(s), m = size(s);
    const int dim = size(s);
    std::uniform_real_distribution<double> unit(-1, 1);
    std::bernoulli_distribution keep(0.6);
    const auto reg = seed % 2 ? RegularizationScheme::kPerRating
                              : RegularizationScheme::kPerEntity;
    FactorModel model =
        InitModel(n, m, dim, seed, 0.1 + 0.2 * static_cast<double>(seed % 3),
                  reg);
    for (double& x : model.users.data()) x = unit(s);
    for (double& x : model.items.data()) x = unit(s);
    std::vector<Observation> obs;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) {
        if (keep(s)) obs.push_back({i, j, 1 + 4 * (unit(s) + 1) / 2});
      }
    }
    if (obs.empty()) continue;
    std::vector<double> shares(obs.size() * dim);
    for (double& x : shares) x = 5 * unit(s);
    auto fd = [&](std::span<double> row, int k) {
      const double h = 1e-6, saved = row[k];
      row[k] = saved + h;
      const double up = PrivateObjective(model, obs, shares);
      row[k] = saved - h;
      const double down = PrivateObjective(model, obs, shares);
      row[k] = saved;
      return (up - down) / (2 * h);
    };
    auto rel = [](const std::vector<double>& g, const std::vector<double>& f) {
      double num = 0, den = 0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        num += (g[k] - f[k]) * (g[k] - f[k]);
        den += f[k] * f[k];
      }
      return std::sqrt(num) / std::max(std::sqrt(den), 1e-3);
    };
    for (Index j = 0; j < m; ++j) {
      std::vector<RaterTerm> raters;
      std::vector<double> noise(dim, 0.0);
      for (std::size_t p = 0; p < obs.size(); ++p) {
        if (obs[p].item != j) continue;
        raters.push_back({obs[p].user, obs[p].target});
        for (int k = 0; k < dim; ++k) noise[k] += shares[p * dim + k];
      }
      if (raters.empty()) continue;
      const auto g = ItemGradient(model, j, raters, noise);
      std::vector<double> f(dim);
      for (int k = 0; k < dim; ++k) f[k] = fd(model.items.row(j), k);
      worst = std::max(worst, rel(g, f));
    }
    for (Index i = 0; i < n; ++i) {
      std::vector<ItemTerm> items;
      for (const auto& o : obs) {
        if (o.user == i) items.push_back({o.item, o.target});
      }
      const auto g = UserGradient(model, i, items);
      std::vector<double> f(dim);
      for (int k = 0; k < dim; ++k) f[k] = fd(model.users.row(i), k);
      worst = std::max(worst, rel(g, f));
    }
    ++instances;
  }
  return {instances >= 100 && worst < 1e-5,
          Fmt("%d instances, max relative error %.3e (tol 1e-5)", instances,
              worst)};
}

Verdict Reduction() {
  const auto data = testing::SyntheticDataset(50, 50, 0.2, 31);
  TrainConfig config;
  config.execution = ExecutionMode::kReference;
  config.initial_learning_rate = 0.01;
  const auto ones = UniformWeights(50, 50);
  const auto protocol = RunProtocol(data, &ones, std::nullopt, config);
  const auto mf = RunMf(data, config);
  const auto a = protocol.model.items.data();
  const auto b = mf.items.data();
  const bool same = a.size() == b.size() &&
                    std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
  return {same, Fmt("50x50, %zu ratings, T=%d: final V %s", data.size(),
                    config.epochs, same ? "bitwise identical" : "differs")};
}

Verdict Determinism() {
  auto config = MovieLensConfig();
  config.methods = {Method::kHdpmf, Method::kPdpmf};
  config.seeds = {1, 2};
  const auto dir = std::filesystem::temp_directory_path();
  const auto first = dir / "hdpmf_determinism_a.csv";
  const auto second = dir / "hdpmf_determinism_b.csv";
  config.CheckFiles();
  EmitResults(RunExperiment(config), config, first);
  EmitResults(RunExperiment(config), config, second);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto a = slurp(first), b = slurp(second);
  std::filesystem::remove(first);
  std::filesystem::remove(second);
  return {!a.empty() && a == b,
          Fmt("hdpmf+pdpmf, 2 seeds on ML-100K: %zu-byte CSVs %s", a.size(),
              a == b ? "identical" : "differ")};
}

class AuditObserver : public ChannelObserver {
 public:
  void OnRegistration(const RaterRegistration& m) override {
    registrations.insert({m.user, m.item});
  }
  void OnGradient(const GradientMessage& m) override { gradients.push_back(m); }
  void OnNoiseBroadcast(Index item, Index recipient,
                        std::span<const double>) override {
    noise_to.insert({recipient, item});
  }
  void OnItemBroadcast(Index item, Index recipient,
                       std::span<const double>) override {
    items_to.insert({recipient, item});
  }

  std::set<std::pair<Index, Index>> registrations;
  std::vector<GradientMessage> gradients;
  std::set<std::pair<Index, Index>> noise_to;
  std::set<std::pair<Index, Index>> items_to;
};

Verdict InformationFlow() {
  const auto data = testing::SyntheticDataset(20, 20, 0.3, 77);
  const auto weights = AllocateWeights(PrivacySpec{}, 20, 20, 77);
  TrainConfig config;
  config.dim = 10;
  config.epochs = 10;
  AuditObserver audit;
  std::set<double> secrets;
  std::set<std::pair<Index, Index>> rated;
  for (const auto& r : data.entries()) {
    secrets.insert(r.value);
    secrets.insert(Weight(weights, r.user, r.item));
    secrets.insert(Weight(weights, r.user, r.item) * r.value);
    rated.insert({r.user, r.item});
  }
  ProtocolOptions options;
  options.observer = &audit;
  options.on_epoch = [&](int, const FactorModel& model) {
    for (double x : model.users.data()) secrets.insert(x);
  };
  const auto init = InitModel(20, 20, config.dim, config.master_seed);
  for (double x : init.users.data()) secrets.insert(x);
  RunHdpmf(data, weights, 1.0, config, options);

  std::size_t bad_length = 0, leaked = 0, unregistered = 0;
  for (const auto& m : audit.gradients) {
    if (m.payload.size() != static_cast<std::size_t>(config.dim)) ++bad_length;
    if (!rated.count({m.sender, m.item})) ++unregistered;
    for (double x : m.payload) {
      if (secrets.count(x) || !std::isfinite(x)) ++leaked;
    }
  }
  const bool ok = bad_length == 0 && leaked == 0 && unregistered == 0 &&
                  audit.registrations == rated && audit.noise_to == rated &&
                  audit.items_to == rated &&
                  audit.gradients.size() == data.size() * config.epochs;
  return {ok, Fmt("20x20, %zu messages: %zu non-K payloads, %zu payload "
                  "values equal to a rating/weight/user-vector entry, %zu "
                  "from non-raters",
                  audit.gradients.size(), bad_length, leaked, unregistered)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> check;
};

}  // namespace
}  // namespace hdpmf

int main(int argc, char** argv) {
  using namespace hdpmf;
  const std::vector<Criterion> criteria = {
      {1, "non-private reproduction", NonPrivateReproduction},
      {2, "HDPMF reproduction", HdpmfReproduction},
      {3, "method ordering", MethodOrdering},
      {4, "rescaling ablation", Ablation},
      {5, "noise composition", NoiseComposition},
      {6, "gradient oracle", GradientOracle},
      {7, "reduction to MF", Reduction},
      {8, "determinism", Determinism},
      {9, "information-flow audit", InformationFlow},
  };
  std::optional<int> only;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    }
  }
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && *only != c.id) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("AC%d %s: %s %s\n", c.id, c.name, v.passed ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
    if (!v.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
