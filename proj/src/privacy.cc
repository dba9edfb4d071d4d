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

#include "hdpmf/privacy.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hdpmf/errors.h"

namespace hdpmf {

namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw UsageError(std::string("privacy spec: ") + what);
}

void ValidateGroup(double f_c, double f_m, double eps_c, double eps_m,
                   double eps_l, const char* who) {
  const std::string prefix(who);
  Require(f_c >= 0.0 && f_c <= 1.0, (prefix + " conservative ratio not in [0,1]").c_str());
  Require(f_m >= 0.0 && f_m <= 1.0, (prefix + " moderate ratio not in [0,1]").c_str());
  Require(f_c + f_m <= 1.0 + 1e-12, (prefix + " ratios sum above 1").c_str());
  Require(eps_c > 0.0, (prefix + " conservative weight must be > 0").c_str());
  Require(eps_c <= eps_m && eps_m <= eps_l,
          (prefix + " weight ranges must be ordered").c_str());
  Require(eps_l == 1.0, (prefix + " liberal weight must be 1").c_str());
}

std::size_t GroupSize(double ratio, Index count) {
  // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
  return static_cast<std::size_t>(std::floor(ratio * count + 1e-9));
}

std::vector<double> AllocateGroup(Index count, double f_c, double f_m,
                                  double eps_c, double eps_m, double eps_l,
                                  std::uint64_t master_seed,
                                  StreamPurpose purpose) {
  std::vector<double> weights(static_cast<std::size_t>(count), eps_l);
  std::vector<Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  KeyedStream stream(master_seed, purpose);
  std::shuffle(order.begin(), order.end(), stream);
  const std::size_t n_c = GroupSize(f_c, count);
  const std::size_t n_m =
      std::min(GroupSize(f_m, count), order.size() - std::min(n_c, order.size()));
  std::uniform_real_distribution<double> conservative(eps_c, eps_m);
  std::uniform_real_distribution<double> moderate(eps_m, eps_l);
  for (std::size_t p = 0; p < n_c && p < order.size(); ++p) {
    weights[order[p]] = eps_c == eps_m ? eps_c : conservative(stream);
  }
  for (std::size_t p = n_c; p < n_c + n_m; ++p) {
    weights[order[p]] = eps_m == eps_l ? eps_m : moderate(stream);
  }
  return weights;
}

}  // namespace

void PrivacySpec::Validate() const {
  Require(epsilon > 0.0, "epsilon must be > 0");
  ValidateGroup(f_uc, f_um, eps_uc, eps_um, eps_ul, "user");
  ValidateGroup(f_ic, f_im, eps_ic, eps_im, eps_il, "item");
}

WeightAssignment AllocateWeights(const PrivacySpec& spec, Index n_users,
                                 Index n_items, std::uint64_t master_seed) {
  spec.Validate();
  return {AllocateGroup(n_users, spec.f_uc, spec.f_um, spec.eps_uc,
                        spec.eps_um, spec.eps_ul, master_seed,
                        StreamPurpose::kUserWeights),
          AllocateGroup(n_items, spec.f_ic, spec.f_im, spec.eps_ic,
                        spec.eps_im, spec.eps_il, master_seed,
                        StreamPurpose::kItemWeights)};
}

WeightAssignment UniformWeights(Index n_users, Index n_items) {
  return {std::vector<double>(static_cast<std::size_t>(n_users), 1.0),
          std::vector<double>(static_cast<std::size_t>(n_items), 1.0)};
}

double Weight(const WeightAssignment& weights, Index user, Index item) {
  if (user < 0 || static_cast<std::size_t>(user) >= weights.beta.size() ||
      item < 0 || static_cast<std::size_t>(item) >= weights.gamma.size()) {
    throw UsageError("weight index out of range");
  }
  return weights.Weight(user, item);
}

double PersonalizedBudget(double weight, double epsilon) {
  return weight * epsilon;
}

double Stretch(double rating, double weight) { return weight * rating; }

double LaplaceScale(int dim, double range, double epsilon) {
  return 2.0 * std::sqrt(static_cast<double>(dim)) * range / epsilon;
}

double SampleLaplace(double scale, KeyedStream& stream) {
  std::exponential_distribution<double> exp1(1.0);
  const double a = exp1(stream);
  const double b = exp1(stream);
  return scale * (a - b);
}

double LaplaceCdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale)
                 : 1.0 - 0.5 * std::exp(-x / scale);
}

double RescalePrediction(double raw, double weight, const RatingScale& scale,
                         bool clamp) {
  if (!(weight > 0.0)) {
    throw InvariantError("privacy weight must be positive to rescale");
  }
  const double value = raw / weight;
  return clamp ? std::clamp(value, scale.min, scale.max) : value;
}

namespace {

double ShareCoordinate(double exponential, double gaussian, int dim,
                       double range, double epsilon) {
  return 2.0 * range * std::sqrt(2.0 * dim * exponential) * gaussian / epsilon;
}

std::vector<double> DrawExponentials(std::uint64_t master_seed, Index item,
                                     int count) {
  KeyedStream stream(master_seed, StreamPurpose::kNoiseExponential,
                     static_cast<std::uint64_t>(item));
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> h(static_cast<std::size_t>(count));
  for (double& x : h) x = exp1(stream);
  return h;
}

std::vector<double> DrawGaussians(std::uint64_t master_seed, Index item,
                                  Index user, std::size_t n_raters,
                                  int count) {
  if (n_raters == 0) throw UsageError("item has no raters");
  KeyedStream stream(master_seed, StreamPurpose::kNoiseGaussian,
                     static_cast<std::uint64_t>(item),
                     static_cast<std::uint64_t>(user));
  std::normal_distribution<double> normal(
      0.0, 1.0 / std::sqrt(static_cast<double>(n_raters)));
  std::vector<double> c(static_cast<std::size_t>(count));
  for (double& x : c) x = normal(stream);
  return c;
}

}  // namespace

std::vector<double> DrawItemExponentials(std::uint64_t master_seed, Index item,
                                         int dim) {
  return DrawExponentials(master_seed, item, dim);
}

std::vector<double> DrawRaterGaussians(std::uint64_t master_seed, Index item,
                                       Index user, std::size_t n_raters,
                                       int dim) {
  return DrawGaussians(master_seed, item, user, n_raters, dim);
}

std::vector<double> ComposeNoiseShare(std::span<const double> exponentials,
                                      std::span<const double> gaussians,
                                      double range, double epsilon) {
  if (exponentials.size() != gaussians.size()) {
    throw UsageError("noise component length mismatch");
  }
  const int dim = static_cast<int>(exponentials.size());
  std::vector<double> share(exponentials.size());
  for (std::size_t k = 0; k < share.size(); ++k) {
    share[k] =
        ShareCoordinate(exponentials[k], gaussians[k], dim, range, epsilon);
  }
  return share;
}

NoisePlan::NoisePlan(int dim, double range, double epsilon, Index n_items,
                     std::size_t n_observations)
    : dim_(dim),
      range_(range),
      epsilon_(epsilon),
      n_observations_(n_observations),
      exponentials_(static_cast<std::size_t>(n_items) * dim, 0.0),
      gaussians_(n_observations * dim, 0.0),
      shares_(n_observations * dim, 0.0) {}

std::span<const double> NoisePlan::ItemExponentials(Index item) const {
  return std::span<const double>(exponentials_)
      .subspan(static_cast<std::size_t>(item) * dim_, dim_);
}

std::span<const double> NoisePlan::Gaussians(std::size_t observation) const {
  return std::span<const double>(gaussians_).subspan(observation * dim_, dim_);
}

std::span<const double> NoisePlan::Share(std::size_t observation) const {
  return std::span<const double>(shares_).subspan(observation * dim_, dim_);
}

void NoisePlan::SetItemExponentials(Index item, std::span<const double> h) {
  std::copy(h.begin(), h.end(),
            exponentials_.begin() + static_cast<std::ptrdiff_t>(item) * dim_);
}

void NoisePlan::SetShare(std::size_t observation,
                         std::span<const double> gaussians,
                         std::span<const double> share) {
  const auto offset = static_cast<std::ptrdiff_t>(observation * dim_);
  std::copy(gaussians.begin(), gaussians.end(), gaussians_.begin() + offset);
  std::copy(share.begin(), share.end(), shares_.begin() + offset);
}

std::vector<double> NoisePlan::Aggregate(Index item,
                                         const RatingIndex& index) const {
  std::vector<double> sum(static_cast<std::size_t>(dim_), 0.0);
  for (std::size_t p : index.ItemObservations(item)) {
    const auto x = Share(p);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += x[k];
  }
  return sum;
}

NoisePlan BuildNoisePlan(const RatingDataset& dataset, int dim, double range,
                         double epsilon, std::uint64_t master_seed,
                         ExecutionMode execution) {
  if (dim < 1 || !(range > 0.0) || !(epsilon > 0.0)) {
    throw UsageError("noise parameters must be positive");
  }
  const auto entries = dataset.entries();
  NoisePlan plan(dim, range, epsilon, dataset.n_items(), entries.size());
  const RatingIndex index(dataset.n_users(), dataset.n_items(), entries);
  auto build_item = [&](Index j) {
    const auto raters = index.ItemObservations(j);
    if (raters.empty()) return;
    const auto h = DrawExponentials(master_seed, j, dim);
    plan.SetItemExponentials(j, h);
    for (std::size_t p : raters) {
      const auto c =
          DrawGaussians(master_seed, j, entries[p].user, raters.size(), dim);
      plan.SetShare(p, c, ComposeNoiseShare(h, c, range, epsilon));
    }
  };
  const Index n_items = dataset.n_items();
  if (execution == ExecutionMode::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (Index j = 0; j < n_items; ++j) build_item(j);
  } else {
    for (Index j = 0; j < n_items; ++j) build_item(j);
  }
  return plan;
}

double NoiseCheckReport::variance_relative_error() const {
  return std::abs(variance - expected_variance) / expected_variance;
}

bool NoiseCheckReport::mean_ok() const {
  return std::abs(mean) <= mean_tolerance;
}

bool NoiseCheckReport::variance_ok() const {
  return variance_relative_error() <= variance_tolerance;
}

bool NoiseCheckReport::ks_ok() const { return ks_distance < ks_tolerance; }

NoiseCheckReport CheckNoiseComposition(int dim, double range, double epsilon,
                                       std::size_t n_raters,
                                       std::size_t n_samples,
                                       std::uint64_t master_seed) {
  if (dim < 1 || !(range > 0.0) || !(epsilon > 0.0) || n_raters == 0 ||
      n_samples < 2) {
    throw UsageError("check-noise parameters must be positive");
  }
  NoiseCheckReport report;
  report.dim = dim;
  report.range = range;
  report.epsilon = epsilon;
  report.n_raters = n_raters;
  report.n_samples = n_samples;
  report.scale = LaplaceScale(dim, range, epsilon);
  report.expected_variance = 2.0 * report.scale * report.scale;

  // Only coordinate 0 is examined; each stream yields it first, so drawing a
  // single value reproduces the plan's first coordinate exactly.
  std::vector<double> samples(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto item = static_cast<Index>(s);
    const auto h = DrawExponentials(master_seed, item, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_raters; ++i) {
      const auto c = DrawGaussians(master_seed, item, static_cast<Index>(i),
                                   n_raters, 1);
      sum += ShareCoordinate(h[0], c[0], dim, range, epsilon);
    }
    samples[s] = sum;
  }

  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n_samples);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  report.mean = mean;
  report.variance = ss / static_cast<double>(n_samples - 1);
  report.mean_tolerance = 3.0 * std::sqrt(report.expected_variance) /
                          std::sqrt(static_cast<double>(n_samples));

  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  const double n = static_cast<double>(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double f = LaplaceCdf(samples[s], report.scale);
    ks = std::max({ks, (static_cast<double>(s) + 1.0) / n - f,
                   f - static_cast<double>(s) / n});
  }
  report.ks_distance = ks;
  return report;
}

}  // namespace hdpmf
