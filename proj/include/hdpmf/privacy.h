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

#ifndef HDPMF_PRIVACY_H_
#define HDPMF_PRIVACY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hdpmf/core_model.h"
#include "hdpmf/random.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {

// Three-group privacy preferences for users and items. Conservative weights
// are drawn from [eps_*c, eps_*m), moderate from [eps_*m, eps_*l), liberal
// weights are fixed at eps_*l = 1.
struct PrivacySpec {
  double epsilon = 1.0;

  double f_uc = 0.54;
  double f_um = 0.37;
  double eps_uc = 0.1;
  double eps_um = 0.5;
  double eps_ul = 1.0;

  double f_ic = 0.33;
  double f_im = 0.33;
  double eps_ic = 0.1;
  double eps_im = 0.5;
  double eps_il = 1.0;

  // Throws UsageError naming the offending field.
  void Validate() const;
};

// W = beta^T gamma. Every beta_i and gamma_j lies in (0, 1].
struct WeightAssignment {
  std::vector<double> beta;
  std::vector<double> gamma;

  double Weight(Index user, Index item) const {
    return beta[static_cast<std::size_t>(user)] *
           gamma[static_cast<std::size_t>(item)];
  }
};

// Group sizes are floor(ratio * count); the remainder is liberal. Membership
// follows a seeded permutation.
WeightAssignment AllocateWeights(const PrivacySpec& spec, Index n_users,
                                 Index n_items, std::uint64_t master_seed);

// All-ones assignment (every rating gets the full budget).
WeightAssignment UniformWeights(Index n_users, Index n_items);

double Weight(const WeightAssignment& weights, Index user, Index item);
double PersonalizedBudget(double weight, double epsilon);
double Stretch(double rating, double weight);

// Per-coordinate Laplace scale of the aggregated item noise: 2 sqrt(K) D / eps.
double LaplaceScale(int dim, double range, double epsilon);

// One Laplace(0, b) draw.
double SampleLaplace(double scale, KeyedStream& stream);
double LaplaceCdf(double x, double scale);

// raw / W, clamped to the scale when `clamp` is set. Throws InvariantError
// for W <= 0.
double RescalePrediction(double raw, double weight, const RatingScale& scale,
                         bool clamp = true);

// Noise shares are built from three pieces:
//   h_j   K unit-exponential draws, one vector per rated item (recommender);
//   c_j^i K draws of N(0, 1/|R_j|) per rater (device);
//   x_j^i = (2 D / eps) sqrt(2 K h_j) (.) c_j^i.
// Summed over the raters of j, each coordinate is Laplace(2 sqrt(K) D / eps).
std::vector<double> DrawItemExponentials(std::uint64_t master_seed, Index item,
                                         int dim);
std::vector<double> DrawRaterGaussians(std::uint64_t master_seed, Index item,
                                       Index user, std::size_t n_raters,
                                       int dim);
std::vector<double> ComposeNoiseShare(std::span<const double> exponentials,
                                      std::span<const double> gaussians,
                                      double range, double epsilon);

// Objective-perturbation noise for one training run, sampled once. Shares
// are stored per observation, in the observation order given at build time.
class NoisePlan {
 public:
  NoisePlan() = default;
  NoisePlan(int dim, double range, double epsilon, Index n_items,
            std::size_t n_observations);

  int dim() const { return dim_; }
  double range() const { return range_; }
  double epsilon() const { return epsilon_; }
  std::size_t size() const { return n_observations_; }
  bool empty() const { return shares_.empty(); }

  // h_j; all zeros for items nobody rated.
  std::span<const double> ItemExponentials(Index item) const;
  std::span<const double> Gaussians(std::size_t observation) const;
  std::span<const double> Share(std::size_t observation) const;
  std::span<const double> shares() const { return shares_; }

  void SetItemExponentials(Index item, std::span<const double> h);
  void SetShare(std::size_t observation, std::span<const double> gaussians,
                std::span<const double> share);

  // x_j = sum of the shares of j's raters, in ascending rater order.
  std::vector<double> Aggregate(Index item, const RatingIndex& index) const;

  friend bool operator==(const NoisePlan&, const NoisePlan&) = default;

 private:
  int dim_ = 0;
  double range_ = 0.0;
  double epsilon_ = 0.0;
  std::size_t n_observations_ = 0;
  std::vector<double> exponentials_;
  std::vector<double> gaussians_;
  std::vector<double> shares_;
};

NoisePlan BuildNoisePlan(const RatingDataset& dataset, int dim, double range,
                         double epsilon, std::uint64_t master_seed,
                         ExecutionMode execution = ExecutionMode::kReference);

struct NoiseCheckReport {
  int dim = 0;
  double range = 0.0;
  double epsilon = 0.0;
  std::size_t n_raters = 0;
  std::size_t n_samples = 0;
  double scale = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double expected_variance = 0.0;
  double ks_distance = 0.0;
  double mean_tolerance = 0.0;
  double variance_tolerance = 0.01;
  double ks_tolerance = 0.002;

  double variance_relative_error() const;
  bool mean_ok() const;
  bool variance_ok() const;
  bool ks_ok() const;
  bool passed() const { return mean_ok() && variance_ok() && ks_ok(); }
};

// Monte-Carlo check of the composed noise. Sample s plays the role of item s
// with `n_raters` raters and uses the same streams as BuildNoisePlan; the
// first coordinate of each aggregate is compared with Laplace(b).
NoiseCheckReport CheckNoiseComposition(int dim, double range, double epsilon,
                                       std::size_t n_raters,
                                       std::size_t n_samples,
                                       std::uint64_t master_seed);

}  // namespace hdpmf

#endif  // HDPMF_PRIVACY_H_
