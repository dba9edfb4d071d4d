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

#ifndef HDPMF_CORE_MODEL_H_
#define HDPMF_CORE_MODEL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hdpmf/rating_dataset.h"

namespace hdpmf {

// How the lambda term of the objective is distributed.
//   kPerEntity: lambda * (||U||_F^2 + ||V||_F^2).
//   kPerRating: lambda * sum_ij I_ij (||u_i||^2 + ||v_j||^2), so every
//               per-rating step carries the full 2*lambda shrinkage.
enum class RegularizationScheme { kPerEntity, kPerRating };

// kBatch aggregates all raters of an item into one step per epoch.
// kSequential applies each rater's term as it arrives, in index order.
enum class UpdateScheme { kSequential, kBatch };

// kReference runs every loop serially in index order. kParallel splits the
// independent per-item and per-user work across OpenMP threads; arithmetic
// within one entity is unchanged so results are bitwise identical.
enum class ExecutionMode { kReference, kParallel };

// Row-major rows x dim storage; row r is one latent vector.
class FactorMatrix {
 public:
  FactorMatrix() = default;
  FactorMatrix(Index rows, int dim);

  Index rows() const { return rows_; }
  int dim() const { return dim_; }

  std::span<double> row(Index r) {
    return {data_.data() + static_cast<std::size_t>(r) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> row(Index r) const {
    return {data_.data() + static_cast<std::size_t>(r) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool AllFinite() const;

  friend bool operator==(const FactorMatrix&, const FactorMatrix&) = default;

 private:
  Index rows_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

struct FactorModel {
  FactorMatrix users;  // u_i
  FactorMatrix items;  // v_j
  int dim = 0;
  double lambda = 0.0;
  RegularizationScheme regularization = RegularizationScheme::kPerEntity;
};

struct TrainConfig {
  int epochs = 100;
  double initial_learning_rate = 0.001;
  double lambda = 0.02;
  int dim = 10;
  std::uint64_t master_seed = 1;
  UpdateScheme update = UpdateScheme::kSequential;
  RegularizationScheme regularization = RegularizationScheme::kPerRating;
  ExecutionMode execution = ExecutionMode::kReference;

  // Throws UsageError.
  void Validate() const;
};

// A training rating as the optimizer sees it: target is the stretched rating
// W_ij * R_ij (or R_ij itself when nothing is stretched).
struct Observation {
  Index user = 0;
  Index item = 0;
  double target = 0.0;
};

struct RaterTerm {
  Index user = 0;
  double target = 0.0;
};

struct ItemTerm {
  Index item = 0;
  double target = 0.0;
};

// U and V i.i.d. uniform on [0, 1/sqrt(dim)], so ||u_i|| <= 1 from the start.
FactorModel InitModel(Index n_users, Index n_items, int dim,
                      std::uint64_t master_seed, double lambda = 0.0,
                      RegularizationScheme regularization =
                          RegularizationScheme::kPerEntity);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> a);

// u_i . v_j. Throws UsageError on a bad index.
double PredictRaw(const FactorModel& model, Index user, Index item);

// d/dv_j = 2 sum_i (u_i.v_j - t_ij) u_i + x_j + 2 lambda c v_j, where c is 1
// under kPerEntity and the rater count under kPerRating.
std::vector<double> ItemGradient(const FactorModel& model, Index item,
                                 std::span<const RaterTerm> raters,
                                 std::span<const double> noise);

// d/du_i = 2 sum_j (u_i.v_j - t_ij) v_j + 2 lambda c u_i.
std::vector<double> UserGradient(const FactorModel& model, Index user,
                                 std::span<const ItemTerm> items);

// eta0 for the first ceil(T/4) epochs, eta0/5 until ceil(3T/4), then eta0/25.
double LearningRate(int epoch, int total_epochs, double initial);

std::vector<double> ProjectUnitBall(std::span<const double> u);
void ProjectUnitBallInPlace(std::span<double> u);

// Value of the perturbed objective. `noise_shares` holds one dim-vector per
// observation (x_j^i), flattened, or is empty for a noiseless objective.
double PrivateObjective(const FactorModel& model,
                        std::span<const Observation> observations,
                        std::span<const double> noise_shares);

// --- Per-rating kernels shared by the centralized trainer and the devices.

// out = 2 (u.v - target) u + noise. This is exactly one device's message.
void ItemResidualTerm(std::span<const double> u, std::span<const double> v,
                      double target, std::span<const double> noise,
                      std::span<double> out);

// v <- v - eta (grad + shrink v). `grad` excludes regularization.
void ApplyItemStep(std::span<double> v, std::span<const double> grad,
                   double eta, double shrink);

// One local step for u against a single rated item, then projection.
void ApplyUserRatingStep(std::span<double> u, std::span<const double> v,
                         double target, double eta, double shrink);

// The `shrink` argument of the step kernels for an entity with `degree`
// ratings: 2*lambda scaled so that one epoch of steps sums to the objective's
// regularization gradient.
double ShrinkCoefficient(const FactorModel& model, std::size_t degree,
                         UpdateScheme update);

// A full user-phase update of u against its rated items, in the order given.
// With no terms only the per-entity shrink applies.
void UpdateUserVector(std::span<double> u, const FactorMatrix& items,
                      std::span<const ItemTerm> terms, double eta,
                      double shrink, UpdateScheme update,
                      RegularizationScheme regularization);

// --- Centralized reference trainer.

using EpochCallback = std::function<void(int epoch, const FactorModel&)>;

// One epoch: items 0..m-1 then users 0..n-1. Items without raters are skipped.
void TrainEpochCentralized(FactorModel& model,
                           std::span<const Observation> observations,
                           const RatingIndex& index,
                           std::span<const double> noise_shares, double eta,
                           UpdateScheme update, ExecutionMode execution);

// Full run from InitModel(config.master_seed). Throws DivergedError.
FactorModel TrainCentralized(Index n_users, Index n_items,
                             std::span<const Observation> observations,
                             std::span<const double> noise_shares,
                             const TrainConfig& config,
                             const EpochCallback& on_epoch = {});

}  // namespace hdpmf

#endif  // HDPMF_CORE_MODEL_H_
