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

#include "hdpmf/core_model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hdpmf/errors.h"
#include "hdpmf/random.h"

namespace hdpmf {

FactorMatrix::FactorMatrix(Index rows, int dim)
    : rows_(rows),
      dim_(dim),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(dim),
            0.0) {}

bool FactorMatrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (!(initial_learning_rate > 0.0)) {
    throw UsageError("initial learning rate must be > 0");
  }
  if (!(lambda >= 0.0)) throw UsageError("lambda must be >= 0");
  if (dim < 1) throw UsageError("dimension must be >= 1");
}

FactorModel InitModel(Index n_users, Index n_items, int dim,
                      std::uint64_t master_seed, double lambda,
                      RegularizationScheme regularization) {
  if (n_users < 1 || n_items < 1 || dim < 1) {
    throw UsageError("model dimensions must be positive");
  }
  FactorModel model{FactorMatrix(n_users, dim), FactorMatrix(n_items, dim),
                    dim, lambda, regularization};
  std::uniform_real_distribution<double> init(0.0, 1.0 / std::sqrt(dim));
  KeyedStream user_stream(master_seed, StreamPurpose::kInit, 0);
  for (double& x : model.users.data()) x = init(user_stream);
  KeyedStream item_stream(master_seed, StreamPurpose::kInit, 1);
  for (double& x : model.items.data()) x = init(item_stream);
  return model;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

namespace {

void CheckUser(const FactorModel& model, Index i) {
  if (i < 0 || i >= model.users.rows()) {
    throw UsageError("user index " + std::to_string(i) + " out of range");
  }
}

void CheckItem(const FactorModel& model, Index j) {
  if (j < 0 || j >= model.items.rows()) {
    throw UsageError("item index " + std::to_string(j) + " out of range");
  }
}

double RegularizationWeight(const FactorModel& model, std::size_t degree) {
  return model.regularization == RegularizationScheme::kPerRating
             ? static_cast<double>(degree)
             : 1.0;
}

}  // namespace

double PredictRaw(const FactorModel& model, Index user, Index item) {
  CheckUser(model, user);
  CheckItem(model, item);
  return Dot(model.users.row(user), model.items.row(item));
}

std::vector<double> ItemGradient(const FactorModel& model, Index item,
                                 std::span<const RaterTerm> raters,
                                 std::span<const double> noise) {
  CheckItem(model, item);
  const auto dim = static_cast<std::size_t>(model.dim);
  if (noise.size() != dim) throw UsageError("noise vector length != K");
  const auto v = model.items.row(item);
  std::vector<double> grad(dim, 0.0);
  for (const RaterTerm& r : raters) {
    CheckUser(model, r.user);
    const auto u = model.users.row(r.user);
    const double residual = Dot(u, v) - r.target;
    for (std::size_t k = 0; k < dim; ++k) grad[k] += residual * u[k];
  }
  const double shrink =
      2.0 * model.lambda * RegularizationWeight(model, raters.size());
  for (std::size_t k = 0; k < dim; ++k) {
    grad[k] = 2.0 * grad[k] + noise[k] + shrink * v[k];
  }
  return grad;
}

std::vector<double> UserGradient(const FactorModel& model, Index user,
                                 std::span<const ItemTerm> items) {
  CheckUser(model, user);
  const auto dim = static_cast<std::size_t>(model.dim);
  const auto u = model.users.row(user);
  std::vector<double> grad(dim, 0.0);
  for (const ItemTerm& t : items) {
    CheckItem(model, t.item);
    const auto v = model.items.row(t.item);
    const double residual = Dot(u, v) - t.target;
    for (std::size_t k = 0; k < dim; ++k) grad[k] += residual * v[k];
  }
  const double shrink =
      2.0 * model.lambda * RegularizationWeight(model, items.size());
  for (std::size_t k = 0; k < dim; ++k) {
    grad[k] = 2.0 * grad[k] + shrink * u[k];
  }
  return grad;
}

double LearningRate(int epoch, int total_epochs, double initial) {
  const int first_drop = (total_epochs + 3) / 4;
  const int second_drop = (3 * total_epochs + 3) / 4;
  if (epoch < first_drop) return initial;
  if (epoch < second_drop) return initial / 5.0;
  return initial / 25.0;
}

std::vector<double> ProjectUnitBall(std::span<const double> u) {
  std::vector<double> out(u.begin(), u.end());
  ProjectUnitBallInPlace(out);
  return out;
}

void ProjectUnitBallInPlace(std::span<double> u) {
  const double norm = Norm(u);
  if (norm > 1.0) {
    for (double& x : u) x /= norm;
  }
}

double PrivateObjective(const FactorModel& model,
                        std::span<const Observation> observations,
                        std::span<const double> noise_shares) {
  const auto dim = static_cast<std::size_t>(model.dim);
  if (!noise_shares.empty() && noise_shares.size() != observations.size() * dim) {
    throw UsageError("noise shares do not cover every observation");
  }
  double loss = 0.0;
  for (std::size_t p = 0; p < observations.size(); ++p) {
    const Observation& o = observations[p];
    const auto u = model.users.row(o.user);
    const auto v = model.items.row(o.item);
    const double residual = o.target - Dot(u, v);
    loss += residual * residual;
    if (!noise_shares.empty()) {
      loss += Dot(v, noise_shares.subspan(p * dim, dim));
    }
    if (model.regularization == RegularizationScheme::kPerRating) {
      loss += model.lambda * (Dot(u, u) + Dot(v, v));
    }
  }
  if (model.regularization == RegularizationScheme::kPerEntity) {
    loss += model.lambda *
            (Dot(model.users.data(), model.users.data()) +
             Dot(model.items.data(), model.items.data()));
  }
  return loss;
}

void ItemResidualTerm(std::span<const double> u, std::span<const double> v,
                      double target, std::span<const double> noise,
                      std::span<double> out) {
  const double residual = Dot(u, v) - target;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = 2.0 * residual * u[k] + (noise.empty() ? 0.0 : noise[k]);
  }
}

void ApplyItemStep(std::span<double> v, std::span<const double> grad,
                   double eta, double shrink) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] -= eta * (grad[k] + shrink * v[k]);
  }
}

void ApplyUserRatingStep(std::span<double> u, std::span<const double> v,
                         double target, double eta, double shrink) {
  const double residual = Dot(u, v) - target;
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] -= eta * (2.0 * residual * v[k] + shrink * u[k]);
  }
  ProjectUnitBallInPlace(u);
}

double ShrinkCoefficient(const FactorModel& model, std::size_t degree,
                         UpdateScheme update) {
  const double two_lambda = 2.0 * model.lambda;
  const bool per_rating =
      model.regularization == RegularizationScheme::kPerRating;
  if (update == UpdateScheme::kBatch) {
    return per_rating ? two_lambda * static_cast<double>(degree) : two_lambda;
  }
  if (per_rating || degree == 0) return two_lambda;
  return two_lambda / static_cast<double>(degree);
}

void UpdateUserVector(std::span<double> u, const FactorMatrix& items,
                      std::span<const ItemTerm> terms, double eta,
                      double shrink, UpdateScheme update,
                      RegularizationScheme regularization) {
  if (terms.empty()) {
    if (regularization == RegularizationScheme::kPerEntity) {
      for (double& x : u) x -= eta * (shrink * x);
      ProjectUnitBallInPlace(u);
    }
    return;
  }
  if (update == UpdateScheme::kSequential) {
    for (const ItemTerm& t : terms) {
      ApplyUserRatingStep(u, items.row(t.item), t.target, eta, shrink);
    }
    return;
  }
  std::vector<double> sum(u.size(), 0.0);
  for (const ItemTerm& t : terms) {
    const auto v = items.row(t.item);
    const double residual = Dot(u, v) - t.target;
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += 2.0 * residual * v[k];
    }
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] -= eta * (sum[k] + shrink * u[k]);
  }
  ProjectUnitBallInPlace(u);
}

namespace {

void UpdateItemCentralized(FactorModel& model,
                           std::span<const Observation> observations,
                           const RatingIndex& index,
                           std::span<const double> noise_shares, Index j,
                           double eta, UpdateScheme update) {
  const auto obs = index.ItemObservations(j);
  if (obs.empty()) return;
  const auto dim = static_cast<std::size_t>(model.dim);
  const double shrink = ShrinkCoefficient(model, obs.size(), update);
  auto v = model.items.row(j);
  std::vector<double> term(dim);
  auto noise_for = [&](std::size_t p) {
    return noise_shares.empty() ? std::span<const double>()
                                : noise_shares.subspan(p * dim, dim);
  };
  if (update == UpdateScheme::kSequential) {
    for (std::size_t p : obs) {
      const Observation& o = observations[p];
      ItemResidualTerm(model.users.row(o.user), v, o.target, noise_for(p),
                       term);
      ApplyItemStep(v, term, eta, shrink);
    }
    return;
  }
  std::vector<double> sum(dim, 0.0);
  for (std::size_t p : obs) {
    const Observation& o = observations[p];
    ItemResidualTerm(model.users.row(o.user), v, o.target, noise_for(p), term);
    for (std::size_t k = 0; k < dim; ++k) sum[k] += term[k];
  }
  ApplyItemStep(v, sum, eta, shrink);
}

void UpdateUserCentralized(FactorModel& model,
                           std::span<const Observation> observations,
                           const RatingIndex& index, Index i, double eta,
                           UpdateScheme update) {
  const auto obs = index.UserObservations(i);
  std::vector<ItemTerm> terms;
  terms.reserve(obs.size());
  for (std::size_t p : obs) {
    terms.push_back({observations[p].item, observations[p].target});
  }
  UpdateUserVector(model.users.row(i), model.items, terms, eta,
                   ShrinkCoefficient(model, obs.size(), update), update,
                   model.regularization);
}

}  // namespace

void TrainEpochCentralized(FactorModel& model,
                           std::span<const Observation> observations,
                           const RatingIndex& index,
                           std::span<const double> noise_shares, double eta,
                           UpdateScheme update, ExecutionMode execution) {
  const Index n_items = model.items.rows();
  const Index n_users = model.users.rows();
  if (execution == ExecutionMode::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (Index j = 0; j < n_items; ++j) {
      UpdateItemCentralized(model, observations, index, noise_shares, j, eta,
                            update);
    }
#pragma omp parallel for schedule(dynamic, 16)
    for (Index i = 0; i < n_users; ++i) {
      UpdateUserCentralized(model, observations, index, i, eta, update);
    }
    return;
  }
  for (Index j = 0; j < n_items; ++j) {
    UpdateItemCentralized(model, observations, index, noise_shares, j, eta,
                          update);
  }
  for (Index i = 0; i < n_users; ++i) {
    UpdateUserCentralized(model, observations, index, i, eta, update);
  }
}

FactorModel TrainCentralized(Index n_users, Index n_items,
                             std::span<const Observation> observations,
                             std::span<const double> noise_shares,
                             const TrainConfig& config,
                             const EpochCallback& on_epoch) {
  config.Validate();
  FactorModel model = InitModel(n_users, n_items, config.dim,
                                config.master_seed, config.lambda,
                                config.regularization);
  std::vector<Rating> as_ratings;
  as_ratings.reserve(observations.size());
  for (const Observation& o : observations) {
    as_ratings.push_back({o.user, o.item, o.target});
  }
  const RatingIndex index(n_users, n_items, as_ratings);
  for (int t = 0; t < config.epochs; ++t) {
    const double eta =
        LearningRate(t, config.epochs, config.initial_learning_rate);
    TrainEpochCentralized(model, observations, index, noise_shares, eta,
                          config.update, config.execution);
    if (!model.items.AllFinite() || !model.users.AllFinite()) {
      throw DivergedError(t);
    }
    if (on_epoch) on_epoch(t, model);
  }
  return model;
}

}  // namespace hdpmf
