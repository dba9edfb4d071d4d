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

#include "hdpmf/protocol.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hdpmf/errors.h"

namespace hdpmf {

UserDevice::UserDevice(Index user, std::vector<PrivateRating> ratings,
                       std::span<const double> initial_vector)
    : user_(user),
      ratings_(std::move(ratings)),
      latent_(initial_vector.begin(), initial_vector.end()) {
  std::sort(ratings_.begin(), ratings_.end(),
            [](const PrivateRating& a, const PrivateRating& b) {
              return a.item < b.item;
            });
  for (std::size_t s = 1; s < ratings_.size(); ++s) {
    if (ratings_[s].item == ratings_[s - 1].item) {
      throw UsageError("device holds two ratings for one item");
    }
  }
}

std::size_t UserDevice::Slot(Index item) const {
  const auto it = std::lower_bound(
      ratings_.begin(), ratings_.end(), item,
      [](const PrivateRating& r, Index j) { return r.item < j; });
  if (it == ratings_.end() || it->item != item) {
    throw ProtocolError("device " + std::to_string(user_) +
                        " did not rate item " + std::to_string(item));
  }
  return static_cast<std::size_t>(it - ratings_.begin());
}

bool UserDevice::Rated(Index item) const {
  return std::binary_search(
      ratings_.begin(), ratings_.end(), PrivateRating{item},
      [](const PrivateRating& a, const PrivateRating& b) {
        return a.item < b.item;
      });
}

std::vector<RaterRegistration> UserDevice::Registrations() const {
  std::vector<RaterRegistration> out;
  out.reserve(ratings_.size());
  for (const PrivateRating& r : ratings_) out.push_back({user_, r.item});
  return out;
}

void UserDevice::ReceiveNoise(Index item, std::span<const double> exponentials,
                              std::size_t n_raters, double range,
                              double epsilon, std::uint64_t master_seed) {
  const std::size_t slot = Slot(item);
  const std::size_t dim = latent_.size();
  if (exponentials.size() != dim) {
    throw ProtocolError("noise broadcast has the wrong length");
  }
  if (shares_.empty()) {
    shares_.assign(ratings_.size() * dim, 0.0);
    gaussians_.assign(ratings_.size() * dim, 0.0);
  }
  const auto c = DrawRaterGaussians(master_seed, item, user_, n_raters,
                                    static_cast<int>(dim));
  const auto x = ComposeNoiseShare(exponentials, c, range, epsilon);
  std::copy(c.begin(), c.end(), gaussians_.begin() + slot * dim);
  std::copy(x.begin(), x.end(), shares_.begin() + slot * dim);
}

std::span<const double> UserDevice::gaussians(Index item) const {
  if (gaussians_.empty()) return {};
  return std::span<const double>(gaussians_)
      .subspan(Slot(item) * latent_.size(), latent_.size());
}

std::span<const double> UserDevice::noise_share(Index item) const {
  if (shares_.empty()) return {};
  return std::span<const double>(shares_)
      .subspan(Slot(item) * latent_.size(), latent_.size());
}

GradientMessage UserDevice::EmitGradient(
    Index item, std::span<const double> item_vector) const {
  const std::size_t slot = Slot(item);
  if (item_vector.size() != latent_.size()) {
    throw ProtocolError("item vector has the wrong length");
  }
  const PrivateRating& r = ratings_[slot];
  GradientMessage message{item, user_, std::vector<double>(latent_.size())};
  ItemResidualTerm(latent_, item_vector, Stretch(r.value, r.weight),
                   noise_share(item), message.payload);
  return message;
}

void UserDevice::UpdateUser(const FactorMatrix& item_snapshot, double eta,
                            double shrink, UpdateScheme update,
                            RegularizationScheme regularization) {
  std::vector<ItemTerm> terms;
  terms.reserve(ratings_.size());
  for (const PrivateRating& r : ratings_) {
    terms.push_back({r.item, Stretch(r.value, r.weight)});
  }
  UpdateUserVector(latent_, item_snapshot, terms, eta, shrink, update,
                   regularization);
}

Recommender::Recommender(FactorMatrix items, double lambda,
                         RegularizationScheme regularization)
    : items_(std::move(items)),
      lambda_(lambda),
      regularization_(regularization),
      raters_(static_cast<std::size_t>(items_.rows())) {}

void Recommender::Register(const RaterRegistration& message) {
  if (closed_) throw ProtocolError("registration is closed");
  if (message.item < 0 || message.item >= items_.rows()) {
    throw ProtocolError("registration for unknown item " +
                        std::to_string(message.item));
  }
  raters_[static_cast<std::size_t>(message.item)].push_back(message.user);
}

void Recommender::CloseRegistration() {
  for (auto& list : raters_) {
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw ProtocolError("duplicate rater registration");
    }
  }
  closed_ = true;
}

std::span<const Index> Recommender::Raters(Index item) const {
  return raters_.at(static_cast<std::size_t>(item));
}

FactorModel Recommender::ModelShell() const {
  return {FactorMatrix(), items_, items_.dim(), lambda_, regularization_};
}

std::vector<double> Recommender::DrawNoiseExponentials(
    Index item, int dim, std::uint64_t master_seed) const {
  if (Raters(item).empty()) throw ProtocolError("item has no raters");
  return DrawItemExponentials(master_seed, item, dim);
}

double Recommender::Shrink(Index item, UpdateScheme update) const {
  FactorModel shell;
  shell.lambda = lambda_;
  shell.regularization = regularization_;
  return ShrinkCoefficient(shell, Raters(item).size(), update);
}

void Recommender::UpdateItem(Index item,
                             std::span<const GradientMessage> messages,
                             double eta) {
  const auto raters = Raters(item);
  const auto dim = static_cast<std::size_t>(items_.dim());
  std::vector<const GradientMessage*> by_rater(raters.size(), nullptr);
  for (const GradientMessage& m : messages) {
    if (m.item != item) throw ProtocolError("message for a different item");
    if (m.payload.size() != dim) throw ProtocolError("payload length != K");
    const auto it = std::lower_bound(raters.begin(), raters.end(), m.sender);
    if (it == raters.end() || *it != m.sender) {
      throw ProtocolError("message from unregistered device " +
                          std::to_string(m.sender));
    }
    auto& slot = by_rater[static_cast<std::size_t>(it - raters.begin())];
    if (slot != nullptr) {
      throw ProtocolError("duplicate message from device " +
                          std::to_string(m.sender));
    }
    slot = &m;
  }
  std::vector<double> sum(dim, 0.0);
  for (std::size_t r = 0; r < by_rater.size(); ++r) {
    if (by_rater[r] == nullptr) {
      throw ProtocolError("missing message from device " +
                          std::to_string(raters[r]));
    }
    for (std::size_t k = 0; k < dim; ++k) sum[k] += by_rater[r]->payload[k];
  }
  ApplyItemStep(items_.row(item), sum, eta, Shrink(item, UpdateScheme::kBatch));
}

void Recommender::ApplyMessage(Index item, const GradientMessage& message,
                               double eta) {
  const auto raters = Raters(item);
  if (message.item != item) {
    throw ProtocolError("message for a different item");
  }
  if (message.payload.size() != static_cast<std::size_t>(items_.dim())) {
    throw ProtocolError("payload length != K");
  }
  if (!std::binary_search(raters.begin(), raters.end(), message.sender)) {
    throw ProtocolError("message from unregistered device " +
                        std::to_string(message.sender));
  }
  ApplyItemStep(items_.row(item), message.payload, eta,
                Shrink(item, UpdateScheme::kSequential));
}

namespace {

double StepNorm(std::span<const double> before, std::span<const double> after,
                double eta) {
  double ss = 0.0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    const double d = before[k] - after[k];
    ss += d * d;
  }
  return std::sqrt(ss) / eta;
}

class Simulation {
 public:
  Simulation(const RatingDataset& train, const WeightAssignment* weights,
             std::optional<double> noise_epsilon, const TrainConfig& config,
             const ProtocolOptions& options)
      : train_(train),
        config_(config),
        options_(options),
        parallel_(config.execution == ExecutionMode::kParallel),
        recommender_(FactorMatrix(), config.lambda, config.regularization) {
    const FactorModel init =
        InitModel(train.n_users(), train.n_items(), config.dim,
                  config.master_seed, config.lambda, config.regularization);
    recommender_ = Recommender(init.items, config.lambda,
                               config.regularization);
    const auto entries = train.entries();
    const RatingIndex index(train.n_users(), train.n_items(), entries);
    devices_.reserve(static_cast<std::size_t>(train.n_users()));
    for (Index i = 0; i < train.n_users(); ++i) {
      std::vector<PrivateRating> ratings;
      for (std::size_t p : index.UserObservations(i)) {
        const Rating& r = entries[p];
        ratings.push_back(
            {r.item, r.value, weights ? weights->Weight(i, r.item) : 1.0, p});
      }
      devices_.emplace_back(i, std::move(ratings), init.users.row(i));
    }
    for (const UserDevice& d : devices_) {
      for (const RaterRegistration& m : d.Registrations()) {
        if (options_.observer) options_.observer->OnRegistration(m);
        recommender_.Register(m);
      }
    }
    recommender_.CloseRegistration();
    if (noise_epsilon) DistributeNoise(*noise_epsilon);
  }

  ProtocolResult Run() {
    for (int t = 0; t < config_.epochs; ++t) {
      const double eta =
          LearningRate(t, config_.epochs, config_.initial_learning_rate);
      ItemPhase(t, eta);
      UserPhase(t, eta);
      if (!recommender_.items().AllFinite() || !DevicesFinite()) {
        throw DivergedError(t);
      }
      if (options_.on_epoch) options_.on_epoch(t, Assemble());
    }
    return {Assemble(), std::move(plan_)};
  }

 private:
  template <typename F>
  void Notify(F&& hook) {
    if (options_.observer == nullptr) return;
    if (parallel_) {
#pragma omp critical(hdpmf_channel)
      hook(*options_.observer);
    } else {
      hook(*options_.observer);
    }
  }

  void DistributeNoise(double epsilon) {
    const double range = train_.scale().range();
    plan_ = NoisePlan(config_.dim, range, epsilon, train_.n_items(),
                      train_.size());
    for (Index j = 0; j < train_.n_items(); ++j) {
      const auto raters = recommender_.Raters(j);
      if (raters.empty()) continue;
      const auto h =
          recommender_.DrawNoiseExponentials(j, config_.dim, config_.master_seed);
      plan_.SetItemExponentials(j, h);
      for (Index i : raters) {
        if (options_.observer) options_.observer->OnNoiseBroadcast(j, i, h);
        UserDevice& d = devices_[static_cast<std::size_t>(i)];
        d.ReceiveNoise(j, h, raters.size(), range, epsilon,
                       config_.master_seed);
        const std::size_t slot = static_cast<std::size_t>(
            std::find_if(d.ratings().begin(), d.ratings().end(),
                         [j](const PrivateRating& r) { return r.item == j; }) -
            d.ratings().begin());
        plan_.SetShare(d.ratings()[slot].observation, d.gaussians(j),
                       d.noise_share(j));
      }
    }
  }

  void UpdateOneItem(Index j, double eta, std::vector<double>& norms) {
    const auto raters = recommender_.Raters(j);
    if (raters.empty()) return;
    const auto current = recommender_.items().row(j);
    std::vector<double> before;
    if (options_.trace) before.assign(current.begin(), current.end());
    if (config_.update == UpdateScheme::kSequential) {
      for (Index i : raters) {
        const auto v = recommender_.items().row(j);
        Notify([&](ChannelObserver& o) { o.OnItemBroadcast(j, i, v); });
        const GradientMessage m =
            devices_[static_cast<std::size_t>(i)].EmitGradient(j, v);
        Notify([&](ChannelObserver& o) { o.OnGradient(m); });
        recommender_.ApplyMessage(j, m, eta);
      }
    } else {
      std::vector<GradientMessage> messages;
      messages.reserve(raters.size());
      for (Index i : raters) {
        const auto v = recommender_.items().row(j);
        Notify([&](ChannelObserver& o) { o.OnItemBroadcast(j, i, v); });
        messages.push_back(
            devices_[static_cast<std::size_t>(i)].EmitGradient(j, v));
        Notify([&](ChannelObserver& o) { o.OnGradient(messages.back()); });
      }
      recommender_.UpdateItem(j, messages, eta);
    }
    if (options_.trace) {
      norms[static_cast<std::size_t>(j)] =
          StepNorm(before, recommender_.items().row(j), eta);
    }
  }

  void UpdateOneUser(Index i, double eta, std::vector<double>& norms) {
    UserDevice& d = devices_[static_cast<std::size_t>(i)];
    const FactorMatrix& snapshot = recommender_.items();
    for (const PrivateRating& r : d.ratings()) {
      Notify([&](ChannelObserver& o) {
        o.OnItemBroadcast(r.item, i, snapshot.row(r.item));
      });
    }
    std::vector<double> before;
    if (options_.trace) before.assign(d.latent().begin(), d.latent().end());
    FactorModel shell;
    shell.lambda = config_.lambda;
    shell.regularization = config_.regularization;
    d.UpdateUser(snapshot, eta,
                 ShrinkCoefficient(shell, d.degree(), config_.update),
                 config_.update, config_.regularization);
    if (options_.trace) {
      norms[static_cast<std::size_t>(i)] = StepNorm(before, d.latent(), eta);
    }
  }

  void ItemPhase(int epoch, double eta) {
    const Index m = train_.n_items();
    std::vector<double> norms(options_.trace ? m : 0, 0.0);
    if (parallel_) {
#pragma omp parallel for schedule(dynamic, 16)
      for (Index j = 0; j < m; ++j) UpdateOneItem(j, eta, norms);
    } else {
      for (Index j = 0; j < m; ++j) UpdateOneItem(j, eta, norms);
    }
    if (options_.trace) {
      for (Index j = 0; j < m; ++j) {
        const auto n = recommender_.Raters(j).size();
        if (n == 0) continue;
        *options_.trace << epoch << "\titem\t" << j << '\t' << n << '\t'
                        << norms[static_cast<std::size_t>(j)] << '\n';
      }
    }
  }

  void UserPhase(int epoch, double eta) {
    const Index n = train_.n_users();
    std::vector<double> norms(options_.trace ? n : 0, 0.0);
    if (parallel_) {
#pragma omp parallel for schedule(dynamic, 16)
      for (Index i = 0; i < n; ++i) UpdateOneUser(i, eta, norms);
    } else {
      for (Index i = 0; i < n; ++i) UpdateOneUser(i, eta, norms);
    }
    if (options_.trace) {
      for (Index i = 0; i < n; ++i) {
        *options_.trace << epoch << "\tuser\t" << i << "\t0\t"
                        << norms[static_cast<std::size_t>(i)] << '\n';
      }
    }
  }

  bool DevicesFinite() const {
    for (const UserDevice& d : devices_) {
      for (double x : d.latent()) {
        if (!std::isfinite(x)) return false;
      }
    }
    return true;
  }

  FactorModel Assemble() const {
    FactorModel model = recommender_.ModelShell();
    model.users = FactorMatrix(train_.n_users(), config_.dim);
    for (const UserDevice& d : devices_) {
      std::copy(d.latent().begin(), d.latent().end(),
                model.users.row(d.user()).begin());
    }
    return model;
  }

  const RatingDataset& train_;
  const TrainConfig& config_;
  const ProtocolOptions& options_;
  bool parallel_;
  Recommender recommender_;
  std::vector<UserDevice> devices_;
  NoisePlan plan_;
};

}  // namespace

ProtocolResult RunProtocol(const RatingDataset& train,
                           const WeightAssignment* weights,
                           std::optional<double> noise_epsilon,
                           const TrainConfig& config,
                           const ProtocolOptions& options) {
  config.Validate();
  if (train.empty()) throw UsageError("training set is empty");
  if (weights != nullptr &&
      (weights->beta.size() != static_cast<std::size_t>(train.n_users()) ||
       weights->gamma.size() != static_cast<std::size_t>(train.n_items()))) {
    throw UsageError("weights do not cover every user and item");
  }
  if (noise_epsilon && !(*noise_epsilon > 0.0)) {
    throw UsageError("noise epsilon must be > 0");
  }
  Simulation sim(train, weights, noise_epsilon, config, options);
  return sim.Run();
}

ProtocolResult RunHdpmf(const RatingDataset& train,
                        const WeightAssignment& weights, double epsilon,
                        const TrainConfig& config,
                        const ProtocolOptions& options) {
  return RunProtocol(train, &weights, epsilon, config, options);
}

std::vector<double> PredictAll(const FactorModel& model,
                               const WeightAssignment* weights,
                               std::span<const Rating> pairs,
                               const RatingScale& scale, bool rescale,
                               bool clamp) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const Rating& p : pairs) {
    const double raw = PredictRaw(model, p.user, p.item);
    if (rescale && weights != nullptr) {
      out.push_back(RescalePrediction(raw, Weight(*weights, p.user, p.item),
                                      scale, clamp));
    } else {
      out.push_back(clamp ? std::clamp(raw, scale.min, scale.max) : raw);
    }
  }
  return out;
}

}  // namespace hdpmf
