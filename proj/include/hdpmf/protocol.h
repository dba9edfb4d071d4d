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

#ifndef HDPMF_PROTOCOL_H_
#define HDPMF_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hdpmf/core_model.h"
#include "hdpmf/privacy.h"
#include "hdpmf/rating_dataset.h"

namespace hdpmf {

// Device -> recommender. The only value-carrying message a device sends.
struct GradientMessage {
  Index item = 0;
  Index sender = 0;
  std::vector<double> payload;
};

// Device -> recommender, once at start: "I rated this item". No value.
struct RaterRegistration {
  Index user = 0;
  Index item = 0;
};

// Tap on the simulated channel. Every message between the two parties goes
// through exactly one of these hooks; devices have no channel to each other.
class ChannelObserver {
 public:
  virtual ~ChannelObserver() = default;

  virtual void OnRegistration(const RaterRegistration& /*message*/) {}
  virtual void OnGradient(const GradientMessage& /*message*/) {}
  // Recommender -> device.
  virtual void OnNoiseBroadcast(Index /*item*/, Index /*recipient*/,
                                std::span<const double> /*exponentials*/) {}
  virtual void OnItemBroadcast(Index /*item*/, Index /*recipient*/,
                               std::span<const double> /*item_vector*/) {}
};

// What a device knows about one of its own ratings.
struct PrivateRating {
  Index item = 0;
  double value = 0.0;
  double weight = 1.0;
  std::size_t observation = 0;  // position in the training set
};

class UserDevice {
 public:
  UserDevice(Index user, std::vector<PrivateRating> ratings,
             std::span<const double> initial_vector);

  Index user() const { return user_; }
  std::size_t degree() const { return ratings_.size(); }
  bool Rated(Index item) const;

  std::vector<RaterRegistration> Registrations() const;

  // Builds x_j^i from the broadcast h_j and this device's own Gaussian draw.
  void ReceiveNoise(Index item, std::span<const double> exponentials,
                    std::size_t n_raters, double range, double epsilon,
                    std::uint64_t master_seed);

  // payload = 2 (u.v_j - W_ij R_ij) u + x_j^i. Throws ProtocolError if this
  // device did not rate `item`.
  GradientMessage EmitGradient(Index item,
                               std::span<const double> item_vector) const;

  // Local step against the broadcast V, then projection onto the unit ball.
  void UpdateUser(const FactorMatrix& item_snapshot, double eta, double shrink,
                  UpdateScheme update, RegularizationScheme regularization);

  std::span<const double> latent() const { return latent_; }
  std::span<const double> gaussians(Index item) const;
  std::span<const double> noise_share(Index item) const;
  const std::vector<PrivateRating>& ratings() const { return ratings_; }

 private:
  std::size_t Slot(Index item) const;

  Index user_;
  std::vector<PrivateRating> ratings_;  // ascending item
  std::vector<double> latent_;
  std::vector<double> gaussians_;       // degree x dim
  std::vector<double> shares_;          // degree x dim
};

class Recommender {
 public:
  Recommender(FactorMatrix items, double lambda,
              RegularizationScheme regularization);

  void Register(const RaterRegistration& message);
  // Sorts each item's rater list; call once after all registrations.
  void CloseRegistration();

  std::span<const Index> Raters(Index item) const;
  const FactorMatrix& items() const { return items_; }
  FactorModel ModelShell() const;

  // h_j for the rated item `item`.
  std::vector<double> DrawNoiseExponentials(Index item, int dim,
                                            std::uint64_t master_seed) const;

  // Batch: v_j <- v_j - eta (sum payloads + shrink v_j). Messages must come
  // from the registered raters of `item`, exactly one each.
  void UpdateItem(Index item, std::span<const GradientMessage> messages,
                  double eta);
  // Sequential: one message applied against the current v_j.
  void ApplyMessage(Index item, const GradientMessage& message, double eta);

 private:
  double Shrink(Index item, UpdateScheme update) const;

  FactorMatrix items_;
  double lambda_;
  RegularizationScheme regularization_;
  std::vector<std::vector<Index>> raters_;
  bool closed_ = false;
};

struct ProtocolOptions {
  ChannelObserver* observer = nullptr;
  // TSV trace: epoch, phase (item|user), index, messages, grad_norm. The
  // norm is |before - after| / eta of the updated vector.
  std::ostream* trace = nullptr;
  EpochCallback on_epoch;
};

struct ProtocolResult {
  FactorModel model;
  NoisePlan noise;
};

// Simulated decentralized training. `weights` null means no stretching;
// `noise_epsilon` empty means no noise. Items with raters update first,
// then every device updates its own vector. Throws DivergedError.
ProtocolResult RunProtocol(const RatingDataset& train,
                           const WeightAssignment* weights,
                           std::optional<double> noise_epsilon,
                           const TrainConfig& config,
                           const ProtocolOptions& options = {});

ProtocolResult RunHdpmf(const RatingDataset& train,
                        const WeightAssignment& weights, double epsilon,
                        const TrainConfig& config,
                        const ProtocolOptions& options = {});

// u_i.v_j, divided by W_ij when `rescale` and weights are given, clamped to
// the scale when `clamp`.
std::vector<double> PredictAll(const FactorModel& model,
                               const WeightAssignment* weights,
                               std::span<const Rating> pairs,
                               const RatingScale& scale, bool rescale,
                               bool clamp);

}  // namespace hdpmf

#endif  // HDPMF_PROTOCOL_H_
