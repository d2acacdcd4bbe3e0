// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_TRAINING_HPP_
#define RCRAF_TRAINING_HPP_

// Mini-batch training loops. Standard training minimises the clean loss;
// adversarial training replaces each batch by its PGD perturbation against
// the current weights before the gradient step.

#include <cstddef>
#include <optional>
#include <vector>

#include "rcraf/adversarial.hpp"
#include "rcraf/data.hpp"
#include "rcraf/net.hpp"

namespace rcraf {

struct EpochMetrics {
  std::size_t epoch;
  double train_loss;       // mean batch loss (adversarial loss when attacking)
  double clean_accuracy;   // on the evaluation set
  double robust_accuracy;  // NaN when no evaluation attack is configured
};

struct FitOptions {
  std::optional<AttackConfig> train_attack;  // empty: standard training
  const Dataset* eval_set = nullptr;         // defaults to the training set
  std::optional<AttackConfig> eval_attack;
  // Metrics are computed every eval_every epochs and at the last epoch;
  // other epochs carry NaN accuracies.
  std::size_t eval_every = 1;
};

struct TrainResult {
  DenseNetwork net;  // EMA weights when ema_decay is set
  std::vector<EpochMetrics> history;
};

TrainResult fit(const NetworkSpec& spec, const TrainConfig& cfg, const Dataset& train,
                const FitOptions& options = {});

TrainResult train_standard(const NetworkSpec& spec, const TrainConfig& cfg, const Dataset& train,
                           const Dataset* eval_set = nullptr,
                           std::optional<AttackConfig> eval_attack = std::nullopt);

TrainResult adversarial_train(const NetworkSpec& spec, const TrainConfig& cfg,
                              const AttackConfig& attack, const Dataset& train,
                              const Dataset* eval_set = nullptr,
                              std::optional<AttackConfig> eval_attack = std::nullopt);

}  // namespace rcraf

#endif  // RCRAF_TRAINING_HPP_
