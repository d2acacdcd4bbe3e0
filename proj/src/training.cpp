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

#include "rcraf/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rcraf/random.hpp"

namespace rcraf {

TrainResult fit(const NetworkSpec& spec, const TrainConfig& cfg, const Dataset& train,
                const FitOptions& options) {
  cfg.validate();
  if (options.train_attack) options.train_attack->validate();
  if (options.eval_attack) options.eval_attack->validate();
  if (options.eval_every < 1) throw std::domain_error("fit: eval_every must be >= 1");
  if (train.dims() != spec.widths.front()) {
    throw std::domain_error("fit: dataset width does not match the network input");
  }
  const Dataset& eval = options.eval_set ? *options.eval_set : train;

  DenseNetwork net = init_network(spec);
  OptimizerState state(net, cfg);
  const std::size_t n = train.size();
  const CounterRng shuffle_base(cfg.seed, Stream::kShuffle);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::vector<EpochMetrics> history;
  history.reserve(cfg.epochs);
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    SequentialRng rng(shuffle_base.split(epoch));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - start);
      const std::span<const std::size_t> idx(order.data() + start, count);
      Matrix x = gather_rows(train.features(), idx);
      std::vector<int> y(count);
      for (std::size_t k = 0; k < count; ++k) y[k] = train.labels()[idx[k]];

      if (options.train_attack) {
        // Fresh attack randomness for every (epoch, batch).
        AttackConfig attack = *options.train_attack;
        attack.seed = CounterRng(attack.seed, Stream::kAttack)
                          .split(epoch)
                          .bits(batches);
        x = pgd_attack(net, x, y, attack);
      }
      const LossGradients lg = loss_and_backward(net, x, y);
      if (!std::isfinite(lg.loss) || lg.loss < 0.0) {
        throw std::runtime_error("fit: loss became non-finite at epoch " + std::to_string(epoch));
      }
      sgd_step(net, lg.params, cfg, state);
      loss_sum += lg.loss;
      ++batches;
    }

    const DenseNetwork& current = state.ema ? *state.ema : net;
    EpochMetrics m{epoch + 1, loss_sum / static_cast<double>(batches), kNaN, kNaN};
    if ((epoch + 1) % options.eval_every == 0 || epoch + 1 == cfg.epochs) {
      m.clean_accuracy = evaluate_accuracy(current, eval);
      if (options.eval_attack) m.robust_accuracy = robust_accuracy(current, eval, *options.eval_attack);
    }
    history.push_back(m);
  }
  return {state.ema ? std::move(*state.ema) : std::move(net), std::move(history)};
}

TrainResult train_standard(const NetworkSpec& spec, const TrainConfig& cfg, const Dataset& train,
                           const Dataset* eval_set, std::optional<AttackConfig> eval_attack) {
  FitOptions options;
  options.eval_set = eval_set;
  options.eval_attack = std::move(eval_attack);
  return fit(spec, cfg, train, options);
}

TrainResult adversarial_train(const NetworkSpec& spec, const TrainConfig& cfg,
                              const AttackConfig& attack, const Dataset& train,
                              const Dataset* eval_set, std::optional<AttackConfig> eval_attack) {
  FitOptions options;
  options.train_attack = attack;
  options.eval_set = eval_set;
  options.eval_attack = std::move(eval_attack);
  return fit(spec, cfg, train, options);
}

}  // namespace rcraf
