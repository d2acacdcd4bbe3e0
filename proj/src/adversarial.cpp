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

#include "rcraf/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcraf/random.hpp"

namespace rcraf {
namespace {

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void clamp_to_box(Matrix& x, const std::optional<std::pair<double, double>>& bounds) {
  if (!bounds) return;
  for (double& v : x.values()) v = std::clamp(v, bounds->first, bounds->second);
}

// Projection onto the l-infinity ball around `origin`, then the input box.
void project(Matrix& x, const Matrix& origin, double epsilon,
             const std::optional<std::pair<double, double>>& bounds) {
  auto xv = x.values();
  const auto ov = origin.values();
  for (std::size_t k = 0; k < xv.size(); ++k) {
    xv[k] = std::clamp(xv[k], ov[k] - epsilon, ov[k] + epsilon);
  }
  clamp_to_box(x, bounds);
}

Matrix pgd_single(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels,
                  const AttackConfig& cfg, std::size_t restart, const PgdObserver& observer) {
  const double eps = cfg.epsilon;
  const double step = cfg.effective_step_size();
  Matrix x = batch;
  if (cfg.random_start && eps > 0.0) {
    const CounterRng rng = CounterRng(cfg.seed, Stream::kAttack).split(restart);
    auto xv = x.values();
    for (std::size_t k = 0; k < xv.size(); ++k) xv[k] += rng.uniform(k, -eps, eps);
  }
  project(x, batch, eps, cfg.input_bounds);
  if (observer) observer(0, x);

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    const Matrix g = input_gradient(net, x, labels);
    auto xv = x.values();
    const auto gv = g.values();
    for (std::size_t k = 0; k < xv.size(); ++k) xv[k] += step * sign(gv[k]);
    project(x, batch, eps, cfg.input_bounds);
    if (observer) observer(it, x);
  }
  return x;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("AttackConfig: epsilon must be finite and >= 0");
  }
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw std::domain_error("AttackConfig: step_size must be finite and >= 0");
  }
  if (iterations < 1) throw std::domain_error("AttackConfig: iterations must be >= 1");
  if (restarts < 1) throw std::domain_error("AttackConfig: restarts must be >= 1");
  if (input_bounds && !(input_bounds->first < input_bounds->second)) {
    throw std::domain_error("AttackConfig: input bounds need lo < hi");
  }
}

double AttackConfig::effective_step_size() const {
  if (step_size > 0.0) return step_size;
  return 2.5 * epsilon / static_cast<double>(iterations);
}

Matrix pgd_attack(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels,
                  const AttackConfig& cfg, const PgdObserver& observer) {
  cfg.validate();
  if (batch.cols() != net.input_width()) throw std::domain_error("pgd_attack: shape mismatch");
  if (labels.size() != batch.rows()) throw std::domain_error("pgd_attack: label count mismatch");
  if (cfg.epsilon == 0.0) {
    // The ball is a single point; skip the gradient work.
    Matrix x = batch;
    clamp_to_box(x, cfg.input_bounds);
    return x;
  }

  Matrix best = pgd_single(net, batch, labels, cfg, 0, observer);
  if (cfg.restarts == 1) return best;
  std::vector<double> best_loss = per_sample_loss(net, best, labels);
  for (std::size_t r = 1; r < cfg.restarts; ++r) {
    const Matrix candidate = pgd_single(net, batch, labels, cfg, r, observer);
    const std::vector<double> loss = per_sample_loss(net, candidate, labels);
    for (std::size_t s = 0; s < loss.size(); ++s) {
      if (loss[s] > best_loss[s]) {
        best_loss[s] = loss[s];
        std::copy(candidate.row(s).begin(), candidate.row(s).end(), best.row(s).begin());
      }
    }
  }
  return best;
}

Matrix fgsm_attack(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels,
                   double epsilon, std::optional<std::pair<double, double>> input_bounds) {
  AttackConfig cfg;
  cfg.epsilon = epsilon;
  cfg.input_bounds = input_bounds;
  cfg.validate();
  if (batch.cols() != net.input_width()) throw std::domain_error("fgsm_attack: shape mismatch");
  if (labels.size() != batch.rows()) throw std::domain_error("fgsm_attack: label count mismatch");
  Matrix x = batch;
  clamp_to_box(x, input_bounds);
  if (epsilon > 0.0) {
    const Matrix g = input_gradient(net, x, labels);
    auto xv = x.values();
    const auto gv = g.values();
    for (std::size_t k = 0; k < xv.size(); ++k) xv[k] += epsilon * sign(gv[k]);
    project(x, batch, epsilon, input_bounds);
  }
  return x;
}

double robust_accuracy(const DenseNetwork& net, const Dataset& data, const AttackConfig& cfg) {
  const Matrix adv = pgd_attack(net, data.features(), data.labels(), cfg);
  return accuracy(net, adv, data.labels());
}

}  // namespace rcraf
