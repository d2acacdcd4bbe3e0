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

#ifndef RCRAF_ADVERSARIAL_HPP_
#define RCRAF_ADVERSARIAL_HPP_

// l-infinity FGSM and PGD attacks.
//
// PGD iterates x_{t+1} = Proj_{B_eps(x)}(x_t + step * sign(grad_x loss(x_t)))
// from x_0 = Proj_{B_eps(x)}(x + u), u ~ Uniform[-eps, eps] (or x_0 = x
// without random start), clamping to the optional input box after every
// projection. sign(0) = 0.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "rcraf/data.hpp"
#include "rcraf/matrix.hpp"
#include "rcraf/net.hpp"

namespace rcraf {

struct AttackConfig {
  double epsilon = 0.0;
  // Per-iteration step; 0 selects 2.5 * epsilon / iterations.
  double step_size = 0.0;
  std::size_t iterations = 10;
  bool random_start = true;
  std::optional<std::pair<double, double>> input_bounds;
  std::uint64_t seed = 0;
  // Independent random starts; per sample the highest-loss result is kept.
  std::size_t restarts = 1;

  void validate() const;
  double effective_step_size() const;
};

// Called with the iteration number (0 = starting point) and the current
// iterate, after projection and clamping.
using PgdObserver = std::function<void(std::size_t, const Matrix&)>;

Matrix pgd_attack(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels,
                  const AttackConfig& cfg, const PgdObserver& observer = {});

Matrix fgsm_attack(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels,
                   double epsilon,
                   std::optional<std::pair<double, double>> input_bounds = std::nullopt);

// Accuracy on pgd_attack(data) against the true labels.
double robust_accuracy(const DenseNetwork& net, const Dataset& data, const AttackConfig& cfg);

}  // namespace rcraf

#endif  // RCRAF_ADVERSARIAL_HPP_
