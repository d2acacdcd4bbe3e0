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

#ifndef RCRAF_ACTIVATION_HPP_
#define RCRAF_ACTIVATION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rcraf {

enum class ActivationKind { kRcrAf, kRelu, kGelu, kSwish };

std::string_view to_string(ActivationKind kind);
// Accepts "rcraf", "relu", "gelu", "swish" (case-insensitive).
std::optional<ActivationKind> parse_activation_kind(std::string_view name);

// Which activation a layer applies. alpha and gamma are only meaningful for
// kRcrAf: alpha sets the sharpness, gamma the clip scale; the input is
// clipped to [-gamma/alpha, gamma/alpha].
struct ActivationSpec {
  ActivationKind kind = ActivationKind::kRelu;
  double alpha = 1.0;
  double gamma = 1.0;

  static ActivationSpec rcraf(double alpha, double gamma) {
    return {ActivationKind::kRcrAf, alpha, gamma};
  }
  static ActivationSpec baseline(ActivationKind kind) { return {kind, 1.0, 1.0}; }

  // Throws std::domain_error unless alpha, gamma > 0 (RCR-AF) and, when a
  // precision ceiling is given, gamma < lambda.
  void validate(std::optional<double> lambda = std::nullopt) const;

  // gamma / alpha for RCR-AF.
  double clip_bound() const { return gamma / alpha; }

  bool operator==(const ActivationSpec&) const = default;
};

// (1/alpha) ln(1 + exp(-alpha u)) + u with u = clip(x, [-gamma/alpha, gamma/alpha]),
// evaluated as softplus(alpha u) / alpha so nothing overflows.
double rcraf_forward(double x, double alpha, double gamma);

// sigmoid(alpha x) inside the clip interval, 0 on and beyond its boundary.
double rcraf_derivative(double x, double alpha, double gamma);

// ReLU, GELU (sigmoid form x * sigmoid(1.702 x)) and Swish (beta = 1).
// Throws std::domain_error for kRcrAf.
double baseline_forward(double x, ActivationKind kind);
double baseline_derivative(double x, ActivationKind kind);

// Dispatch on spec.kind. These skip argument validation and are what the
// network kernels call.
double activate(const ActivationSpec& spec, double x);
double activate_derivative(const ActivationSpec& spec, double x);

// Numerically stable logistic function.
double sigmoid(double x);

struct ActivationRow {
  double x;
  double value;
  double derivative;
};

// n_points evenly spaced samples over [x_min, x_max], endpoints included.
std::vector<ActivationRow> activation_table(const ActivationSpec& spec, double x_min,
                                            double x_max, std::size_t n_points);

}  // namespace rcraf

#endif  // RCRAF_ACTIVATION_HPP_
