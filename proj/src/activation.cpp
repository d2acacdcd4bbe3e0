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

#include "rcraf/activation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>


namespace rcraf {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input");
}

void require_params(double alpha, double gamma) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !(gamma > 0.0) || std::isnan(gamma)) {
    throw std::domain_error("RCR-AF: alpha and gamma must be positive");
  }
}

// softplus(t) = ln(1 + e^t) = max(t, 0) + ln(1 + e^{-|t|}).
inline double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

inline double rcraf_forward_unchecked(double x, double alpha, double gamma) {
  const double bound = gamma / alpha;
  double t;
  if (x >= bound) {
    t = gamma;
  } else if (x <= -bound) {
    t = -gamma;
  } else {
    t = std::clamp(alpha * x, -gamma, gamma);
  }
  return softplus(t) / alpha;
}

inline double rcraf_derivative_unchecked(double x, double alpha, double gamma) {
  if (std::abs(x) >= gamma / alpha) return 0.0;
  return sigmoid(alpha * x);
}

constexpr double kGeluScale = 1.702;

inline double baseline_forward_unchecked(double x, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRelu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::kGelu:
      return x * sigmoid(kGeluScale * x);
    case ActivationKind::kSwish:
      return x * sigmoid(x);
    case ActivationKind::kRcrAf:
      break;
  }
  throw std::domain_error("baseline_forward: not a baseline activation");
}

inline double baseline_derivative_unchecked(double x, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::kGelu: {
      const double s = sigmoid(kGeluScale * x);
      return s + kGeluScale * x * s * (1.0 - s);
    }
    case ActivationKind::kSwish: {
      const double s = sigmoid(x);
      return s + x * s * (1.0 - s);
    }
    case ActivationKind::kRcrAf:
      break;
  }
  throw std::domain_error("baseline_derivative: not a baseline activation");
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRcrAf:
      return "rcraf";
    case ActivationKind::kRelu:
      return "relu";
    case ActivationKind::kGelu:
      return "gelu";
    case ActivationKind::kSwish:
      return "swish";
  }
  return "unknown";
}

std::optional<ActivationKind> parse_activation_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "rcraf" || lower == "rcr-af") return ActivationKind::kRcrAf;
  if (lower == "relu") return ActivationKind::kRelu;
  if (lower == "gelu") return ActivationKind::kGelu;
  if (lower == "swish") return ActivationKind::kSwish;
  return std::nullopt;
}

void ActivationSpec::validate(std::optional<double> lambda) const {
  if (kind != ActivationKind::kRcrAf) return;
  require_params(alpha, gamma);
  if (!std::isfinite(gamma)) throw std::domain_error("RCR-AF: gamma must be finite");
  if (lambda && !(gamma < *lambda)) {
    throw std::domain_error("RCR-AF: gamma must be below the precision ceiling lambda");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double rcraf_forward(double x, double alpha, double gamma) {
  require_finite(x, "rcraf_forward");
  require_params(alpha, gamma);
  return rcraf_forward_unchecked(x, alpha, gamma);
}

double rcraf_derivative(double x, double alpha, double gamma) {
  require_finite(x, "rcraf_derivative");
  require_params(alpha, gamma);
  return rcraf_derivative_unchecked(x, alpha, gamma);
}

double baseline_forward(double x, ActivationKind kind) {
  require_finite(x, "baseline_forward");
  return baseline_forward_unchecked(x, kind);
}

double baseline_derivative(double x, ActivationKind kind) {
  require_finite(x, "baseline_derivative");
  return baseline_derivative_unchecked(x, kind);
}

double activate(const ActivationSpec& spec, double x) {
  if (spec.kind == ActivationKind::kRcrAf) return rcraf_forward_unchecked(x, spec.alpha, spec.gamma);
  return baseline_forward_unchecked(x, spec.kind);
}

double activate_derivative(const ActivationSpec& spec, double x) {
  if (spec.kind == ActivationKind::kRcrAf) {
    return rcraf_derivative_unchecked(x, spec.alpha, spec.gamma);
  }
  return baseline_derivative_unchecked(x, spec.kind);
}

std::vector<ActivationRow> activation_table(const ActivationSpec& spec, double x_min,
                                            double x_max, std::size_t n_points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw std::domain_error("activation_table: need finite x_min < x_max");
  }
  if (n_points < 2) throw std::domain_error("activation_table: need at least 2 points");
  spec.validate();

  std::vector<ActivationRow> rows(n_points);
  const double step = (x_max - x_min) / static_cast<double>(n_points - 1);
  const auto n = static_cast<std::ptrdiff_t>(n_points);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double x = (i == n - 1) ? x_max : x_min + step * static_cast<double>(i);
    rows[i] = {x, activate(spec, x), activate_derivative(spec, x)};
  }
  return rows;
}

}  // namespace rcraf
