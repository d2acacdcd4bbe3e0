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

#include "rcraf/precision.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcraf {

PrecisionModel PrecisionModel::for_bits(int bits) {
  switch (bits) {
    case 16:
      return {16, 11.0899};
    case 32:
      return {32, 88.7228};
    case 64:
      return {64, 709.7827};
    default:
      throw std::domain_error("PrecisionModel: bits must be 16, 32 or 64");
  }
}

void SparsityQuery::validate() const {
  if (!(alpha > 0.0) || !(gamma > 0.0) || !(sigma > 0.0)) {
    throw std::domain_error("SparsityQuery: alpha, gamma and sigma must be positive");
  }
}

double normal_cdf(double x) {
  if (std::isnan(x)) throw std::domain_error("normal_cdf: NaN input");
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double overflow_threshold(double alpha, const PrecisionModel& model) {
  if (!(alpha > 0.0)) throw std::domain_error("overflow_threshold: alpha must be positive");
  return -model.lambda() / alpha;
}

double dying_probability(double alpha, double sigma, const PrecisionModel& model) {
  if (!(alpha > 0.0) || !(sigma > 0.0)) {
    throw std::domain_error("dying_probability: alpha and sigma must be positive");
  }
  return normal_cdf(-model.lambda() / (alpha * sigma));
}

double clipped_sparsity_probability(const SparsityQuery& q) {
  q.validate();
  return 2.0 * normal_cdf(-q.gamma / (q.alpha * q.sigma));
}

double m_clip(double alpha, double gamma) {
  if (!(alpha > 0.0) || !(gamma > 0.0)) {
    throw std::domain_error("m_clip: alpha and gamma must be positive");
  }
  return (std::log1p(std::exp(-gamma)) + gamma) / alpha;
}

std::vector<SparsityRow> sparsity_report(std::span<const double> sigmas, double alpha,
                                         double gamma, const PrecisionModel& model) {
  if (sigmas.empty()) throw std::domain_error("sparsity_report: no layers");
  if (!(gamma < model.lambda())) {
    throw std::domain_error("sparsity_report: gamma must be below lambda");
  }
  const double m = m_clip(alpha, gamma);
  std::vector<SparsityRow> rows;
  rows.reserve(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    rows.push_back({i, sigmas[i], alpha, gamma,
                    clipped_sparsity_probability({alpha, gamma, sigmas[i]}), m});
  }
  return rows;
}

}  // namespace rcraf
