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

#include "rcraf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rcraf/precision.hpp"

namespace rcraf {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be positive and finite");
  }
}

double bound_formula(std::span<const double> k, std::span<const double> b, double c,
                     std::size_t n) {
  double product = 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    product *= k[i];
    sum += std::cbrt((b[i] / k[i]) * (b[i] / k[i]));
  }
  return c / std::sqrt(static_cast<double>(n)) * product * std::pow(sum, 1.5);
}

}  // namespace

void LayerBoundSpec::validate() const {
  if (d_in < 1 || d_out < 1) throw std::domain_error("LayerBoundSpec: widths must be >= 1");
  require_positive(k, "LayerBoundSpec.k");
  require_positive(b, "LayerBoundSpec.b");
}

void BoundConfig::validate(std::size_t layer_count) const {
  require_positive(alpha, "BoundConfig.alpha");
  require_positive(gamma, "BoundConfig.gamma");
  require_positive(c, "BoundConfig.c");
  if (n < 1) throw std::domain_error("BoundConfig.n must be >= 1");
  if (epsilons.empty()) {
    require_positive(epsilon_total, "BoundConfig.epsilon_total");
  } else {
    if (epsilons.size() != layer_count) {
      throw std::domain_error("BoundConfig: one epsilon per layer required");
    }
    for (double e : epsilons) require_positive(e, "BoundConfig.epsilons[i]");
  }
  if (zeta_denominator == ZetaDenominator::kLambda) require_positive(lambda, "BoundConfig.lambda");
}

double BoundConfig::epsilon_for(std::size_t layer, std::size_t layer_count) const {
  if (!epsilons.empty()) return epsilons.at(layer);
  return epsilon_total / static_cast<double>(layer_count);
}

double lipschitz_constant(double gamma) {
  require_positive(gamma, "gamma");
  return 1.0 / (1.0 + std::exp(-gamma));
}

SpectralNormResult spectral_norm(const Matrix& w, double tolerance, std::size_t max_iterations) {
  if (w.empty()) throw std::domain_error("spectral_norm: empty matrix");
  for (double v : w.values()) {
    if (!std::isfinite(v)) throw std::domain_error("spectral_norm: non-finite entry");
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();

  std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  std::vector<double> wv(rows);
  std::vector<double> next(cols);
  double sigma = 0.0;

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += w(r, c) * v[c];
      wv[r] = acc;
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) next[c] += w(r, c) * wv[r];
    }
    // ||W^T W v|| with ||v|| = 1 estimates sigma^2.
    const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm == 0.0) {
      // All-ones start in the null space; zero matrix is the usual cause.
      const bool zero = std::all_of(w.values().begin(), w.values().end(),
                                    [](double x) { return x == 0.0; });
      if (zero) return {0.0, it, true};
      // Restart from a basis vector not orthogonal to the row space.
      std::fill(v.begin(), v.end(), 0.0);
      std::size_t best = 0;
      double best_norm = -1.0;
      for (std::size_t c = 0; c < cols; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < rows; ++r) col += w(r, c) * w(r, c);
        if (col > best_norm) best_norm = col, best = c;
      }
      v[best] = 1.0;
      continue;
    }
    const double estimate = std::sqrt(norm);
    for (std::size_t c = 0; c < cols; ++c) v[c] = next[c] / norm;
    if (std::abs(estimate - sigma) <= tolerance * estimate) return {estimate, it, true};
    sigma = estimate;
  }
  return {sigma, max_iterations, false};
}

double norm_2_1_transpose(const Matrix& w) {
  double total = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sq = 0.0;
    for (double v : w.row(r)) sq += v * v;
    total += std::sqrt(sq);
  }
  return total;
}

LayerBoundSpec measure_layer(const Matrix& w) {
  const double k = spectral_norm(w).value;
  const double b = norm_2_1_transpose(w);
  // ||W||_op <= ||W^T||_{2,1} holds for every matrix.
  if (b < k * (1.0 - 1e-9)) throw std::logic_error("measure_layer: (2,1)-norm below spectral norm");
  return {w.cols(), w.rows(), k, b};
}

double zeta_clip(const LayerBoundSpec& layer, const BoundConfig& cfg, double x_norm) {
  require_positive(x_norm, "zeta_clip: x_norm");
  const double shrink = std::min(
      1.0, std::sqrt(static_cast<double>(layer.d_out)) * cfg.gamma / (cfg.alpha * x_norm * layer.k));
  const double exponent = cfg.zeta_denominator == ZetaDenominator::kGamma ? cfg.gamma : cfg.lambda;
  return shrink / (1.0 + std::exp(-exponent));
}

double weight_cover_log(double eps, double b, double c, std::size_t d_in, std::size_t d_out) {
  require_positive(eps, "weight_cover_log: eps");
  return (b * b * c * c) / (eps * eps) *
         std::log(2.0 * static_cast<double>(d_in) * static_cast<double>(d_out));
}

double output_cover_log(double eps, std::size_t d, double m_clip_value) {
  require_positive(eps, "output_cover_log: eps");
  const double dd = static_cast<double>(d);
  return dd * std::log1p(m_clip_value * std::sqrt(dd) / eps);
}

double eta_clip(const LayerBoundSpec& layer, double eps, double c_in, double m_clip_value) {
  const double output = output_cover_log(eps, layer.d_out, m_clip_value);
  const double weight = weight_cover_log(eps, layer.b, c_in, layer.d_in, layer.d_out);
  if (!(weight > 0.0)) return 1.0;  // b or c is zero
  return std::sqrt(std::min(1.0, output / weight));
}

BoundReport rademacher_bound(std::span<const LayerBoundSpec> layers, const BoundConfig& cfg) {
  if (layers.empty()) throw std::domain_error("rademacher_bound: empty layer list");
  for (const auto& l : layers) l.validate();
  cfg.validate(layers.size());

  BoundReport report;
  report.alpha = cfg.alpha;
  report.gamma = cfg.gamma;
  report.m_clip = m_clip(cfg.alpha, cfg.gamma);
  const double lipschitz = lipschitz_constant(cfg.gamma);

  std::vector<double> k_clip;
  std::vector<double> b_clip;
  double c_prev = cfg.c;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    const double eps = cfg.epsilon_for(i, layers.size());
    const double zeta = zeta_clip(layer, cfg, c_prev);
    const double kc = zeta * layer.k;
    const double box = std::sqrt(static_cast<double>(layer.d_out)) * report.m_clip;
    const double c_out = std::min(kc * c_prev, box);
    const double eta = eta_clip(layer, eps, c_out, report.m_clip);
    const double bc = eta * layer.b;
    report.layers.push_back({lipschitz, zeta, eta, kc, bc, c_prev, c_out, eps});
    k_clip.push_back(kc);
    b_clip.push_back(bc);
    c_prev = c_out;
  }
  report.rademacher_bound = bound_formula(k_clip, b_clip, cfg.c, cfg.n);
  report.unclipped_bound = unclipped_rademacher_bound(layers, cfg.c, cfg.n);
  return report;
}

double unclipped_rademacher_bound(std::span<const LayerBoundSpec> layers, double c,
                                  std::size_t n) {
  if (layers.empty()) throw std::domain_error("unclipped_rademacher_bound: empty layer list");
  std::vector<double> k;
  std::vector<double> b;
  for (const auto& l : layers) {
    k.push_back(l.k);
    b.push_back(l.b);
  }
  return bound_formula(k, b, c, n);
}

std::vector<SweepRow> alpha_sweep(std::span<const LayerBoundSpec> layers, const BoundConfig& cfg,
                                  std::span<const double> alpha_grid) {
  if (alpha_grid.empty()) throw std::domain_error("alpha_sweep: empty alpha grid");
  std::vector<double> grid(alpha_grid.begin(), alpha_grid.end());
  std::stable_sort(grid.begin(), grid.end());
  for (double a : grid) require_positive(a, "alpha_sweep: alpha");
  // Validate once up front so worker threads never throw.
  {
    BoundConfig probe = cfg;
    probe.alpha = grid.front();
    rademacher_bound(layers, probe);
  }

  std::vector<SweepRow> rows(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    BoundConfig point = cfg;
    point.alpha = grid[i];
    const BoundReport r = rademacher_bound(layers, point);
    rows[i] = {grid[i], r.rademacher_bound, r.unclipped_bound};
  }
  return rows;
}

}  // namespace rcraf
