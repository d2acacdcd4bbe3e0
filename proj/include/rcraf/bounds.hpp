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

#ifndef RCRAF_BOUNDS_HPP_
#define RCRAF_BOUNDS_HPP_

// Norm-based Rademacher complexity bound for dense chains with clipped
// RCR-AF activations.
//
// For layer i with d_in = d_{i-1}, d_out = d_i, operator-norm bound k_i and
// (2,1)-norm bound b_i, clipping shrinks the two norms by
//
//   zeta_i = min(1, sqrt(d_i) gamma / (alpha ||x|| k_i)) / (1 + e^{-gamma})
//   eta_i  = sqrt(min(1, d_i ln(M_clip sqrt(d_i)/eps_i + 1) eps_i^2
//                        / (b_i^2 c_i^2 ln(2 d_{i-1} d_i))))
//
// and the bound over n samples with input norm c is
//
//   R <= (c / sqrt(n)) prod_i(k_i zeta_i) (sum_i (b_i eta_i / (k_i zeta_i))^{2/3})^{3/2}.
//
// Input norms propagate as c_0 = c, c_i = min(k_i zeta_i c_{i-1}, sqrt(d_i) M_clip).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rcraf/matrix.hpp"

namespace rcraf {

struct LayerBoundSpec {
  std::size_t d_in;
  std::size_t d_out;
  double k;  // operator-norm bound
  double b;  // (2,1)-norm bound of W^T

  void validate() const;
};

// Denominator used by zeta_clip: 1 + e^{-gamma} (default, matches the
// Lipschitz constant) or the literal 1 + e^{-lambda} variant.
enum class ZetaDenominator { kGamma, kLambda };

struct BoundConfig {
  double alpha = 1.0;
  double gamma = 66.7228;
  std::size_t n = 1;
  double c = 1.0;
  // Per-layer covering radii. Empty means epsilon_total / r for every layer.
  std::vector<double> epsilons;
  double epsilon_total = 1.0;
  ZetaDenominator zeta_denominator = ZetaDenominator::kGamma;
  double lambda = 88.7228;  // only read for ZetaDenominator::kLambda

  void validate(std::size_t layer_count) const;
  double epsilon_for(std::size_t layer, std::size_t layer_count) const;
};

struct LayerBoundRow {
  double lipschitz;
  double zeta;
  double eta;
  double k_clip;
  double b_clip;
  double c_in;   // c_{i-1}
  double c_out;  // c_i
  double epsilon;
};

struct BoundReport {
  double alpha;
  double gamma;
  double m_clip;
  std::vector<LayerBoundRow> layers;
  double rademacher_bound;
  double unclipped_bound;
};

// 1 / (1 + e^{-gamma}).
double lipschitz_constant(double gamma);

struct SpectralNormResult {
  double value;
  std::size_t iterations;
  bool converged;
};

// Largest singular value by power iteration on W^T W from the normalised
// all-ones vector; stops at relative change < tolerance.
SpectralNormResult spectral_norm(const Matrix& w, double tolerance = 1e-8,
                                 std::size_t max_iterations = 10000);

// ||W^T||_{2,1}: sum of the Euclidean norms of the rows of W.
double norm_2_1_transpose(const Matrix& w);

// Measured (k, b) for a weight matrix of shape d_out x d_in.
LayerBoundSpec measure_layer(const Matrix& w);

double zeta_clip(const LayerBoundSpec& layer, const BoundConfig& cfg, double x_norm);

// (b^2 c^2 / eps^2) ln(2 d_in d_out).
double weight_cover_log(double eps, double b, double c, std::size_t d_in, std::size_t d_out);

// d ln(m sqrt(d) / eps + 1).
double output_cover_log(double eps, std::size_t d, double m_clip_value);

double eta_clip(const LayerBoundSpec& layer, double eps, double c_in, double m_clip_value);

BoundReport rademacher_bound(std::span<const LayerBoundSpec> layers, const BoundConfig& cfg);

// The same bound with every zeta and eta set to one.
double unclipped_rademacher_bound(std::span<const LayerBoundSpec> layers, double c,
                                  std::size_t n);

struct SweepRow {
  double alpha;
  double bound;
  double unclipped_bound;
};

// One rademacher_bound per alpha (cfg.alpha is overridden), sorted by alpha.
std::vector<SweepRow> alpha_sweep(std::span<const LayerBoundSpec> layers, const BoundConfig& cfg,
                                  std::span<const double> alpha_grid);

}  // namespace rcraf

#endif  // RCRAF_BOUNDS_HPP_
