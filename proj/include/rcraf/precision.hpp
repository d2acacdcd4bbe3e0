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

#ifndef RCRAF_PRECISION_HPP_
#define RCRAF_PRECISION_HPP_

// Analytic model of floating-point overflow and clipping-induced sparsity
// for RCR-AF. Reduced precision is modelled through lambda = ln(M) only; no
// arithmetic is carried out in narrow formats.

#include <cstddef>
#include <span>
#include <vector>

namespace rcraf {

class PrecisionModel {
 public:
  // bits must be 16, 32 or 64; throws std::domain_error otherwise.
  static PrecisionModel for_bits(int bits);
  static PrecisionModel half() { return for_bits(16); }
  static PrecisionModel single() { return for_bits(32); }
  static PrecisionModel double_precision() { return for_bits(64); }

  int bits() const { return bits_; }
  // ln of the largest finite value of the format.
  double lambda() const { return lambda_; }

 private:
  PrecisionModel(int bits, double lambda) : bits_(bits), lambda_(lambda) {}
  int bits_;
  double lambda_;
};

struct SparsityQuery {
  double alpha;
  double gamma;
  double sigma;  // std-dev of the Gaussian pre-activation

  void validate() const;
};

// Standard normal CDF.
double normal_cdf(double x);

// -lambda / alpha: below this input e^{-alpha x} overflows the format.
double overflow_threshold(double alpha, const PrecisionModel& model);

// P(z < -lambda/alpha) for z ~ N(0, sigma^2), i.e. the chance the unclipped
// activation's gradient underflows to zero.
double dying_probability(double alpha, double sigma, const PrecisionModel& model);

// P(|z| > gamma/alpha) = 2 Phi(-gamma / (alpha sigma)).
double clipped_sparsity_probability(const SparsityQuery& q);

// Largest RCR-AF output: (1/alpha) ln(1 + e^{-gamma}) + gamma/alpha.
double m_clip(double alpha, double gamma);

struct SparsityRow {
  std::size_t layer;
  double sigma;
  double alpha;
  double gamma;
  double p_sparsity;
  double m_clip;
};

// One row per entry of `sigmas`. Throws std::domain_error on an empty list
// or on gamma >= lambda.
std::vector<SparsityRow> sparsity_report(std::span<const double> sigmas, double alpha,
                                         double gamma, const PrecisionModel& model);

}  // namespace rcraf

#endif  // RCRAF_PRECISION_HPP_
