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

#include "rcraf/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rcraf::kernels {

// Loops run over std::ptrdiff_t because OpenMP wants a signed induction
// variable. Each output element is accumulated in the same order as the
// serial reference.

Matrix affine(const Matrix& x, const Matrix& w, std::span<const double> bias) {
  if (x.cols() != w.cols() || bias.size() != w.rows()) {
    throw std::domain_error("affine: shape mismatch");
  }
  Matrix z(x.rows(), w.rows());
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const std::size_t d_in = x.cols();
  const std::size_t d_out = w.rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const double* xs = x.row(s).data();
    double* zs = z.row(s).data();
    for (std::size_t o = 0; o < d_out; ++o) {
      const double* wo = w.row(o).data();
      double acc = bias[o];
      for (std::size_t i = 0; i < d_in; ++i) acc += wo[i] * xs[i];
      zs[o] = acc;
    }
  }
  return z;
}

Matrix activate(const ActivationSpec& spec, const Matrix& z) {
  Matrix a(z.rows(), z.cols());
  const auto n = static_cast<std::ptrdiff_t>(z.size());
  const double* in = z.values().data();
  double* out = a.values().data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = rcraf::activate(spec, in[k]);
  return a;
}

Matrix activate_backward(const ActivationSpec& spec, const Matrix& z, const Matrix& grad_a) {
  if (z.rows() != grad_a.rows() || z.cols() != grad_a.cols()) {
    throw std::domain_error("activate_backward: shape mismatch");
  }
  Matrix g(z.rows(), z.cols());
  const auto n = static_cast<std::ptrdiff_t>(z.size());
  const double* zin = z.values().data();
  const double* ga = grad_a.values().data();
  double* out = g.values().data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = ga[k] * activate_derivative(spec, zin[k]);
  return g;
}

Matrix backprop_input(const Matrix& grad_z, const Matrix& w) {
  if (grad_z.cols() != w.rows()) throw std::domain_error("backprop_input: shape mismatch");
  Matrix gx(grad_z.rows(), w.cols());
  const auto n = static_cast<std::ptrdiff_t>(grad_z.rows());
  const std::size_t d_in = w.cols();
  const std::size_t d_out = w.rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const double* gs = grad_z.row(s).data();
    double* out = gx.row(s).data();
    // Row-wise accumulation: out[i] sees o = 0, 1, ... in order.
    for (std::size_t o = 0; o < d_out; ++o) {
      const double g = gs[o];
      const double* wo = w.row(o).data();
      for (std::size_t i = 0; i < d_in; ++i) out[i] += g * wo[i];
    }
  }
  return gx;
}

void weight_gradient(const Matrix& grad_z, const Matrix& x, Matrix& grad_w,
                     std::vector<double>& grad_b) {
  if (grad_z.rows() != x.rows()) throw std::domain_error("weight_gradient: shape mismatch");
  grad_w = Matrix(grad_z.cols(), x.cols());
  grad_b.assign(grad_z.cols(), 0.0);
  const auto d_out = static_cast<std::ptrdiff_t>(grad_z.cols());
  const std::size_t d_in = x.cols();
  const std::size_t n = x.rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t o = 0; o < d_out; ++o) {
    double* gw = grad_w.row(o).data();
    double gb = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double g = grad_z(s, o);
      const double* xs = x.row(s).data();
      for (std::size_t i = 0; i < d_in; ++i) gw[i] += g * xs[i];
      gb += g;
    }
    grad_b[o] = gb;
  }
}

std::uint64_t count_outside(double sigma, double threshold, const CounterRng& rng,
                            std::uint64_t n) {
  std::uint64_t count = 0;
  const auto total = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t i = 0; i < total; ++i) {
    if (std::abs(sigma * rng.normal(static_cast<std::uint64_t>(i))) > threshold) ++count;
  }
  return count;
}

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace rcraf::kernels
