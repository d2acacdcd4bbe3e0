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

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "rcraf/kernels.hpp"

namespace rcraf::kernels::serial {

Matrix affine(const Matrix& x, const Matrix& w, std::span<const double> bias) {
  if (x.cols() != w.cols() || bias.size() != w.rows()) {
    throw std::domain_error("affine: shape mismatch");
  }
  Matrix z(x.rows(), w.rows());
  for (std::size_t s = 0; s < x.rows(); ++s) {
    for (std::size_t o = 0; o < w.rows(); ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < x.cols(); ++i) acc += w(o, i) * x(s, i);
      z(s, o) = acc;
    }
  }
  return z;
}

Matrix activate(const ActivationSpec& spec, const Matrix& z) {
  Matrix a(z.rows(), z.cols());
  for (std::size_t k = 0; k < z.size(); ++k) a.values()[k] = rcraf::activate(spec, z.values()[k]);
  return a;
}

Matrix activate_backward(const ActivationSpec& spec, const Matrix& z, const Matrix& grad_a) {
  if (z.rows() != grad_a.rows() || z.cols() != grad_a.cols()) {
    throw std::domain_error("activate_backward: shape mismatch");
  }
  Matrix g(z.rows(), z.cols());
  for (std::size_t k = 0; k < z.size(); ++k) {
    g.values()[k] = grad_a.values()[k] * activate_derivative(spec, z.values()[k]);
  }
  return g;
}

Matrix backprop_input(const Matrix& grad_z, const Matrix& w) {
  if (grad_z.cols() != w.rows()) throw std::domain_error("backprop_input: shape mismatch");
  Matrix gx(grad_z.rows(), w.cols());
  for (std::size_t s = 0; s < grad_z.rows(); ++s) {
    for (std::size_t i = 0; i < w.cols(); ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < w.rows(); ++o) acc += grad_z(s, o) * w(o, i);
      gx(s, i) = acc;
    }
  }
  return gx;
}

void weight_gradient(const Matrix& grad_z, const Matrix& x, Matrix& grad_w,
                     std::vector<double>& grad_b) {
  if (grad_z.rows() != x.rows()) throw std::domain_error("weight_gradient: shape mismatch");
  grad_w = Matrix(grad_z.cols(), x.cols());
  grad_b.assign(grad_z.cols(), 0.0);
  for (std::size_t o = 0; o < grad_z.cols(); ++o) {
    for (std::size_t i = 0; i < x.cols(); ++i) {
      double acc = 0.0;
      for (std::size_t s = 0; s < x.rows(); ++s) acc += grad_z(s, o) * x(s, i);
      grad_w(o, i) = acc;
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < grad_z.rows(); ++s) acc += grad_z(s, o);
    grad_b[o] = acc;
  }
}

std::uint64_t count_outside(double sigma, double threshold, const CounterRng& rng,
                            std::uint64_t n) {
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (std::abs(sigma * rng.normal(i)) > threshold) ++count;
  }
  return count;
}

}  // namespace rcraf::kernels::serial
