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

#ifndef RCRAF_KERNELS_HPP_
#define RCRAF_KERNELS_HPP_

// Data-parallel inner loops of the network and the Monte-Carlo checks.
//
// `kernels::` holds the OpenMP versions; `kernels::serial::` keeps plain
// loop reference versions for tests and benchmarks. Both compute every
// output element with the same sequential summation order, so they agree
// bit-for-bit and the parallel results do not depend on the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "rcraf/activation.hpp"
#include "rcraf/matrix.hpp"
#include "rcraf/random.hpp"

namespace rcraf::kernels {

// z = x W^T + b for a batch x (n x d_in), weights W (d_out x d_in).
Matrix affine(const Matrix& x, const Matrix& w, std::span<const double> bias);

// Elementwise activation.
Matrix activate(const ActivationSpec& spec, const Matrix& z);

// grad_z = grad_a * activation'(z), elementwise.
Matrix activate_backward(const ActivationSpec& spec, const Matrix& z, const Matrix& grad_a);

// grad_x = grad_z W  (n x d_in).
Matrix backprop_input(const Matrix& grad_z, const Matrix& w);

// grad_w = grad_z^T x and grad_b = column sums of grad_z, summed over the
// batch in sample order.
void weight_gradient(const Matrix& grad_z, const Matrix& x, Matrix& grad_w,
                     std::vector<double>& grad_b);

// Number of i in [0, n) with |sigma * rng.normal(i)| > threshold.
std::uint64_t count_outside(double sigma, double threshold, const CounterRng& rng,
                            std::uint64_t n);

namespace serial {

Matrix affine(const Matrix& x, const Matrix& w, std::span<const double> bias);
Matrix activate(const ActivationSpec& spec, const Matrix& z);
Matrix activate_backward(const ActivationSpec& spec, const Matrix& z, const Matrix& grad_a);
Matrix backprop_input(const Matrix& grad_z, const Matrix& w);
void weight_gradient(const Matrix& grad_z, const Matrix& x, Matrix& grad_w,
                     std::vector<double>& grad_b);
std::uint64_t count_outside(double sigma, double threshold, const CounterRng& rng,
                            std::uint64_t n);

}  // namespace serial

// Caps the OpenMP worker count; 0 leaves the runtime default.
void set_thread_limit(int threads);
int max_threads();

}  // namespace rcraf::kernels

#endif  // RCRAF_KERNELS_HPP_
