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

#ifndef RCRAF_NET_HPP_
#define RCRAF_NET_HPP_

// Fully connected classifier with hand-written backpropagation.
//
// Hidden layers compute a = activation(W x + b); the last layer is affine
// and produces logits. The loss is mean softmax cross-entropy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rcraf/activation.hpp"
#include "rcraf/data.hpp"
#include "rcraf/matrix.hpp"

namespace rcraf {

struct NetworkSpec {
  std::vector<std::size_t> widths;  // d_0 (inputs) ... d_L (classes)
  ActivationSpec activation;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t layer_count() const { return widths.size() - 1; }
  bool operator==(const NetworkSpec&) const = default;
};

struct DenseLayer {
  Matrix weights;             // d_out x d_in
  std::vector<double> bias;   // d_out

  bool operator==(const DenseLayer&) const = default;
};

class DenseNetwork {
 public:
  // All-zero parameters with shapes from `spec`.
  explicit DenseNetwork(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t input_width() const { return spec_.widths.front(); }
  std::size_t num_classes() const { return spec_.widths.back(); }

  bool operator==(const DenseNetwork&) const = default;

 private:
  NetworkSpec spec_;
  std::vector<DenseLayer> layers_;
};

// Weights ~ N(0, 2 / d_in), zero biases, drawn from the spec's seed.
DenseNetwork init_network(const NetworkSpec& spec);

// Cached intermediate values of one batch.
struct ForwardPass {
  std::vector<Matrix> inputs;  // input to layer i (inputs[0] is the batch)
  std::vector<Matrix> pre;     // z_i = W_i inputs[i] + b_i; pre.back() is the logits

  const Matrix& logits() const { return pre.back(); }
};

ForwardPass forward(const DenseNetwork& net, const Matrix& batch);
Matrix logits(const DenseNetwork& net, const Matrix& batch);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const DenseNetwork& net);
};

struct LossGradients {
  double loss = 0.0;
  Gradients params;
};

// Mean cross-entropy; writes d loss / d logits into grad when non-null.
// Throws std::domain_error for a bad label, std::runtime_error for
// non-finite logits.
double softmax_cross_entropy(const Matrix& logits, std::span<const int> labels,
                             Matrix* grad = nullptr);

// Cross-entropy of each sample separately.
std::vector<double> per_sample_loss(const DenseNetwork& net, const Matrix& batch,
                                    std::span<const int> labels);

double mean_loss(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels);

LossGradients loss_and_backward(const DenseNetwork& net, const Matrix& batch,
                                std::span<const int> labels);

// d mean-loss / d batch.
Matrix input_gradient(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::optional<double> ema_decay;
  std::uint64_t seed = 0;

  void validate() const;
};

struct OptimizerState {
  Gradients velocity;
  std::optional<DenseNetwork> ema;

  OptimizerState(const DenseNetwork& net, const TrainConfig& cfg);
};

// v <- momentum v + g; W <- W - lr v, with decoupled decay W <- W - lr wd W
// on weights (not biases) and an optional EMA shadow copy.
void sgd_step(DenseNetwork& net, const Gradients& grads, const TrainConfig& cfg,
              OptimizerState& state);

// Argmax of each logits row, lowest index on ties.
std::vector<int> predict(const DenseNetwork& net, const Matrix& batch);

double evaluate_accuracy(const DenseNetwork& net, const Dataset& data);
double accuracy(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels);

struct LayerSparsity {
  double fraction;  // pre-activations in the zero-gradient region
  double sigma;     // sample std-dev of the layer's pre-activations
};

// One entry per hidden layer. RCR-AF counts |z| >= gamma/alpha, ReLU counts
// z <= 0; other activations throw std::domain_error.
std::vector<LayerSparsity> activation_sparsity(const DenseNetwork& net, const Matrix& batch);

}  // namespace rcraf

#endif  // RCRAF_NET_HPP_
