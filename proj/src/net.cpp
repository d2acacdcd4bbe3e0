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

#include "rcraf/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcraf/kernels.hpp"
#include "rcraf/random.hpp"

namespace rcraf {
namespace {

void check_batch(const DenseNetwork& net, const Matrix& batch) {
  if (batch.cols() != net.input_width()) {
    throw std::domain_error("network expects " + std::to_string(net.input_width()) +
                            " input features, batch has " + std::to_string(batch.cols()));
  }
}

void check_labels(std::size_t rows, std::size_t classes, std::span<const int> labels) {
  if (labels.size() != rows) throw std::domain_error("label count does not match batch");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw std::domain_error("label " + std::to_string(y) + " out of range");
    }
  }
}

void check_finite_logits(const Matrix& logits) {
  for (double v : logits.values()) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite logits; training diverged");
  }
}

// Returns d loss / d inputs[0] when want_input; fills params when non-null.
Matrix backward(const DenseNetwork& net, const ForwardPass& pass, Matrix grad_z,
                Gradients* params, bool want_input) {
  const auto& layers = net.layers();
  const std::size_t count = layers.size();
  Matrix grad_input;
  for (std::size_t i = count; i-- > 0;) {
    if (params) {
      kernels::weight_gradient(grad_z, pass.inputs[i], params->weights[i], params->biases[i]);
    }
    if (i == 0 && !want_input) break;
    Matrix grad_a = kernels::backprop_input(grad_z, layers[i].weights);
    if (i == 0) {
      grad_input = std::move(grad_a);
      break;
    }
    grad_z = kernels::activate_backward(net.spec().activation, pass.pre[i - 1], grad_a);
  }
  return grad_input;
}

}  // namespace

void NetworkSpec::validate() const {
  if (widths.size() < 2) throw std::domain_error("NetworkSpec: need at least two widths");
  for (std::size_t w : widths) {
    if (w < 1) throw std::domain_error("NetworkSpec: widths must be >= 1");
  }
  activation.validate();
}

DenseNetwork::DenseNetwork(NetworkSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (std::size_t i = 0; i + 1 < spec_.widths.size(); ++i) {
    layers_.push_back({Matrix(spec_.widths[i + 1], spec_.widths[i]),
                       std::vector<double>(spec_.widths[i + 1], 0.0)});
  }
}

DenseNetwork init_network(const NetworkSpec& spec) {
  DenseNetwork net(spec);
  const CounterRng base(spec.seed, Stream::kInit);
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    auto& w = net.layers()[i].weights;
    const CounterRng rng = base.split(i);
    const double scale = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (std::size_t k = 0; k < w.size(); ++k) w.values()[k] = scale * rng.normal(k);
  }
  return net;
}

ForwardPass forward(const DenseNetwork& net, const Matrix& batch) {
  check_batch(net, batch);
  ForwardPass pass;
  const auto& layers = net.layers();
  pass.inputs.reserve(layers.size());
  pass.pre.reserve(layers.size());
  pass.inputs.push_back(batch);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    pass.pre.push_back(kernels::affine(pass.inputs.back(), layers[i].weights, layers[i].bias));
    if (i + 1 < layers.size()) {
      pass.inputs.push_back(kernels::activate(net.spec().activation, pass.pre.back()));
    }
  }
  return pass;
}

Matrix logits(const DenseNetwork& net, const Matrix& batch) {
  return std::move(forward(net, batch).pre.back());
}

Gradients Gradients::zeros_like(const DenseNetwork& net) {
  Gradients g;
  for (const auto& layer : net.layers()) {
    g.weights.emplace_back(layer.weights.rows(), layer.weights.cols());
    g.biases.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

double softmax_cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix* grad) {
  check_labels(logits.rows(), logits.cols(), labels);
  check_finite_logits(logits);
  const std::size_t n = logits.rows();
  if (grad) *grad = Matrix(n, logits.cols());
  double total = 0.0;
  std::vector<double> exps(logits.cols());
  for (std::size_t s = 0; s < n; ++s) {
    const auto row = logits.row(s);
    const double shift = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      exps[k] = std::exp(row[k] - shift);
      sum += exps[k];
    }
    total += std::log(sum) + shift - row[labels[s]];
    if (grad) {
      auto g = grad->row(s);
      for (std::size_t k = 0; k < row.size(); ++k) {
        g[k] = (exps[k] / sum - (static_cast<int>(k) == labels[s] ? 1.0 : 0.0)) /
               static_cast<double>(n);
      }
    }
  }
  return total / static_cast<double>(n);
}

std::vector<double> per_sample_loss(const DenseNetwork& net, const Matrix& batch,
                                    std::span<const int> labels) {
  const Matrix z = logits(net, batch);
  check_labels(z.rows(), z.cols(), labels);
  check_finite_logits(z);
  std::vector<double> out(z.rows());
  for (std::size_t s = 0; s < z.rows(); ++s) {
    const auto row = z.row(s);
    const double shift = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - shift);
    out[s] = std::log(sum) + shift - row[labels[s]];
  }
  return out;
}

double mean_loss(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels) {
  return softmax_cross_entropy(logits(net, batch), labels);
}

LossGradients loss_and_backward(const DenseNetwork& net, const Matrix& batch,
                                std::span<const int> labels) {
  const ForwardPass pass = forward(net, batch);
  Matrix grad_logits;
  LossGradients out;
  out.loss = softmax_cross_entropy(pass.logits(), labels, &grad_logits);
  out.params = Gradients::zeros_like(net);
  backward(net, pass, std::move(grad_logits), &out.params, false);
  return out;
}

Matrix input_gradient(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels) {
  const ForwardPass pass = forward(net, batch);
  Matrix grad_logits;
  softmax_cross_entropy(pass.logits(), labels, &grad_logits);
  return backward(net, pass, std::move(grad_logits), nullptr, true);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::domain_error("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::domain_error("TrainConfig: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::domain_error("TrainConfig: learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::domain_error("TrainConfig: momentum must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw std::domain_error("TrainConfig: weight_decay must be >= 0");
  if (ema_decay && !(*ema_decay > 0.0 && *ema_decay < 1.0)) {
    throw std::domain_error("TrainConfig: ema_decay must lie in (0, 1)");
  }
}

OptimizerState::OptimizerState(const DenseNetwork& net, const TrainConfig& cfg)
    : velocity(Gradients::zeros_like(net)) {
  if (cfg.ema_decay) ema = net;
}

void sgd_step(DenseNetwork& net, const Gradients& grads, const TrainConfig& cfg,
              OptimizerState& state) {
  auto& layers = net.layers();
  if (grads.weights.size() != layers.size() || grads.biases.size() != layers.size()) {
    throw std::domain_error("sgd_step: gradient layer count mismatch");
  }
  const double lr = cfg.learning_rate;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto w = layers[i].weights.values();
    const auto gw = grads.weights[i].values();
    auto vw = state.velocity.weights[i].values();
    if (gw.size() != w.size() || grads.biases[i].size() != layers[i].bias.size()) {
      throw std::domain_error("sgd_step: gradient shape mismatch");
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (cfg.weight_decay > 0.0) w[k] -= lr * cfg.weight_decay * w[k];
      vw[k] = cfg.momentum * vw[k] + gw[k];
      w[k] -= lr * vw[k];
    }
    auto& b = layers[i].bias;
    auto& vb = state.velocity.biases[i];
    for (std::size_t k = 0; k < b.size(); ++k) {
      vb[k] = cfg.momentum * vb[k] + grads.biases[i][k];
      b[k] -= lr * vb[k];
    }
  }
  if (state.ema && cfg.ema_decay) {
    const double d = *cfg.ema_decay;
    auto& shadow = state.ema->layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto sw = shadow[i].weights.values();
      const auto w = layers[i].weights.values();
      for (std::size_t k = 0; k < w.size(); ++k) sw[k] = d * sw[k] + (1.0 - d) * w[k];
      auto& sb = shadow[i].bias;
      for (std::size_t k = 0; k < sb.size(); ++k) sb[k] = d * sb[k] + (1.0 - d) * layers[i].bias[k];
    }
  }
}

std::vector<int> predict(const DenseNetwork& net, const Matrix& batch) {
  const Matrix z = logits(net, batch);
  check_finite_logits(z);
  std::vector<int> out(z.rows());
  for (std::size_t s = 0; s < z.rows(); ++s) {
    const auto row = z.row(s);
    // max_element returns the first maximum.
    out[s] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double accuracy(const DenseNetwork& net, const Matrix& batch, std::span<const int> labels) {
  if (batch.rows() == 0) throw std::domain_error("accuracy: empty batch");
  if (labels.size() != batch.rows()) throw std::domain_error("accuracy: label count mismatch");
  const std::vector<int> pred = predict(net, batch);
  std::size_t correct = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) correct += pred[s] == labels[s] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double evaluate_accuracy(const DenseNetwork& net, const Dataset& data) {
  return accuracy(net, data.features(), data.labels());
}

std::vector<LayerSparsity> activation_sparsity(const DenseNetwork& net, const Matrix& batch) {
  const ActivationSpec& act = net.spec().activation;
  if (act.kind != ActivationKind::kRcrAf && act.kind != ActivationKind::kRelu) {
    throw std::domain_error("activation_sparsity: activation has no zero-gradient region");
  }
  if (batch.rows() == 0) throw std::domain_error("activation_sparsity: empty batch");
  const ForwardPass pass = forward(net, batch);
  std::vector<LayerSparsity> out;
  for (std::size_t i = 0; i + 1 < pass.pre.size(); ++i) {
    const auto z = pass.pre[i].values();
    std::size_t hits = 0;
    double mean = 0.0;
    for (double v : z) {
      const bool dead = act.kind == ActivationKind::kRcrAf ? std::abs(v) >= act.clip_bound() : v <= 0.0;
      hits += dead ? 1 : 0;
      mean += v;
    }
    mean /= static_cast<double>(z.size());
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sigma = z.size() > 1 ? std::sqrt(ss / static_cast<double>(z.size() - 1)) : 0.0;
    out.push_back({static_cast<double>(hits) / static_cast<double>(z.size()), sigma});
  }
  return out;
}

}  // namespace rcraf
