// Copyright 2026 The NDQN Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ndqn/mlp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

double Activate(Activation activation, double v) {
  return activation == Activation::kRelu ? (v > 0.0 ? v : 0.0) : std::tanh(v);
}

// Derivative expressed in terms of the activated value.
double ActivateGrad(Activation activation, double activated) {
  if (activation == Activation::kRelu) return activated > 0.0 ? 1.0 : 0.0;
  return 1.0 - activated * activated;
}

void ValidateDims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 3) {
    throw ConfigError("network needs an input, at least one hidden and an "
                      "output layer; got " + std::to_string(dims.size()) +
                      " dims");
  }
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("layer sizes must be positive");
  }
}

}  // namespace

std::string ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + name + "'");
}

Network::Network(std::vector<std::size_t> dims, Activation activation)
    : dims_(std::move(dims)), activation_(activation) {
  ValidateDims(dims_);
  layers_.resize(dims_.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.weights.assign(layer.in * layer.out, 0.0);
    layer.biases.assign(layer.out, 0.0);
  }
}

Network Network::Init(std::vector<std::size_t> dims, Activation activation,
                      std::uint64_t seed) {
  Network net(std::move(dims), activation);
  std::mt19937_64 rng(seed);
  for (Layer& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weights) w = dist(rng);
  }
  return net;
}

void Network::CheckInput(std::span<const double> x) const {
  if (layers_.empty()) throw InputError("forward on an empty network");
  if (x.size() != input_size()) {
    throw InputError("input has " + std::to_string(x.size()) +
                     " entries, network expects " +
                     std::to_string(input_size()));
  }
}

std::vector<double> Network::Forward(std::span<const double> x) const {
  CheckInput(x);
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const bool hidden = l + 1 < layers_.size();
    next.assign(layer.biases.begin(), layer.biases.end());
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* row = &layer.weights[r * layer.in];
      double sum = next[r];
      for (std::size_t c = 0; c < layer.in; ++c) sum += row[c] * current[c];
      next[r] = hidden ? Activate(activation_, sum) : sum;
    }
    current.swap(next);
  }
  return current;
}

Gradients Network::ComputeGradients(std::span<const Sample> batch,
                                    LossKind loss) const {
  if (batch.empty()) throw InputError("empty batch");
  Gradients grads;
  grads.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    grads.layers[l].in = layers_[l].in;
    grads.layers[l].out = layers_[l].out;
    grads.layers[l].weights.assign(layers_[l].weights.size(), 0.0);
    grads.layers[l].biases.assign(layers_[l].biases.size(), 0.0);
  }

  const double scale = 1.0 / static_cast<double>(batch.size());
  // activations[0] is the input, activations[l + 1] the output of layer l.
  std::vector<std::vector<double>> activations(layers_.size() + 1);
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double total_loss = 0.0;

  for (const Sample& sample : batch) {
    CheckInput(sample.input);
    if (sample.target.size() != output_size() ||
        sample.mask.size() != output_size()) {
      throw InputError("target/mask size does not match network output");
    }
    activations[0].assign(sample.input.begin(), sample.input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Layer& layer = layers_[l];
      const bool hidden = l + 1 < layers_.size();
      const std::vector<double>& in = activations[l];
      std::vector<double>& out = activations[l + 1];
      out.resize(layer.out);
      for (std::size_t r = 0; r < layer.out; ++r) {
        const double* row = &layer.weights[r * layer.in];
        double sum = layer.biases[r];
        for (std::size_t c = 0; c < layer.in; ++c) sum += row[c] * in[c];
        out[r] = hidden ? Activate(activation_, sum) : sum;
      }
    }

    const std::vector<double>& output = activations.back();
    delta.assign(output.size(), 0.0);
    for (std::size_t k = 0; k < output.size(); ++k) {
      if (sample.mask[k] == 0.0) continue;
      if (loss == LossKind::kSquaredError) {
        const double diff = output[k] - sample.target[k];
        total_loss += sample.mask[k] * diff * diff;
        delta[k] = sample.mask[k] * 2.0 * diff * scale;
      } else {
        const double margin = 1.0 - sample.target[k] * output[k];
        if (margin > 0.0) {
          total_loss += sample.mask[k] * margin;
          delta[k] = -sample.mask[k] * sample.target[k] * scale;
        }
      }
    }

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Layer& layer = layers_[l];
      Layer& grad = grads.layers[l];
      const std::vector<double>& in = activations[l];
      for (std::size_t r = 0; r < layer.out; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        grad.biases[r] += d;
        double* grow = &grad.weights[r * layer.in];
        for (std::size_t c = 0; c < layer.in; ++c) grow[c] += d * in[c];
      }
      if (l == 0) break;
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t r = 0; r < layer.out; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        const double* row = &layer.weights[r * layer.in];
        for (std::size_t c = 0; c < layer.in; ++c) prev_delta[c] += d * row[c];
      }
      for (std::size_t c = 0; c < layer.in; ++c) {
        prev_delta[c] *= ActivateGrad(activation_, in[c]);
      }
      delta.swap(prev_delta);
    }
  }
  grads.loss = total_loss * scale;
  return grads;
}

double Network::SgdStep(std::span<const Sample> batch,
                        const TrainConfig& config, LossKind loss) {
  Gradients grads = ComputeGradients(batch, loss);
  const double lr = config.learning_rate;
  if (lr == 0.0) return grads.loss;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    const Layer& grad = grads.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights[i] -=
          lr * (grad.weights[i] + config.l2_decay * layer.weights[i]);
    }
    for (std::size_t i = 0; i < layer.biases.size(); ++i) {
      layer.biases[i] -= lr * grad.biases[i];
    }
  }
  return grads.loss;
}

bool Network::SameArchitecture(const Network& other) const {
  return dims_ == other.dims_ && activation_ == other.activation_;
}

void Network::CopyWeightsFrom(const Network& src) {
  if (!SameArchitecture(src)) {
    throw InputError("cannot clone weights between different architectures");
  }
  layers_ = src.layers_;
}

void CloneWeights(const Network& src, Network& dst) { dst.CopyWeightsFrom(src); }

// Format:
//   ndqn-mlp 1
//   activation <relu|tanh>
//   dims <n> <d0> ... <dn-1>
//   then per layer: `out` lines of `in` weights, one line of biases.
void Network::Save(std::ostream& out) const {
  out << "ndqn-mlp 1\n";
  out << "activation " << ActivationName(activation_) << "\n";
  out << "dims " << dims_.size();
  for (std::size_t d : dims_) out << ' ' << d;
  out << "\n" << std::setprecision(17);
  for (const Layer& layer : layers_) {
    for (std::size_t r = 0; r < layer.out; ++r) {
      for (std::size_t c = 0; c < layer.in; ++c) {
        if (c) out << ' ';
        out << layer.w(r, c);
      }
      out << '\n';
    }
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (r) out << ' ';
      out << layer.biases[r];
    }
    out << '\n';
  }
}

Network Network::Load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "ndqn-mlp" || version != 1) {
    throw InputError("not an ndqn-mlp checkpoint");
  }
  std::string key;
  std::string act_name;
  in >> key >> act_name;
  if (key != "activation") throw InputError("checkpoint: expected activation");
  std::size_t count = 0;
  in >> key >> count;
  if (key != "dims" || count > 64) throw InputError("checkpoint: bad dims");
  std::vector<std::size_t> dims(count);
  for (std::size_t& d : dims) in >> d;
  if (!in) throw InputError("checkpoint: truncated header");
  Network net(dims, ParseActivation(act_name));
  for (Layer& layer : net.layers_) {
    for (double& w : layer.weights) in >> w;
    for (double& b : layer.biases) in >> b;
  }
  if (!in) throw InputError("checkpoint: truncated weights");
  return net;
}

void Network::SaveToFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  Save(out);
}

Network Network::LoadFromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  return Load(in);
}

}  // namespace ndqn
