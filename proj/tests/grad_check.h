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

#ifndef NDQN_TESTS_GRAD_CHECK_H_
#define NDQN_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ndqn/mlp.h"

namespace ndqn {

// Straight-line forward pass used as an oracle for Network::Forward.
inline std::vector<double> ReferenceForward(const Network& net,
                                     const std::vector<double>& x) {
  std::vector<double> a = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<double> z(layers[l].out);
    for (std::size_t r = 0; r < layers[l].out; ++r) {
      double s = layers[l].biases[r];
      for (std::size_t c = 0; c < layers[l].in; ++c) {
        s += layers[l].weights[r * layers[l].in + c] * a[c];
      }
      if (l + 1 < layers.size()) {
        s = net.activation() == Activation::kRelu ? std::max(0.0, s)
                                                  : std::tanh(s);
      }
      z[r] = s;
    }
    a = z;
  }
  return a;
}

inline double ReferenceLoss(const Network& net, const std::vector<Sample>& batch,
                     LossKind kind) {
  double total = 0.0;
  for (const Sample& s : batch) {
    std::vector<double> out = ReferenceForward(net, s.input);
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (s.mask[k] == 0.0) continue;
      if (kind == LossKind::kSquaredError) {
        total += s.mask[k] * (out[k] - s.target[k]) * (out[k] - s.target[k]);
      } else {
        total += s.mask[k] * std::max(0.0, 1.0 - s.target[k] * out[k]);
      }
    }
  }
  return total / static_cast<double>(batch.size());
}

inline std::vector<Sample> RandomBatch(std::mt19937_64& rng, LossKind kind,
                                std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Sample> batch(n);
  for (Sample& s : batch) {
    s.input = {u(rng), u(rng), u(rng)};
    if (kind == LossKind::kSquaredError) {
      s.target = {u(rng), u(rng)};
      s.mask = {1.0, rng() % 2 ? 1.0 : 0.0};
    } else {
      const bool first = rng() % 2;
      s.target = {first ? 1.0 : -1.0, first ? -1.0 : 1.0};
      s.mask = {1.0, 1.0};
    }
  }
  return batch;
}

// Max |analytic - central difference| over every weight and bias.
inline double MaxGradientError(LossKind kind, std::uint64_t seed,
                        Activation activation) {
  std::mt19937_64 rng(seed);
  Network net = Network::Init({3, 4, 4, 2}, activation, seed);
  // Nonzero biases keep relu pre-activations off the kink at exactly zero.
  std::uniform_real_distribution<double> bias(0.05, 0.3);
  for (Layer& layer : net.mutable_layers()) {
    for (double& b : layer.biases) b = rng() % 2 ? bias(rng) : -bias(rng);
  }
  std::vector<Sample> batch = RandomBatch(rng, kind, 5);
  Gradients g = net.ComputeGradients(batch, kind);
  const double eps = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto check = [&](std::vector<double>& params,
                     const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double up = ReferenceLoss(net, batch, kind);
        params[i] = saved - eps;
        const double down = ReferenceLoss(net, batch, kind);
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        worst = std::max(worst, std::abs(numeric - analytic[i]));
      }
    };
    check(net.mutable_layers()[l].weights, g.layers[l].weights);
    check(net.mutable_layers()[l].biases, g.layers[l].biases);
  }
  return worst;
}

}  // namespace ndqn

#endif  // NDQN_TESTS_GRAD_CHECK_H_
