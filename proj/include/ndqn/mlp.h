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

#ifndef NDQN_MLP_H_
#define NDQN_MLP_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ndqn {

enum class Activation { kRelu, kTanh };
enum class LossKind { kSquaredError, kHinge };

std::string ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

struct TrainConfig {
  double learning_rate = 0.01;
  double l2_decay = 0.0;
  std::uint64_t rng_seed = 0;
};

// One supervised example. `mask` selects which output units contribute to
// the loss; for Q-learning only the taken action is unmasked. For the hinge
// loss `target` holds +1 for the true class and -1 elsewhere.
struct Sample {
  std::vector<double> input;
  std::vector<double> target;
  std::vector<double> mask;
};

// Dense layer, weights stored row-major with shape out x in.
struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double w(std::size_t row, std::size_t col) const {
    return weights[row * in + col];
  }

  friend bool operator==(const Layer&, const Layer&) = default;
};

// Gradients of the mean masked loss, laid out like the network's layers.
struct Gradients {
  double loss = 0.0;
  std::vector<Layer> layers;
};

// Fully connected network: hidden layers use `activation`, output is linear.
class Network {
 public:
  Network() = default;
  // All weights and biases zero.
  Network(std::vector<std::size_t> dims, Activation activation);

  // Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static Network Init(std::vector<std::size_t> dims, Activation activation,
                      std::uint64_t seed);

  std::vector<double> Forward(std::span<const double> x) const;

  // Mean masked loss over the batch and its gradient, without updating.
  Gradients ComputeGradients(std::span<const Sample> batch,
                             LossKind loss) const;

  // One minibatch SGD step; returns the mean masked loss before the update.
  double SgdStep(std::span<const Sample> batch, const TrainConfig& config,
                 LossKind loss);

  // Copies weights from `src`; throws InputError on architecture mismatch.
  void CopyWeightsFrom(const Network& src);

  bool SameArchitecture(const Network& other) const;

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  Activation activation() const { return activation_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  // Text checkpoint; see docs/checkpoints.md.
  void Save(std::ostream& out) const;
  static Network Load(std::istream& in);
  void SaveToFile(const std::string& path) const;
  static Network LoadFromFile(const std::string& path);

  friend bool operator==(const Network& a, const Network& b) = default;

 private:
  void CheckInput(std::span<const double> x) const;

  std::vector<std::size_t> dims_;
  Activation activation_ = Activation::kRelu;
  std::vector<Layer> layers_;
};

// Free-function spellings used throughout the controller code.
inline Network InitNetwork(std::vector<std::size_t> dims, Activation activation,
                           std::uint64_t seed) {
  return Network::Init(std::move(dims), activation, seed);
}
void CloneWeights(const Network& src, Network& dst);

}  // namespace ndqn

#endif  // NDQN_MLP_H_
