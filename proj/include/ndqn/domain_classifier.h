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

#ifndef NDQN_DOMAIN_CLASSIFIER_H_
#define NDQN_DOMAIN_CLASSIFIER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ndqn/dialogue_env.h"
#include "ndqn/dqn_agent.h"
#include "ndqn/mlp.h"

namespace ndqn {

struct DomainExample {
  std::vector<double> features;  // hit-or-miss: 0 or 1
  std::size_t label = 0;         // registry index
};

struct DomainDataset {
  std::vector<DomainExample> train;
  std::vector<DomainExample> test;
};

// Binarises a state vector: 1 where the word was observed.
std::vector<double> HitOrMiss(const StateVector& s);

// Plays scripted dialogues against a noisy simulated user and labels each
// observation with the domain that should act next. Returns n examples
// split 60/40 into train and test after a seeded shuffle.
DomainDataset GenerateDomainDataset(const FixtureSet& fx, const ActionPrior& prior,
                                    const FeatureSpace& space, std::size_t n,
                                    Rng& rng);

struct ClassifierConfig {
  int epochs = 180;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::vector<std::size_t> hidden = {80, 80};
  std::uint64_t seed = 1;
};

// Two tanh hidden layers with a one-vs-rest hinge output.
class DomainClassifier {
 public:
  DomainClassifier() = default;
  DomainClassifier(std::size_t input_size, std::size_t classes,
                   const ClassifierConfig& config);
  explicit DomainClassifier(Network net) : net_(std::move(net)) {}

  // One pass over `data` in a shuffled order; returns the mean hinge loss.
  double TrainEpoch(std::span<const DomainExample> data, Rng& rng);

  std::vector<double> Scores(std::span<const double> x) const {
    return net_.Forward(x);
  }
  std::size_t Predict(std::span<const double> x) const;
  // Best score minus runner-up.
  double Margin(std::span<const double> x) const;
  double Accuracy(std::span<const DomainExample> data) const;

  std::size_t input_size() const { return net_.input_size(); }
  std::size_t classes() const { return net_.output_size(); }
  const Network& network() const { return net_; }

 private:
  Network net_;
  ClassifierConfig config_;
};

struct ClassifierReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  int epochs = 0;
};

// Trains for config.epochs and reports accuracies. Throws TrainingError
// when held-out accuracy is below 0.5, which points at a data or
// configuration bug rather than a hard problem.
DomainClassifier TrainDomainClassifier(const DomainDataset& data,
                                       std::size_t classes,
                                       const ClassifierConfig& config,
                                       ClassifierReport* report = nullptr);

}  // namespace ndqn

#endif  // NDQN_DOMAIN_CLASSIFIER_H_
