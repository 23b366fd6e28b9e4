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

#include "ndqn/domain_classifier.h"

#include <algorithm>
#include <numeric>

#include "ndqn/errors.h"

namespace ndqn {

std::vector<double> HitOrMiss(const StateVector& s) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.values[i] > 0 ? 1.0 : 0.0;
  return out;
}

DomainDataset GenerateDomainDataset(const FixtureSet& fx, const ActionPrior& prior,
                                    const FeatureSpace& space, std::size_t n,
                                    Rng& rng) {
  DialogueEnv env(fx, prior);
  std::vector<DomainExample> all;
  all.reserve(n);
  while (all.size() < n) {
    env.Reset(rng);
    while (!env.state().terminal && all.size() < n) {
      StepResult r = env.Step(ScriptedAction(env), rng);
      if (r.terminal) break;
      all.push_back({HitOrMiss(space.Encode(r.observation)), ScriptedDomain(env).value});
    }
  }
  std::shuffle(all.begin(), all.end(), rng);
  DomainDataset data;
  const std::size_t cut = n * 6 / 10;
  data.train.assign(std::make_move_iterator(all.begin()),
                    std::make_move_iterator(all.begin() + cut));
  data.test.assign(std::make_move_iterator(all.begin() + cut),
                   std::make_move_iterator(all.end()));
  return data;
}

DomainClassifier::DomainClassifier(std::size_t input_size, std::size_t classes,
                                   const ClassifierConfig& config)
    : config_(config) {
  std::vector<std::size_t> dims = {input_size};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(classes);
  net_ = Network::Init(dims, Activation::kTanh, config.seed);
}

double DomainClassifier::TrainEpoch(std::span<const DomainExample> data, Rng& rng) {
  if (data.empty()) throw TrainingError("no training examples");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t k = net_.output_size();
  const std::size_t batch = std::max<std::size_t>(config_.batch_size, 1);
  TrainConfig train{config_.learning_rate, 0.0, 0};
  std::vector<Sample> samples;
  double loss = 0;
  std::size_t steps = 0;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    samples.clear();
    for (std::size_t i = start; i < std::min(order.size(), start + batch); ++i) {
      const DomainExample& ex = data[order[i]];
      if (ex.label >= k) throw InputError("label out of range");
      std::vector<double> target(k, -1.0);
      target[ex.label] = 1.0;
      samples.push_back({ex.features, std::move(target), std::vector<double>(k, 1.0)});
    }
    loss += net_.SgdStep(samples, train, LossKind::kHinge);
    ++steps;
  }
  return loss / steps;
}

std::size_t DomainClassifier::Predict(std::span<const double> x) const {
  const std::vector<double> s = Scores(x);
  return std::max_element(s.begin(), s.end()) - s.begin();
}

double DomainClassifier::Margin(std::span<const double> x) const {
  std::vector<double> s = Scores(x);
  if (s.size() < 2) return 0.0;
  std::partial_sort(s.begin(), s.begin() + 2, s.end(), std::greater<>());
  return s[0] - s[1];
}

double DomainClassifier::Accuracy(std::span<const DomainExample> data) const {
  if (data.empty()) return 0.0;
  std::size_t right = 0;
  for (const DomainExample& ex : data) right += Predict(ex.features) == ex.label;
  return static_cast<double>(right) / data.size();
}

DomainClassifier TrainDomainClassifier(const DomainDataset& data,
                                       std::size_t classes,
                                       const ClassifierConfig& config,
                                       ClassifierReport* report) {
  if (data.train.empty()) throw TrainingError("empty training split");
  DomainClassifier clf(data.train.front().features.size(), classes, config);
  Rng rng(config.seed);
  for (int e = 0; e < config.epochs; ++e) clf.TrainEpoch(data.train, rng);
  ClassifierReport r{clf.Accuracy(data.train), clf.Accuracy(data.test), config.epochs};
  if (report) *report = r;
  if (!data.test.empty() && r.test_accuracy < 0.5) {
    throw TrainingError("domain classifier held-out accuracy " +
                        std::to_string(r.test_accuracy) +
                        " is below 0.5; check the dataset and configuration");
  }
  return clf;
}

}  // namespace ndqn
