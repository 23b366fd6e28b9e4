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

#include "ndqn/naive_bayes.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ndqn/errors.h"

namespace ndqn {

NaiveBayes NaiveBayes::Train(std::span<const NbExample> data,
                             std::size_t num_classes, std::size_t num_features,
                             double alpha) {
  if (data.empty()) throw TrainingError("naive Bayes needs at least one example");
  if (num_classes == 0 || num_features == 0) {
    throw InputError("naive Bayes needs classes and features");
  }
  if (!(alpha > 0)) throw InputError("smoothing alpha must be positive");
  NaiveBayes nb;
  nb.num_features_ = num_features;
  nb.counts_.assign(num_classes, 0);
  std::vector<std::vector<double>> word(num_classes,
                                        std::vector<double>(num_features, 0.0));
  for (const NbExample& ex : data) {
    if (ex.label >= num_classes) throw InputError("label out of range");
    if (ex.features.size() != num_features) throw InputError("feature size mismatch");
    ++nb.counts_[ex.label];
    for (std::size_t f = 0; f < num_features; ++f) {
      if (ex.features[f] > 0) word[ex.label][f] += 1.0;
    }
  }
  const double kNegInf = -std::numeric_limits<double>::infinity();
  nb.log_prior_.assign(num_classes, kNegInf);
  nb.log_likelihood_.assign(num_classes, std::vector<double>(num_features, 0.0));
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (nb.counts_[c] == 0) continue;
    nb.log_prior_[c] = std::log(static_cast<double>(nb.counts_[c]) / data.size());
    double total = 0;
    for (double w : word[c]) total += w;
    const double denom = total + alpha * num_features;
    for (std::size_t f = 0; f < num_features; ++f) {
      nb.log_likelihood_[c][f] = std::log((word[c][f] + alpha) / denom);
    }
  }
  return nb;
}

std::vector<double> NaiveBayes::LogJoint(std::span<const double> x) const {
  if (x.size() != num_features_) throw InputError("feature size mismatch");
  std::vector<double> out = log_prior_;
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (counts_[c] == 0) continue;
    for (std::size_t f = 0; f < num_features_; ++f) {
      if (x[f] > 0) out[c] += log_likelihood_[c][f];
    }
  }
  return out;
}

std::vector<double> NaiveBayes::Posterior(std::span<const double> x) const {
  std::vector<double> lj = LogJoint(x);
  const double top = *std::max_element(lj.begin(), lj.end());
  double z = 0;
  for (double& v : lj) {
    v = std::isinf(v) ? 0.0 : std::exp(v - top);
    z += v;
  }
  for (double& v : lj) v /= z;
  return lj;
}

}  // namespace ndqn
