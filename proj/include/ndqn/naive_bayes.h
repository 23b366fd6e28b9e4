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

#ifndef NDQN_NAIVE_BAYES_H_
#define NDQN_NAIVE_BAYES_H_

#include <cstddef>
#include <span>
#include <vector>

namespace ndqn {

struct NbExample {
  std::vector<double> features;  // > 0 means the word is present
  std::size_t label = 0;
};

// Multinomial naive Bayes over binarised word features with add-alpha
// smoothing. Classes never seen in training get probability zero.
class NaiveBayes {
 public:
  NaiveBayes() = default;

  // Throws TrainingError on an empty corpus and InputError on a label or
  // feature size out of range.
  static NaiveBayes Train(std::span<const NbExample> data,
                          std::size_t num_classes, std::size_t num_features,
                          double alpha = 1.0);

  std::size_t num_classes() const { return log_prior_.size(); }
  std::size_t num_features() const { return num_features_; }
  bool Observed(std::size_t cls) const { return counts_.at(cls) > 0; }
  std::size_t count(std::size_t cls) const { return counts_.at(cls); }

  // Unnormalised log scores; -inf for unseen classes.
  std::vector<double> LogJoint(std::span<const double> x) const;
  // Normalised posterior, sums to one.
  std::vector<double> Posterior(std::span<const double> x) const;

 private:
  std::size_t num_features_ = 0;
  std::vector<std::size_t> counts_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_likelihood_;  // [class][feature]
};

}  // namespace ndqn

#endif  // NDQN_NAIVE_BAYES_H_
