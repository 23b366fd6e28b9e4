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

#ifndef NDQN_DQN_AGENT_H_
#define NDQN_DQN_AGENT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ndqn/mlp.h"

namespace ndqn {

using Rng = std::mt19937_64;
using ActionIndex = std::size_t;

struct Transition {
  std::vector<double> state;
  ActionIndex action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  // Actions valid in next_state; empty means every action.
  std::vector<ActionIndex> next_valid;
};

// Bounded FIFO of transitions; the oldest entry is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void Add(Transition t);
  // Uniform sampling with replacement.
  std::vector<const Transition*> Sample(std::size_t count, Rng& rng) const;

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> buffer_;
  std::size_t head_ = 0;  // next slot to overwrite once full
};

struct AgentHyperparams {
  std::size_t replay_capacity = 10000;
  std::size_t burning_steps = 1000;
  double discount = 0.7;
  double epsilon_start = 1.0;
  double epsilon_min = 0.001;
  std::size_t batch_size = 32;
  std::size_t learning_steps = 30000;
  std::size_t target_sync_period = 1000;
  double learning_rate = 0.01;
  std::vector<std::size_t> hidden = {80, 80};

  void Validate() const;
};

class DqnAgent {
 public:
  DqnAgent(std::size_t state_size, std::size_t action_count,
           AgentHyperparams hyper, std::uint64_t seed);

  // Epsilon-greedy over `valid` only; greedy ties go to the lowest index.
  ActionIndex SelectAction(std::span<const double> state,
                           std::span<const ActionIndex> valid, double epsilon,
                           Rng& rng) const;

  // r if terminal, else r + discount * max over next_valid of target Q(s').
  double QTarget(const Transition& t) const;

  void Remember(Transition t);

  // One minibatch update. Returns nullopt during burn-in.
  std::optional<double> TrainOnMinibatch(Rng& rng);

  // Linear anneal from epsilon_start to epsilon_min over learning_steps
  // experienced transitions, then constant.
  double Epsilon() const;
  static double AnnealedEpsilon(const AgentHyperparams& hyper,
                                std::size_t steps);

  std::vector<double> QValues(std::span<const double> state) const {
    return online_.Forward(state);
  }

  void SyncTarget() { target_.CopyWeightsFrom(online_); }

  const Network& online() const { return online_; }
  const Network& target() const { return target_; }
  Network& mutable_online() { return online_; }
  const ReplayMemory& memory() const { return memory_; }
  const AgentHyperparams& hyper() const { return hyper_; }
  std::size_t state_size() const { return online_.input_size(); }
  std::size_t action_count() const { return online_.output_size(); }
  std::size_t train_steps() const { return train_steps_; }
  std::size_t experience_steps() const { return experience_steps_; }

  // Writes <prefix>.net and <prefix>.meta.
  void Save(const std::string& prefix) const;
  // Restores weights and counters; replay memory starts empty.
  void Load(const std::string& prefix);

 private:
  AgentHyperparams hyper_;
  Network online_;
  Network target_;
  ReplayMemory memory_;
  std::size_t train_steps_ = 0;
  std::size_t experience_steps_ = 0;
};

}  // namespace ndqn

#endif  // NDQN_DQN_AGENT_H_
