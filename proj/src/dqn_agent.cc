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

#include "ndqn/dqn_agent.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ndqn/errors.h"

namespace ndqn {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayMemory::Add(Transition t) {
  if (!std::isfinite(t.reward)) throw InputError("non-finite reward");
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
    return;
  }
  buffer_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayMemory::at(std::size_t i) const {
  if (i >= buffer_.size()) throw InputError("replay index out of range");
  return buffer_[(head_ + i) % buffer_.size()];
}

std::vector<const Transition*> ReplayMemory::Sample(std::size_t count,
                                                    Rng& rng) const {
  if (buffer_.empty()) throw InputError("sampling from empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
  std::vector<const Transition*> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(&buffer_[pick(rng)]);
  return out;
}

void AgentHyperparams::Validate() const {
  if (!(0.0 <= epsilon_min && epsilon_min <= epsilon_start &&
        epsilon_start <= 1.0)) {
    throw ConfigError("need 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (!(0.0 <= discount && discount < 1.0)) {
    throw ConfigError("discount must be in [0, 1)");
  }
  if (batch_size == 0 || target_sync_period == 0) {
    throw ConfigError("batch size and target sync period must be positive");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
}

DqnAgent::DqnAgent(std::size_t state_size, std::size_t action_count,
                   AgentHyperparams hyper, std::uint64_t seed)
    : hyper_(std::move(hyper)), memory_(hyper_.replay_capacity) {
  hyper_.Validate();
  std::vector<std::size_t> dims = {state_size};
  dims.insert(dims.end(), hyper_.hidden.begin(), hyper_.hidden.end());
  dims.push_back(action_count);
  online_ = Network::Init(dims, Activation::kRelu, seed);
  target_ = online_;
}

ActionIndex DqnAgent::SelectAction(std::span<const double> state,
                                   std::span<const ActionIndex> valid,
                                   double epsilon, Rng& rng) const {
  if (valid.empty()) throw EnvironmentError("no valid actions to choose from");
  for (ActionIndex a : valid) {
    if (a >= action_count()) throw EnvironmentError("valid action out of range");
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (epsilon > 0.0 && coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
    return valid[pick(rng)];
  }
  const std::vector<double> q = online_.Forward(state);
  ActionIndex best = valid.front();
  for (ActionIndex a : valid) {
    if (q[a] > q[best] || (q[a] == q[best] && a < best)) best = a;
  }
  return best;
}

double DqnAgent::QTarget(const Transition& t) const {
  if (t.terminal) return t.reward;
  const std::vector<double> q = target_.Forward(t.next_state);
  double best = -std::numeric_limits<double>::infinity();
  if (t.next_valid.empty()) {
    best = *std::max_element(q.begin(), q.end());
  } else {
    for (ActionIndex a : t.next_valid) best = std::max(best, q.at(a));
  }
  return t.reward + hyper_.discount * best;
}

void DqnAgent::Remember(Transition t) {
  if (t.action >= action_count()) throw InputError("action out of range");
  if (t.state.size() != state_size() ||
      (!t.terminal && t.next_state.size() != state_size())) {
    throw InputError("transition state size mismatch");
  }
  memory_.Add(std::move(t));
  ++experience_steps_;
}

std::optional<double> DqnAgent::TrainOnMinibatch(Rng& rng) {
  if (memory_.size() < std::max<std::size_t>(hyper_.burning_steps, 1)) {
    return std::nullopt;
  }
  std::vector<const Transition*> picked = memory_.Sample(hyper_.batch_size, rng);
  std::vector<Sample> batch(picked.size());
  const std::size_t n_actions = action_count();
  for (std::size_t j = 0; j < picked.size(); ++j) {
    const Transition& t = *picked[j];
    Sample& s = batch[j];
    s.input = t.state;
    s.target.assign(n_actions, 0.0);
    s.mask.assign(n_actions, 0.0);
    s.target[t.action] = QTarget(t);
    s.mask[t.action] = 1.0;
  }
  TrainConfig config;
  config.learning_rate = hyper_.learning_rate;
  const double loss = online_.SgdStep(batch, config, LossKind::kSquaredError);
  ++train_steps_;
  if (train_steps_ % hyper_.target_sync_period == 0) SyncTarget();
  return loss;
}

double DqnAgent::AnnealedEpsilon(const AgentHyperparams& hyper,
                                 std::size_t steps) {
  if (hyper.learning_steps == 0 || steps >= hyper.learning_steps) {
    return hyper.epsilon_min;
  }
  const double frac =
      static_cast<double>(steps) / static_cast<double>(hyper.learning_steps);
  return hyper.epsilon_start + frac * (hyper.epsilon_min - hyper.epsilon_start);
}

double DqnAgent::Epsilon() const {
  return AnnealedEpsilon(hyper_, experience_steps_);
}

void DqnAgent::Save(const std::string& prefix) const {
  online_.SaveToFile(prefix + ".net");
  std::ofstream meta(prefix + ".meta");
  if (!meta) throw InputError("cannot write " + prefix + ".meta");
  meta << "train_steps " << train_steps_ << "\n"
       << "experience_steps " << experience_steps_ << "\n"
       << "epsilon " << Epsilon() << "\n";
}

void DqnAgent::Load(const std::string& prefix) {
  Network net = Network::LoadFromFile(prefix + ".net");
  if (!net.SameArchitecture(online_)) {
    throw InputError("checkpoint " + prefix +
                     ".net does not match the agent's state/action sizes");
  }
  online_ = net;
  target_ = net;
  std::ifstream meta(prefix + ".meta");
  std::string key;
  double value = 0.0;
  while (meta >> key >> value) {
    if (key == "train_steps") train_steps_ = static_cast<std::size_t>(value);
    if (key == "experience_steps") {
      experience_steps_ = static_cast<std::size_t>(value);
    }
  }
}

}  // namespace ndqn
