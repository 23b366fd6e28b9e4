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

#ifndef NDQN_TESTS_TINY_MDP_H_
#define NDQN_TESTS_TINY_MDP_H_

#include <array>
#include <cmath>
#include <cstdint>

#include "ndqn/dqn_agent.h"

namespace ndqn {

// Two states, two actions, deterministic:
//   s0,a0 -> s1 r=0    s0,a1 -> s0 r=1
//   s1,a0 -> end r=2   s1,a1 -> s0 r=0
struct TinyMdp {
  struct Outcome {
    int next;  // -1 terminates
    double reward;
  };
  static Outcome Step(int s, int a) {
    static constexpr Outcome kTable[2][2] = {{{1, 0.0}, {0, 1.0}},
                                             {{-1, 2.0}, {0, 0.0}}};
    return kTable[s][a];
  }
};

using QTable = std::array<std::array<double, 2>, 2>;

// Value iteration to machine precision.
inline QTable ValueIteration(double gamma) {
  QTable q{};
  for (int iter = 0; iter < 2000; ++iter) {
    QTable next{};
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        TinyMdp::Outcome o = TinyMdp::Step(s, a);
        const double v =
            o.next < 0 ? 0.0 : std::max(q[o.next][0], q[o.next][1]);
        next[s][a] = o.reward + gamma * v;
      }
    }
    q = next;
  }
  return q;
}

struct TinyMdpResult {
  QTable optimal;
  QTable learned;
};

// Fills replay with every (s, a) outcome and trains a small DQN on it.
inline TinyMdpResult RunTinyMdpCheck(std::uint64_t seed) {
  AgentHyperparams h;
  h.hidden = {16, 16};
  h.burning_steps = 4;
  h.batch_size = 32;
  h.replay_capacity = 4;
  h.target_sync_period = 200;
  h.learning_rate = 0.01;
  h.discount = 0.7;
  DqnAgent agent(2, 2, h, seed);
  auto one_hot = [](int s) {
    return std::vector<double>{s == 0 ? 1.0 : 0.0, s == 1 ? 1.0 : 0.0};
  };
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      TinyMdp::Outcome o = TinyMdp::Step(s, a);
      Transition t;
      t.state = one_hot(s);
      t.action = static_cast<ActionIndex>(a);
      t.reward = o.reward;
      t.terminal = o.next < 0;
      t.next_state = o.next < 0 ? std::vector<double>{0.0, 0.0} : one_hot(o.next);
      agent.Remember(t);
    }
  }
  Rng rng(seed);
  for (int i = 0; i < 30000; ++i) agent.TrainOnMinibatch(rng);
  TinyMdpResult result;
  result.optimal = ValueIteration(h.discount);
  for (int s = 0; s < 2; ++s) {
    std::vector<double> q = agent.QValues(one_hot(s));
    result.learned[s] = {q[0], q[1]};
  }
  return result;
}

}  // namespace ndqn

#endif  // NDQN_TESTS_TINY_MDP_H_
