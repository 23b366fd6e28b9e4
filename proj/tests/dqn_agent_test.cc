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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>

#include "ndqn/errors.h"
#include "tiny_mdp.h"

namespace ndqn {
namespace {

AgentHyperparams SmallHyper() {
  AgentHyperparams h;
  h.hidden = {8, 8};
  h.burning_steps = 1;
  h.batch_size = 4;
  h.replay_capacity = 100;
  h.target_sync_period = 10;
  return h;
}

// Sets the online output biases so Q = `q` whatever the input.
void PinOutputs(DqnAgent& agent, const std::vector<double>& q) {
  Layer& out = agent.mutable_online().mutable_layers().back();
  std::fill(out.weights.begin(), out.weights.end(), 0.0);
  out.biases = q;
}

TEST(ReplayMemoryTest, FifoEviction) {
  ReplayMemory memory(5);
  for (int i = 0; i < 8; ++i) {
    Transition t;
    t.reward = i;
    memory.Add(t);
    EXPECT_LE(memory.size(), 5u);
  }
  ASSERT_EQ(memory.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(memory.at(i).reward, 3.0 + i);
}

TEST(ReplayMemoryTest, CapacityPropertyAndRejectsNonFinite) {
  for (std::size_t cap : {1u, 3u, 17u}) {
    ReplayMemory memory(cap);
    for (std::size_t k = 0; k < cap + 11; ++k) {
      Transition t;
      t.reward = static_cast<double>(k);
      memory.Add(t);
    }
    // The first 11 inserted are gone.
    for (std::size_t i = 0; i < memory.size(); ++i) {
      EXPECT_GE(memory.at(i).reward, 11.0);
    }
  }
  ReplayMemory memory(2);
  Transition bad;
  bad.reward = NAN;
  EXPECT_THROW(memory.Add(bad), InputError);
}

TEST(SelectActionTest, MaskedArgmax) {
  DqnAgent agent(2, 3, SmallHyper(), 1);
  PinOutputs(agent, {0.1, 0.9, 0.3});
  Rng rng(1);
  std::vector<double> s = {0.0, 1.0};
  std::vector<ActionIndex> valid = {0, 2};
  EXPECT_EQ(agent.SelectAction(s, valid, 0.0, rng), 2u);
  std::vector<ActionIndex> all = {0, 1, 2};
  EXPECT_EQ(agent.SelectAction(s, all, 0.0, rng), 1u);
}

TEST(SelectActionTest, TiesGoToLowestIndex) {
  DqnAgent agent(2, 4, SmallHyper(), 1);
  PinOutputs(agent, {0.5, 0.7, 0.7, 0.7});
  Rng rng(1);
  std::vector<double> s = {1.0, 1.0};
  std::vector<ActionIndex> valid = {3, 2, 1};
  EXPECT_EQ(agent.SelectAction(s, valid, 0.0, rng), 1u);
}

TEST(SelectActionTest, SingletonAndEmpty) {
  DqnAgent agent(2, 5, SmallHyper(), 1);
  Rng rng(1);
  std::vector<double> s = {0.3, 0.3};
  std::vector<ActionIndex> valid = {4};
  EXPECT_EQ(agent.SelectAction(s, valid, 1.0, rng), 4u);
  EXPECT_THROW(agent.SelectAction(s, std::vector<ActionIndex>{}, 0.5, rng),
               EnvironmentError);
}

TEST(SelectActionTest, UniformExplorationBinomialBounds) {
  DqnAgent agent(2, 3, SmallHyper(), 1);
  Rng rng(1234);
  std::vector<double> s = {0.3, 0.7};
  std::vector<ActionIndex> valid = {0, 1, 2};
  std::array<int, 3> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[agent.SelectAction(s, valid, 1.0, rng)];
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_LE(std::abs(c - n * p), 3.0 * sigma);
}

TEST(SelectActionTest, NeverLeavesValidSet) {
  DqnAgent agent(3, 6, SmallHyper(), 2);
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<ActionIndex> valid;
    for (ActionIndex a = 0; a < 6; ++a) {
      if (rng() % 2) valid.push_back(a);
    }
    if (valid.empty()) valid.push_back(rng() % 6);
    std::vector<double> s = {u(rng), u(rng), u(rng)};
    ActionIndex a = agent.SelectAction(s, valid, u(rng), rng);
    EXPECT_NE(std::find(valid.begin(), valid.end(), a), valid.end());
  }
}

TEST(QTargetTest, Formula) {
  AgentHyperparams h = SmallHyper();
  h.discount = 0.7;
  DqnAgent agent(2, 2, h, 1);
  Layer& out = const_cast<Network&>(agent.target()).mutable_layers().back();
  std::fill(out.weights.begin(), out.weights.end(), 0.0);
  out.biases = {1.0, 0.2};

  Transition terminal{{0, 0}, 0, 1.0, {0, 0}, true, {}};
  EXPECT_DOUBLE_EQ(agent.QTarget(terminal), 1.0);
  Transition step{{0, 0}, 0, 0.0, {1, 1}, false, {}};
  EXPECT_DOUBLE_EQ(agent.QTarget(step), 0.7);
  out.biases = {0.5, -1.0};
  Transition penalised{{0, 0}, 0, -0.1, {1, 1}, false, {}};
  EXPECT_NEAR(agent.QTarget(penalised), 0.25, 1e-12);
  // Max restricted to valid next actions.
  out.biases = {0.5, 2.0};
  Transition restricted{{0, 0}, 0, 0.0, {1, 1}, false, {0}};
  EXPECT_NEAR(agent.QTarget(restricted), 0.35, 1e-12);
}

TEST(TrainTest, BurnInLeavesWeightsUntouched) {
  AgentHyperparams h;  // burning_steps = 1000
  h.hidden = {8, 8};
  DqnAgent agent(2, 2, h, 3);
  Rng rng(1);
  const Network before = agent.online();
  for (int i = 0; i < 999; ++i) {
    agent.Remember({{1, 0}, 0, 1.0, {0, 1}, false, {}});
    EXPECT_FALSE(agent.TrainOnMinibatch(rng).has_value());
  }
  EXPECT_EQ(agent.online(), before);
  EXPECT_EQ(agent.train_steps(), 0u);
  agent.Remember({{1, 0}, 0, 1.0, {0, 1}, false, {}});
  EXPECT_TRUE(agent.TrainOnMinibatch(rng).has_value());
  EXPECT_NE(agent.online(), before);
}

TEST(TrainTest, ConvergesToTerminalReward) {
  AgentHyperparams h = SmallHyper();
  h.learning_rate = 0.05;
  DqnAgent agent(2, 2, h, 5);
  Rng rng(5);
  agent.Remember({{1, 0}, 1, 1.0, {0, 0}, true, {}});
  for (int i = 0; i < 2000; ++i) agent.TrainOnMinibatch(rng);
  EXPECT_NEAR(agent.QValues(std::vector<double>{1, 0})[1], 1.0, 0.05);
}

TEST(TrainTest, TargetSyncEveryPeriod) {
  AgentHyperparams h = SmallHyper();
  h.target_sync_period = 7;
  DqnAgent agent(2, 3, h, 5);
  Rng rng(5);
  agent.Remember({{1, 0}, 1, 1.0, {0, 1}, false, {}});
  agent.Remember({{0, 1}, 2, -1.0, {1, 0}, true, {}});
  std::vector<std::vector<double>> probes = {{1, 0}, {0, 1}, {0.3, 0.9}};
  for (int i = 1; i <= 30; ++i) {
    agent.TrainOnMinibatch(rng);
    if (agent.train_steps() % 7 == 0) {
      for (const auto& x : probes) {
        EXPECT_EQ(agent.online().Forward(x), agent.target().Forward(x));
      }
    } else {
      EXPECT_NE(agent.online(), agent.target());
    }
  }
}

TEST(EpsilonTest, LinearAnneal) {
  AgentHyperparams h;
  h.learning_steps = 30000;
  EXPECT_DOUBLE_EQ(DqnAgent::AnnealedEpsilon(h, 0), 1.0);
  EXPECT_DOUBLE_EQ(DqnAgent::AnnealedEpsilon(h, 30000), 0.001);
  EXPECT_DOUBLE_EQ(DqnAgent::AnnealedEpsilon(h, 90000), 0.001);
  EXPECT_NEAR(DqnAgent::AnnealedEpsilon(h, 15000), 0.5005, 1e-12);
}

TEST(HyperparamsTest, Validation) {
  AgentHyperparams h;
  h.discount = 1.0;
  EXPECT_THROW(h.Validate(), ConfigError);
  h = {};
  h.epsilon_min = 0.5;
  h.epsilon_start = 0.2;
  EXPECT_THROW(h.Validate(), ConfigError);
}

TEST(TrainTest, MatchesValueIterationOnTinyMdp) {
  TinyMdpResult r = RunTinyMdpCheck(/*seed=*/11);
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(r.learned[s][a], r.optimal[s][a], 0.05)
          << "s=" << s << " a=" << a;
    }
  }
}

TEST(TrainTest, DeterministicTrajectory) {
  auto run = [] {
    AgentHyperparams h = SmallHyper();
    DqnAgent agent(2, 2, h, 8);
    Rng rng(8);
    std::vector<double> losses;
    for (int i = 0; i < 50; ++i) {
      std::vector<double> s = {static_cast<double>(i % 2), 1.0};
      std::vector<ActionIndex> valid = {0, 1};
      ActionIndex a = agent.SelectAction(s, valid, 0.5, rng);
      agent.Remember({s, a, a == 0 ? 1.0 : -1.0, {1.0, 0.0}, i % 5 == 0, {}});
      if (auto l = agent.TrainOnMinibatch(rng)) losses.push_back(*l);
      losses.push_back(static_cast<double>(a));
    }
    return losses;
  };
  EXPECT_EQ(run(), run());
}

TEST(CheckpointTest, SaveLoadRoundTrip) {
  AgentHyperparams h = SmallHyper();
  DqnAgent agent(3, 2, h, 4);
  Rng rng(4);
  agent.Remember({{1, 0, 0}, 1, 1.0, {0, 0, 0}, true, {}});
  for (int i = 0; i < 5; ++i) agent.TrainOnMinibatch(rng);
  const std::string prefix = ::testing::TempDir() + "/agent_ckpt";
  agent.Save(prefix);
  DqnAgent restored(3, 2, h, 99);
  restored.Load(prefix);
  EXPECT_EQ(restored.online(), agent.online());
  EXPECT_EQ(restored.train_steps(), 5u);
  DqnAgent wrong(4, 2, h, 99);
  EXPECT_THROW(wrong.Load(prefix), InputError);
}

}  // namespace
}  // namespace ndqn
