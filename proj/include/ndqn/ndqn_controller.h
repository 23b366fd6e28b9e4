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

#ifndef NDQN_NDQN_CONTROLLER_H_
#define NDQN_NDQN_CONTROLLER_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ndqn/dialogue_env.h"
#include "ndqn/domain_classifier.h"
#include "ndqn/dqn_agent.h"

namespace ndqn {

enum class TransitionMode { kRuleBased, kLearned };

// Chooses which domain acts next from the latest evidence. Rule-based mode
// counts domain keywords and slot values in the user turn; learned mode
// asks a classifier and falls back to the rules on a thin margin.
class DomainTransitionModel {
 public:
  explicit DomainTransitionModel(const DomainRegistry& registry,
                                 const SlotLexicon& lexicon);

  // Switches to learned mode. Both pointers must outlive the model.
  void UseClassifier(const DomainClassifier* classifier, const FeatureSpace* space,
                     double margin_threshold);
  TransitionMode mode() const { return classifier_ ? TransitionMode::kLearned
                                                   : TransitionMode::kRuleBased; }

  // Predefined start domain, else argmax of rule scores on the opening
  // evidence; ties go to the lowest registry index.
  DomainId Initial(const Observation& opening) const;
  std::vector<double> RuleScores(const Observation& obs) const;
  // Best domain for the evidence; `current` wins ties and silence.
  DomainId Predict(DomainId current, const Observation& obs) const;

 private:
  DomainId RulePredict(DomainId current, const Observation& obs) const;

  const DomainRegistry& registry_;
  const SlotLexicon& lexicon_;
  const DomainClassifier* classifier_ = nullptr;
  const FeatureSpace* space_ = nullptr;
  double margin_threshold_ = 0.0;
};

// Interrupted domains waiting to be resumed.
class DomainStack {
 public:
  struct Entry {
    DomainId domain;
    int turn = 0;  // when it was interrupted
  };

  void Push(DomainId domain, int turn);
  std::optional<Entry> Pop();
  void Clear() { entries_.clear(); }
  std::size_t depth() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t pushes() const { return pushes_; }
  std::size_t pops() const { return pops_; }

 private:
  std::vector<Entry> entries_;
  std::size_t pushes_ = 0;
  std::size_t pops_ = 0;
};

enum class SystemMode { kNdqn, kFlat };

std::string SystemModeName(SystemMode mode);
SystemMode ParseSystemMode(const std::string& name);

struct SystemConfig {
  SystemMode mode = SystemMode::kNdqn;
  Compression compression = Compression::kDelexSynonym;
  AgentHyperparams hyper;
  std::uint64_t seed = 1;
};

struct EpisodeResult {
  double reward = 0.0;
  int length = 0;
  double success = 0.0;
  bool completed = false;  // reached a terminal state within the budget
  std::map<std::string, int> domain_steps;
  std::vector<std::string> domains;  // acting domain, consecutive runs merged
  int switches = 0;
};

// Optional scripted actor: returns a global action id for the acting
// domain, or nullopt to let the learned policy choose.
using PolicyOverride =
    std::function<std::optional<ActionId>(const DialogueEnv&, DomainId acting)>;

struct EpisodeOptions {
  std::optional<double> epsilon;  // nullopt: annealed schedule
  bool learn = false;
  std::size_t step_limit = SIZE_MAX;  // stop early, e.g. at the budget
  PolicyOverride policy;
};

struct TrainingRow {
  std::size_t step = 0;
  std::size_t episodes = 0;
  double avg_reward = 0.0;
  double avg_success = 0.0;
  double avg_length = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainingLog {
  std::vector<TrainingRow> rows;
  std::vector<EpisodeResult> episodes;  // completed episodes, in order

  static constexpr const char* kHeader =
      "step,episodes,avg_reward,avg_success,avg_length,elapsed_seconds";
  void WriteCsv(std::ostream& out) const;
  static TrainingLog ReadCsv(std::istream& in);
  // True when every column but elapsed_seconds matches.
  bool SameMetrics(const TrainingLog& other) const;
};

struct TrainOptions {
  std::size_t budget = 20000;          // total agent steps
  std::size_t checkpoint_every = 1000;
};

struct EvalResult {
  int episodes = 0;
  double avg_reward = 0.0;
  double avg_success = 0.0;
  double avg_length = 0.0;
};

// A network of per-domain DQN agents, or one flat agent over the union of
// all domains. Either way one agent acts per turn.
class NdqnSystem {
 public:
  struct Agent {
    std::string name;
    FeatureSpace space;
    std::vector<ActionId> actions;  // local index -> global id
    DqnAgent dqn;
  };

  // `fx` and `prior` must outlive the system.
  NdqnSystem(const FixtureSet& fx, const ActionPrior& prior, SystemConfig config);

  DomainTransitionModel& transition() { return transition_; }
  const DomainTransitionModel& transition() const { return transition_; }
  const DomainStack& stack() const { return stack_; }
  const std::vector<Agent>& agents() const { return agents_; }
  std::vector<Agent>& mutable_agents() { return agents_; }
  const SystemConfig& config() const { return config_; }
  std::size_t total_steps() const { return total_steps_; }

  DomainId InitialDomain(const Observation& opening) const;
  // Pops on a finished subdialogue, otherwise follows the transition model;
  // a switch to another domain pushes the current one.
  DomainId NextDomain(DomainId current, const Observation& evidence,
                      bool subdialogue_done, int turn);

  // Plays one episode on an already reset environment.
  EpisodeResult RunEpisode(DialogueEnv& env, const EpisodeOptions& options, Rng& rng);

  // Runs episodes until `budget` agent steps have been taken.
  TrainingLog Train(DialogueEnv& env, const TrainOptions& options);
  // Greedy play on fresh goals, no learning.
  EvalResult Evaluate(DialogueEnv& env, int episodes, std::uint64_t seed);

  // Best valid act of the agent for `domain` on the env's latest
  // observation. Used for live play, where the env has no simulated user.
  ActionId GreedyAction(DomainId domain, const DialogueEnv& env) const;
  void ClearStack() { stack_.Clear(); }

  // Agent index acting in `domain` (always 0 in flat mode).
  std::size_t AgentFor(DomainId domain) const;
  // Valid local actions of agent `index` in the current env state.
  std::vector<ActionIndex> ValidLocal(std::size_t index, const DialogueEnv& env) const;

  void Save(const std::string& dir) const;
  void Load(const std::string& dir);

  // Seconds spent in action selection and network updates since
  // construction: the learning cost, free of simulator overhead.
  double agent_seconds() const { return agent_seconds_; }

 private:
  const FixtureSet& fx_;
  const ActionPrior& prior_;
  SystemConfig config_;
  DomainTransitionModel transition_;
  DomainStack stack_;
  std::vector<Agent> agents_;
  std::vector<std::map<ActionId, ActionIndex>> local_of_;
  std::size_t total_steps_ = 0;
  double agent_seconds_ = 0.0;
};

}  // namespace ndqn

#endif  // NDQN_NDQN_CONTROLLER_H_
