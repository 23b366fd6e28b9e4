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

#ifndef NDQN_DIALOGUE_ENV_H_
#define NDQN_DIALOGUE_ENV_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndqn/dialogue_act.h"
#include "ndqn/dqn_agent.h"
#include "ndqn/fixtures.h"
#include "ndqn/naive_bayes.h"
#include "ndqn/text_features.h"

namespace ndqn {

// The latest system and user responses: everything a policy observes.
struct Observation {
  std::string system_text;    // display text, venues filled in
  Tokens system_tokens;       // feature tokens, venue markers kept
  std::string user_text;
  std::vector<ScoredToken> user_tokens;
};

// A vocabulary plus the pipeline that maps text onto it.
class FeatureSpace {
 public:
  FeatureSpace(FeaturePipeline pipeline, Vocabulary vocab)
      : pipeline_(std::move(pipeline)), vocab_(std::move(vocab)) {}

  StateVector Encode(const Observation& obs) const {
    return pipeline_.Encode(obs.system_tokens, obs.user_tokens, vocab_);
  }
  std::size_t size() const { return vocab_.size(); }
  const Vocabulary& vocab() const { return vocab_; }
  const FeaturePipeline& pipeline() const { return pipeline_; }

 private:
  FeaturePipeline pipeline_;
  Vocabulary vocab_;
};

FeaturePipeline MakePipeline(const FixtureSet& fx, Compression compression);
// Feature space of one domain, or of all domains when `domain` is empty.
FeatureSpace MakeFeatureSpace(const FixtureSet& fx, Compression compression,
                              const std::string& domain = "");

// Naive Bayes estimate of Pr(action | state) over the global vocabulary and
// the whole catalog, trained on the seed dialogues.
class ActionPrior {
 public:
  ActionPrior(const FixtureSet& fx, Compression compression);

  std::vector<double> Posterior(const Observation& obs) const;
  const FeatureSpace& space() const { return space_; }
  const NaiveBayes& model() const { return nb_; }
  std::size_t training_examples() const { return examples_; }

 private:
  FeatureSpace space_;
  NaiveBayes nb_;
  std::size_t examples_ = 0;
};

enum class SlotStatus { kUnknown, kFilled, kConfirmed };

struct SlotState {
  SlotStatus status = SlotStatus::kUnknown;
  std::string value;  // what the system heard
  double confidence = 0.0;
};

struct UserGoal {
  std::vector<std::string> domains;           // task domains, in order
  std::map<std::string, std::string> slots;   // slot -> wanted value
};

struct EnvState {
  UserGoal goal;
  std::map<std::string, SlotState> slots;  // every slot of every domain
  std::set<std::string> introduced;
  std::set<std::string> retrieved;
  std::set<std::string> presented;
  std::optional<ActionId> last_action;
  int turn = 0;
  bool declined = false;
  bool terminal = false;
  bool failed = false;
  Observation last;
};

struct RewardBreakdown {
  double gr = 0.0;
  double dr = 0.0;
  double length_penalty = 0.0;
  double total = 0.0;

  static RewardBreakdown Compose(double gr, double dr, double penalty) {
    return {gr, dr, penalty, gr + dr - penalty};
  }
};

struct StepResult {
  Observation observation;
  bool terminal = false;
  RewardBreakdown reward;
};

// Per goal domain: (confirmed slots + presented) / (slots + 1), averaged
// over the goal's task domains.
double TaskSuccess(const EnvState& state, const DomainRegistry& registry);

// Zero noise, full confidence, no volunteered slots.
EnvConfig NoiselessConfig(EnvConfig base);

class DialogueEnv {
 public:
  // `fx` and `prior` must outlive the environment.
  DialogueEnv(const FixtureSet& fx, const ActionPrior& prior);
  DialogueEnv(const FixtureSet& fx, const ActionPrior& prior, EnvConfig config);

  const EnvState& Reset(Rng& rng);
  const EnvState& ResetWithGoal(UserGoal goal, Rng& rng);
  UserGoal SampleGoal(Rng& rng) const;

  // Throws EnvironmentError when `action` is neither in ConstrainedActions()
  // nor in ConstrainedActions() of its own domain.
  StepResult Step(ActionId action, Rng& rng);

  // Live play: a person supplies the user side. ResetLive starts an episode
  // with an empty goal; domains join the goal as the person names them.
  const EnvState& ResetLive();
  const Observation& SystemTurn(ActionId action, Rng& rng);
  // Typed input is heard with `confidence` on every word. Yes/no words
  // settle pending confirmations; "no" to an open question declines.
  const Observation& UserTurn(const std::string& text, double confidence = 1.0);
  bool live() const { return live_; }

  // Likely actions under the prior plus the acts that are always legitimate
  // for the current slot statuses, minus redundant ones. Sorted, never
  // empty. Only the greeting at turn 0 when a meta domain exists.
  std::vector<ActionId> ConstrainedActions() const;
  // The same set restricted to one domain's acts; falls back to all of that
  // domain's acts when the restriction is empty.
  std::vector<ActionId> ConstrainedActions(DomainId domain) const;
  std::vector<ActionId> LegitimateActions() const;
  // Acts that cannot change anything: asking for slots that already have a
  // value, confirming values not heard or already confirmed, an open
  // question after the user declined, retrieving before every slot is
  // heard or a second time, presenting before retrieval, presenting
  // anything (the introduction included) a second time,
  // or greeting after the opening.
  bool IsRedundant(ActionId action) const;

  // All slots of `domain` confirmed and its information presented. Domains
  // outside the goal have nothing to do and count as done.
  bool SubdialogueDone(DomainId domain) const;
  double TaskSuccess() const { return ndqn::TaskSuccess(state_, fx_.registry); }

  const EnvState& state() const { return state_; }
  const FixtureSet& fixtures() const { return fx_; }
  const ActionPrior& prior() const { return prior_; }
  const EnvConfig& config() const { return config_; }
  // Slotless domain that hosts openings and closings, if registered.
  std::optional<DomainId> meta_domain() const { return meta_; }

 private:
  struct Utterance {
    std::string text;
    std::vector<ScoredToken> tokens;
  };

  // (feature text, display text) for one paraphrase of `act`.
  void CheckAction(ActionId action) const;
  // Applies the act's effects and renders it; true for the closing act.
  bool ApplySystemAct(ActionId action, Rng& rng);
  std::pair<std::string, std::string> RenderSystem(const DialogueAct& act,
                                                   Rng& rng) const;
  std::string Intro(const std::string& domain, Rng& rng) const;
  std::string SlotPhrase(const std::string& slot, Rng& rng) const;
  std::string UserReply(const DialogueAct& act, Rng& rng);
  std::optional<std::string> NextPendingDomain() const;
  Utterance Hear(const std::string& text, Rng& rng) const;
  void UpdateSlots(const Utterance& heard);
  bool AllSlotsFilled(const std::string& domain) const;

  const FixtureSet& fx_;
  const ActionPrior& prior_;
  EnvConfig config_;
  std::optional<DomainId> meta_;
  std::optional<ActionId> greeting_;
  std::vector<std::string> filler_words_;
  EnvState state_;
  bool live_ = false;
};

// Hand-written policy that follows the seed dialogues: greet, introduce,
// ask, then per domain request, confirm, retrieve and present. Returns a
// global action id inside `domain`'s acts when possible.
ActionId ScriptedAction(const DialogueEnv& env, DomainId domain);
// Picks the domain itself: the first unfinished introduced task domain,
// otherwise the meta domain.
ActionId ScriptedAction(const DialogueEnv& env);
DomainId ScriptedDomain(const DialogueEnv& env);

}  // namespace ndqn

#endif  // NDQN_DIALOGUE_ENV_H_
