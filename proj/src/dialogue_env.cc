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

#include "ndqn/dialogue_env.h"

#include <algorithm>
#include <random>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

std::string Join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const std::string& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

bool IsSlotParam(const DomainRegistry& reg, const std::string& name) {
  return reg.DomainOfSlot(name).has_value();
}

double Uniform(Rng& rng, double lo, double hi) {
  if (lo >= hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Replaces venue markers such as "_hotels" with the given names.
std::string FillVenues(const std::string& text, const std::string& names) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    const bool starts = text[i] == '_' && (i == 0 || text[i - 1] == ' ') &&
                        i + 1 < text.size() && text[i + 1] >= 'a' &&
                        text[i + 1] <= 'z';
    if (!starts) {
      out += text[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && ((text[j] >= 'a' && text[j] <= 'z') || text[j] == '_')) ++j;
    out += names;
    i = j;
  }
  return out;
}

}  // namespace

FeaturePipeline MakePipeline(const FixtureSet& fx, Compression compression) {
  // Raw features keep the surface words, synonyms included.
  return FeaturePipeline(compression, fx.lexicon,
                         compression == Compression::kRaw ? SynonymMap{}
                                                          : fx.synonyms);
}

FeatureSpace MakeFeatureSpace(const FixtureSet& fx, Compression compression,
                              const std::string& domain) {
  FeaturePipeline pipeline = MakePipeline(fx, compression);
  Vocabulary vocab =
      InduceVocabulary(fx.seeds, pipeline, fx.registry, fx.lexicon, domain);
  return FeatureSpace(std::move(pipeline), std::move(vocab));
}

ActionPrior::ActionPrior(const FixtureSet& fx, Compression compression)
    : space_(MakeFeatureSpace(fx, compression)) {
  std::vector<NbExample> data;
  for (const ActContext& ctx : ActContexts(fx.seeds)) {
    auto id = fx.catalog.Find(ctx.act.Key());
    if (!id) continue;
    Observation obs;
    obs.system_tokens = Tokenize(ctx.system_text);
    for (const std::string& t : Tokenize(ctx.user_text)) {
      obs.user_tokens.push_back({t, 1.0});
    }
    data.push_back({space_.Encode(obs).values, *id});
  }
  examples_ = data.size();
  nb_ = NaiveBayes::Train(data, fx.catalog.size(), std::max<std::size_t>(space_.size(), 1));
}

std::vector<double> ActionPrior::Posterior(const Observation& obs) const {
  return nb_.Posterior(space_.Encode(obs).values);
}

double TaskSuccess(const EnvState& state, const DomainRegistry& registry) {
  if (state.failed || state.goal.domains.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& name : state.goal.domains) {
    const auto& slots = registry.slots(registry.Get(name));
    double confirmed = 0;
    for (const std::string& s : slots) {
      auto it = state.slots.find(s);
      if (it != state.slots.end() && it->second.status == SlotStatus::kConfirmed) {
        confirmed += 1;
      }
    }
    const double presented = state.presented.contains(name) ? 1.0 : 0.0;
    sum += (confirmed + presented) / (slots.size() + 1.0);
  }
  return sum / state.goal.domains.size();
}

EnvConfig NoiselessConfig(EnvConfig base) {
  base.noise_prob = 0.0;
  base.correct_conf_min = 1.0;
  base.correct_conf_max = 1.0;
  base.volunteer_prob = 0.0;
  return base;
}

DialogueEnv::DialogueEnv(const FixtureSet& fx, const ActionPrior& prior)
    : DialogueEnv(fx, prior, fx.env) {}

DialogueEnv::DialogueEnv(const FixtureSet& fx, const ActionPrior& prior,
                         EnvConfig config)
    : fx_(fx), prior_(prior), config_(config) {
  config_.Validate();
  if (fx_.registry.empty()) throw ConfigError("empty domain registry");
  if (fx_.registry.TaskDomains().empty()) throw ConfigError("no task domains");
  for (DomainId id : fx_.registry.ids()) {
    if (fx_.registry.slots(id).empty()) {
      meta_ = id;
      break;
    }
  }
  if (meta_) {
    greeting_ = fx_.catalog.Find("Salutation(greeting)");
    if (greeting_ && fx_.catalog.at(*greeting_).domain != *meta_) greeting_.reset();
  }
  // Confusable words for recognition noise: user wording that neither
  // names a domain nor fills a slot.
  std::set<std::string> banned;
  for (DomainId id : fx_.registry.ids()) {
    for (const std::string& k : fx_.registry.keywords(id)) banned.insert(k);
  }
  std::set<std::string> words;
  for (const std::string& key : fx_.templates.Keys()) {
    if (!key.starts_with('@')) continue;
    for (const std::string& text : fx_.templates.Get(key)) {
      for (const std::string& t : Tokenize(text)) {
        if (t.starts_with('$') || banned.contains(t) || fx_.lexicon.SlotOf(t)) continue;
        words.insert(t);
      }
    }
  }
  filler_words_.assign(words.begin(), words.end());
}

UserGoal DialogueEnv::SampleGoal(Rng& rng) const {
  std::vector<DomainId> task = fx_.registry.TaskDomains();
  const int most = std::min<int>(config_.max_goal_domains, task.size());
  const int least = std::min(config_.min_goal_domains, most);
  const int k = std::uniform_int_distribution<int>(least, most)(rng);
  std::shuffle(task.begin(), task.end(), rng);
  UserGoal goal;
  for (int i = 0; i < k; ++i) {
    const std::string& name = fx_.registry.name(task[i]);
    goal.domains.push_back(name);
    for (const std::string& slot : fx_.registry.slots(task[i])) {
      const Tokens& values = fx_.lexicon.ValuesOf("$" + slot);
      std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
      goal.slots[slot] = values[pick(rng)];
    }
  }
  return goal;
}

const EnvState& DialogueEnv::Reset(Rng& rng) {
  return ResetWithGoal(SampleGoal(rng), rng);
}

const EnvState& DialogueEnv::ResetWithGoal(UserGoal goal, Rng& rng) {
  if (goal.domains.empty()) throw InputError("goal needs at least one domain");
  for (const std::string& name : goal.domains) {
    auto id = fx_.registry.Find(name);
    if (!id || fx_.registry.slots(*id).empty()) {
      throw InputError("goal domain is not a task domain: " + name);
    }
    for (const std::string& slot : fx_.registry.slots(*id)) {
      auto it = goal.slots.find(slot);
      if (it == goal.slots.end() ||
          fx_.lexicon.SlotOf(it->second) != "$" + slot) {
        throw InputError("goal lacks a lexicon value for " + slot);
      }
    }
  }
  state_ = EnvState{};
  live_ = false;
  state_.goal = std::move(goal);
  for (DomainId id : fx_.registry.ids()) {
    for (const std::string& slot : fx_.registry.slots(id)) state_.slots[slot] = {};
  }
  if (!meta_) {
    // Without a meta domain the user opens the dialogue.
    const std::string first = state_.goal.domains.front();
    state_.introduced.insert(first);
    Utterance heard = Hear(Intro(first, rng), rng);
    UpdateSlots(heard);
    state_.last.user_text = heard.text;
    state_.last.user_tokens = heard.tokens;
  }
  return state_;
}

std::string DialogueEnv::Intro(const std::string& domain, Rng& rng) const {
  std::vector<std::string> parts = {fx_.templates.Pick("@intro." + domain, rng)};
  for (const std::string& slot : fx_.registry.slots(fx_.registry.Get(domain))) {
    if (Uniform(rng, 0.0, 1.0) < config_.volunteer_prob) {
      parts.push_back(SlotPhrase(slot, rng));
    }
  }
  return Join(parts, " ");
}

std::string DialogueEnv::SlotPhrase(const std::string& slot, Rng& rng) const {
  return FillPlaceholders(fx_.templates.Pick("@slot." + slot, rng),
                          {{"$" + slot, state_.goal.slots.at(slot)}});
}

std::optional<std::string> DialogueEnv::NextPendingDomain() const {
  for (const std::string& name : state_.goal.domains) {
    if (!SubdialogueDone(fx_.registry.Get(name))) return name;
  }
  return std::nullopt;
}

DialogueEnv::Utterance DialogueEnv::Hear(const std::string& text, Rng& rng) const {
  Utterance out;
  std::vector<std::string> words;
  for (const std::string& t : Tokenize(text)) {
    std::string word = t;
    double conf;
    if (Uniform(rng, 0.0, 1.0) < config_.noise_prob) {
      conf = Uniform(rng, config_.noisy_conf_min, config_.noisy_conf_max);
      if (auto slot = fx_.lexicon.SlotOf(t)) {
        const Tokens& values = fx_.lexicon.ValuesOf(*slot);
        if (values.size() > 1) {
          std::uniform_int_distribution<std::size_t> pick(0, values.size() - 2);
          std::size_t i = pick(rng);
          if (values[i] == t) i = values.size() - 1;
          word = values[i];
        }
      } else if (filler_words_.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, filler_words_.size() - 1);
        word = filler_words_[pick(rng)];
      }
    } else {
      conf = Uniform(rng, config_.correct_conf_min, config_.correct_conf_max);
    }
    out.tokens.push_back({word, std::clamp(conf, 0.0, 1.0)});
    words.push_back(word);
  }
  out.text = Join(words, " ");
  return out;
}

void DialogueEnv::UpdateSlots(const Utterance& heard) {
  for (const ScoredToken& t : heard.tokens) {
    auto slot = fx_.lexicon.SlotOf(t.token);
    if (!slot) continue;
    SlotState& s = state_.slots[slot->substr(1)];
    if (s.status == SlotStatus::kConfirmed) continue;
    s.status = SlotStatus::kFilled;
    s.value = t.token;
    s.confidence = t.confidence;
  }
}

bool DialogueEnv::AllSlotsFilled(const std::string& domain) const {
  for (const std::string& s : fx_.registry.slots(fx_.registry.Get(domain))) {
    if (state_.slots.at(s).status == SlotStatus::kUnknown) return false;
  }
  return true;
}

bool DialogueEnv::SubdialogueDone(DomainId domain) const {
  if (meta_ && domain == *meta_) return state_.terminal;
  const std::string& name = fx_.registry.name(domain);
  const auto& goal = state_.goal.domains;
  if (std::find(goal.begin(), goal.end(), name) == goal.end()) return true;
  if (!state_.presented.contains(name)) return false;
  for (const std::string& s : fx_.registry.slots(domain)) {
    if (state_.slots.at(s).status != SlotStatus::kConfirmed) return false;
  }
  return true;
}

std::pair<std::string, std::string> DialogueEnv::RenderSystem(
    const DialogueAct& act, Rng& rng) const {
  std::map<std::string, std::string> values;
  for (const auto& [slot, st] : state_.slots) values["$" + slot] = st.value;
  std::string feature = FillPlaceholders(fx_.templates.Pick(act.Key(), rng), values);
  std::string display = feature;
  if (act.type == ActType::kProvide && !fx_.registry.slots(act.domain).empty()) {
    std::map<std::string, std::string> heard;
    for (const std::string& s : fx_.registry.slots(act.domain)) {
      if (!state_.slots.at(s).value.empty()) heard[s] = state_.slots.at(s).value;
    }
    auto names = fx_.venues.Matching(fx_.registry.name(act.domain), heard);
    display = FillVenues(feature, names.empty() ? "none" : Join(names, ", "));
  }
  return {feature, display};
}

std::string DialogueEnv::UserReply(const DialogueAct& act, Rng& rng) {
  const std::string domain = fx_.registry.name(act.domain);
  const auto& goal = state_.goal.domains;
  const bool wanted = std::find(goal.begin(), goal.end(), domain) != goal.end();
  std::string reply;
  switch (act.type) {
    case ActType::kSalutation:
    case ActType::kProvide:
    case ActType::kRetrieve:
      break;
    case ActType::kRequest:
    case ActType::kApology:
    case ActType::kAskFor: {
      const std::string param = act.params.empty() ? "" : act.params[0].name;
      if (IsSlotParam(fx_.registry, param)) {
        if (!wanted) {
          reply = fx_.templates.Pick("@unknown", rng);
        } else {
          state_.introduced.insert(domain);
          reply = SlotPhrase(param, rng);
        }
      } else if (auto next = NextPendingDomain()) {
        state_.introduced.insert(*next);
        reply = Intro(*next, rng);
      } else {
        state_.declined = true;
        reply = fx_.templates.Pick("@decline", rng);
      }
      break;
    }
    case ActType::kExpConfirm:
    case ActType::kImpConfirm: {
      if (!wanted) {
        reply = fx_.templates.Pick("@unknown", rng);
        break;
      }
      state_.introduced.insert(domain);
      std::vector<std::string> wrong;
      for (const std::string& p : act.ParamNames()) {
        if (!IsSlotParam(fx_.registry, p)) continue;
        const SlotState& s = state_.slots.at(p);
        if (s.status == SlotStatus::kUnknown || s.value != state_.goal.slots.at(p)) {
          wrong.push_back(p);
        }
      }
      if (wrong.empty()) {
        for (const std::string& p : act.ParamNames()) {
          if (IsSlotParam(fx_.registry, p)) state_.slots.at(p).status = SlotStatus::kConfirmed;
        }
        if (act.type == ActType::kExpConfirm) reply = fx_.templates.Pick("@affirm", rng);
      } else {
        std::vector<std::string> parts = {fx_.templates.Pick("@deny", rng)};
        for (const std::string& p : wrong) parts.push_back(SlotPhrase(p, rng));
        reply = Join(parts, " ");
      }
      break;
    }
  }
  // Without a meta domain the user moves on by themselves.
  if (!meta_ && wanted && SubdialogueDone(act.domain)) {
    if (auto next = NextPendingDomain()) {
      state_.introduced.insert(*next);
      reply = Join({reply, Intro(*next, rng)}, " ");
    }
  }
  return reply;
}

std::vector<ActionId> DialogueEnv::LegitimateActions() const {
  std::vector<ActionId> out;
  for (ActionId id = 0; id < fx_.catalog.size(); ++id) {
    const DialogueAct& act = fx_.catalog.at(id);
    const std::string& domain = fx_.registry.name(act.domain);
    if (fx_.registry.slots(act.domain).empty() || !state_.introduced.contains(domain)) {
      continue;
    }
    std::vector<std::string> slots;
    for (const std::string& p : act.ParamNames()) {
      if (IsSlotParam(fx_.registry, p)) slots.push_back(p);
    }
    bool legit = false;
    switch (act.type) {
      case ActType::kRequest:
      case ActType::kApology:
        legit = slots.size() == 1 &&
                state_.slots.at(slots[0]).status == SlotStatus::kUnknown;
        break;
      case ActType::kExpConfirm:
      case ActType::kImpConfirm: {
        bool any_open = false;
        bool all_heard = !slots.empty();
        for (const std::string& s : slots) {
          const SlotStatus st = state_.slots.at(s).status;
          if (st == SlotStatus::kUnknown) all_heard = false;
          if (st == SlotStatus::kFilled) any_open = true;
        }
        legit = all_heard && any_open;
        break;
      }
      case ActType::kRetrieve:
        legit = AllSlotsFilled(domain) && !state_.retrieved.contains(domain);
        break;
      case ActType::kProvide:
        legit = state_.retrieved.contains(domain) && !state_.presented.contains(domain);
        break;
      default:
        break;
    }
    if (legit) out.push_back(id);
  }
  return out;
}

bool DialogueEnv::IsRedundant(ActionId action) const {
  const DialogueAct& act = fx_.catalog.at(action);
  const std::string& domain = fx_.registry.name(act.domain);
  switch (act.type) {
    case ActType::kSalutation:
      return state_.turn > 0 && act.params.size() == 1 &&
             act.params[0].name == "greeting";
    case ActType::kRequest:
    case ActType::kApology:
    case ActType::kAskFor: {
      // A heard value is corrected through confirmation, not by asking
      // again. Open questions stop once the user has declined.
      bool any_slot = false;
      for (const std::string& p : act.ParamNames()) {
        if (!IsSlotParam(fx_.registry, p)) continue;
        any_slot = true;
        if (state_.slots.at(p).status == SlotStatus::kUnknown) return false;
      }
      return any_slot || state_.declined;
    }
    case ActType::kExpConfirm:
    case ActType::kImpConfirm: {
      // Only heard, unconfirmed values can be confirmed.
      bool any_slot = false;
      bool any_open = false;
      for (const std::string& p : act.ParamNames()) {
        if (!IsSlotParam(fx_.registry, p)) continue;
        any_slot = true;
        const SlotStatus st = state_.slots.at(p).status;
        if (st == SlotStatus::kUnknown) return true;
        if (st == SlotStatus::kFilled) any_open = true;
      }
      return any_slot && !any_open;
    }
    case ActType::kRetrieve:
      if (fx_.registry.slots(act.domain).empty()) return false;
      return state_.retrieved.contains(domain) || !AllSlotsFilled(domain);
    case ActType::kProvide:
      if (state_.presented.contains(domain)) return true;
      if (fx_.registry.slots(act.domain).empty()) return false;
      return !state_.retrieved.contains(domain);
    default:
      return false;
  }
}

std::vector<ActionId> DialogueEnv::ConstrainedActions() const {
  // With a meta domain every dialogue opens with the greeting.
  if (greeting_ && state_.turn == 0) return {*greeting_};
  const std::vector<double> post = prior_.Posterior(state_.last);
  std::vector<bool> keep(fx_.catalog.size(), false);
  for (ActionId id = 0; id < post.size(); ++id) {
    if (post[id] > config_.action_threshold) keep[id] = true;
  }
  for (ActionId id : LegitimateActions()) keep[id] = true;
  std::vector<ActionId> out;
  for (ActionId id = 0; id < keep.size(); ++id) {
    if (keep[id] && !IsRedundant(id)) out.push_back(id);
  }
  if (out.empty()) out = fx_.catalog.AllActions();
  return out;
}

std::vector<ActionId> DialogueEnv::ConstrainedActions(DomainId domain) const {
  std::vector<ActionId> out;
  for (ActionId id : ConstrainedActions()) {
    if (fx_.catalog.at(id).domain == domain) out.push_back(id);
  }
  if (out.empty()) {
    for (ActionId id : fx_.catalog.ActionsOf(domain)) {
      if (!IsRedundant(id)) out.push_back(id);
    }
  }
  if (out.empty()) out = fx_.catalog.ActionsOf(domain);
  return out;
}

void DialogueEnv::CheckAction(ActionId action) const {
  if (state_.terminal) throw EnvironmentError("step after the episode ended");
  const std::vector<ActionId> allowed = ConstrainedActions();
  const bool in_domain = [&] {
    if (action >= fx_.catalog.size()) return false;
    const auto own = ConstrainedActions(fx_.catalog.at(action).domain);
    return std::find(own.begin(), own.end(), action) != own.end();
  }();
  if (!std::binary_search(allowed.begin(), allowed.end(), action) && !in_domain) {
    throw EnvironmentError("action outside the constrained set: " +
                           (action < fx_.catalog.size()
                                ? fx_.catalog.at(action).Key()
                                : std::to_string(action)));
  }
}

bool DialogueEnv::ApplySystemAct(ActionId action, Rng& rng) {
  const DialogueAct& act = fx_.catalog.at(action);
  const std::string domain = fx_.registry.name(act.domain);
  if (act.type == ActType::kRetrieve && !fx_.registry.slots(act.domain).empty() &&
      AllSlotsFilled(domain)) {
    state_.retrieved.insert(domain);
  }
  if (act.type == ActType::kProvide &&
      (fx_.registry.slots(act.domain).empty() || state_.retrieved.contains(domain))) {
    state_.presented.insert(domain);
  }
  const auto [feature, display] = RenderSystem(act, rng);
  state_.last = Observation{display, Tokenize(feature), "", {}};
  state_.last_action = action;
  ++state_.turn;
  return act.type == ActType::kSalutation && act.params.size() == 1 &&
         act.params[0].name == "closing";
}

StepResult DialogueEnv::Step(ActionId action, Rng& rng) {
  if (live_) throw EnvironmentError("Step on a live session; use SystemTurn");
  CheckAction(action);
  const double dr = prior_.Posterior(state_.last)[action];
  const bool closing = ApplySystemAct(action, rng);
  std::string reply = closing ? "" : UserReply(fx_.catalog.at(action), rng);
  if (!reply.empty()) {
    Utterance heard = Hear(reply, rng);
    UpdateSlots(heard);
    state_.last.user_text = heard.text;
    state_.last.user_tokens = heard.tokens;
  }
  if (closing) state_.terminal = true;
  if (!meta_ && !NextPendingDomain()) state_.terminal = true;
  if (!state_.terminal && state_.turn >= config_.max_turns) {
    state_.terminal = true;
    state_.failed = true;
  }
  const double gr = state_.terminal ? TaskSuccess() : 0.0;
  return {state_.last, state_.terminal,
          RewardBreakdown::Compose(gr, dr, config_.step_penalty)};
}

const EnvState& DialogueEnv::ResetLive() {
  state_ = EnvState{};
  live_ = true;
  for (DomainId id : fx_.registry.ids()) {
    for (const std::string& slot : fx_.registry.slots(id)) state_.slots[slot] = {};
  }
  return state_;
}

const Observation& DialogueEnv::SystemTurn(ActionId action, Rng& rng) {
  if (!live_) throw EnvironmentError("SystemTurn needs ResetLive");
  CheckAction(action);
  if (ApplySystemAct(action, rng)) state_.terminal = true;
  if (!state_.terminal && state_.turn >= config_.max_turns) {
    state_.terminal = true;
    state_.failed = true;
  }
  return state_.last;
}

namespace {

const std::set<std::string> kYes = {"yes", "yeah", "yep", "yup", "correct",
                                    "right", "sure", "ok", "okay", "did"};
const std::set<std::string> kNo = {"no", "nope", "not", "wrong", "nah"};

}  // namespace

const Observation& DialogueEnv::UserTurn(const std::string& text, double confidence) {
  if (!live_) throw EnvironmentError("UserTurn needs ResetLive");
  if (state_.terminal) throw EnvironmentError("user turn after the episode ended");
  Utterance heard;
  heard.text = text;
  for (const std::string& t : Tokenize(text)) {
    heard.tokens.push_back({t, std::clamp(confidence, 0.0, 1.0)});
  }
  bool yes = false;
  bool no = false;
  std::set<std::string> mentioned;  // slots given a value in this turn
  for (const ScoredToken& t : heard.tokens) {
    yes = yes || kYes.contains(t.token);
    no = no || kNo.contains(t.token);
    if (auto slot = fx_.lexicon.SlotOf(t.token)) mentioned.insert(slot->substr(1));
  }
  // Domains named by keyword or by one of their values join the goal.
  bool introduced = false;
  for (DomainId id : fx_.registry.TaskDomains()) {
    const std::string& name = fx_.registry.name(id);
    bool named = false;
    for (const ScoredToken& t : heard.tokens) {
      const auto& kw = fx_.registry.keywords(id);
      if (std::find(kw.begin(), kw.end(), t.token) != kw.end()) named = true;
      auto slot = fx_.lexicon.SlotOf(t.token);
      if (slot && fx_.registry.DomainOfSlot(slot->substr(1)) == id) named = true;
    }
    if (!named) continue;
    introduced = true;
    state_.introduced.insert(name);
    auto& goal = state_.goal.domains;
    if (std::find(goal.begin(), goal.end(), name) == goal.end()) goal.push_back(name);
  }
  if (state_.last_action) {
    const DialogueAct& act = fx_.catalog.at(*state_.last_action);
    const bool confirm =
        act.type == ActType::kExpConfirm || act.type == ActType::kImpConfirm;
    if (confirm && !no) {
      // An explicit question needs a yes; an implicit one only needs no objection.
      const bool accepted = act.type == ActType::kImpConfirm || yes;
      for (const std::string& p : act.ParamNames()) {
        if (!IsSlotParam(fx_.registry, p) || mentioned.contains(p)) continue;
        SlotState& s = state_.slots.at(p);
        if (accepted && s.status == SlotStatus::kFilled) s.status = SlotStatus::kConfirmed;
      }
    }
    const bool open_question =
        (act.type == ActType::kRequest || act.type == ActType::kAskFor) &&
        !act.params.empty() && !IsSlotParam(fx_.registry, act.params[0].name);
    if (open_question && no && !introduced) state_.declined = true;
  }
  UpdateSlots(heard);
  state_.last.user_text = heard.text;
  state_.last.user_tokens = heard.tokens;
  return state_.last;
}

namespace {

std::optional<ActionId> FindIn(const ActionCatalog& cat, DomainId domain,
                               const std::string& key) {
  auto id = cat.Find(key);
  if (id && cat.at(*id).domain == domain) return id;
  return std::nullopt;
}

}  // namespace

ActionId ScriptedAction(const DialogueEnv& env, DomainId domain) {
  const FixtureSet& fx = env.fixtures();
  const ActionCatalog& cat = fx.catalog;
  const EnvState& st = env.state();
  const std::vector<ActionId> mine = cat.ActionsOf(domain);
  if (mine.empty()) throw EnvironmentError("domain has no actions");
  auto first_of = [&](std::initializer_list<std::string> keys) -> std::optional<ActionId> {
    for (const std::string& k : keys) {
      if (auto id = FindIn(cat, domain, k)) return id;
    }
    return std::nullopt;
  };

  if (fx.registry.slots(domain).empty()) {
    const std::string last = st.last_action ? cat.at(*st.last_action).Key() : "";
    std::optional<ActionId> pick;
    if (!st.last_action) {
      pick = first_of({"Salutation(greeting)"});
    } else if (st.declined) {
      pick = first_of({"Salutation(closing)"});
    } else if (last == "Salutation(greeting)") {
      pick = first_of({"Provide(intro)", "Request(hmihy)"});
    } else if (last == "Provide(intro)" || st.introduced.empty()) {
      pick = first_of({"Request(hmihy)", "AskFor(more)"});
    } else {
      pick = first_of({"AskFor(more)", "Request(hmihy)"});
    }
    return pick.value_or(mine.front());
  }

  const std::string& name = fx.registry.name(domain);
  for (const std::string& slot : fx.registry.slots(domain)) {
    if (st.slots.at(slot).status == SlotStatus::kUnknown) {
      if (auto id = first_of({"Request(" + slot + ")", "Apology(" + slot + ")"})) return *id;
    }
  }
  std::optional<ActionId> best;
  int best_score = -1;
  for (ActionId id : mine) {
    const DialogueAct& act = cat.at(id);
    if (act.type != ActType::kExpConfirm) continue;
    int open = 0;
    bool usable = true;
    for (const std::string& p : act.ParamNames()) {
      const SlotStatus s = st.slots.at(p).status;
      if (s == SlotStatus::kUnknown) usable = false;
      if (s == SlotStatus::kFilled) ++open;
    }
    if (!usable || open == 0) continue;
    const int score = open + (open == static_cast<int>(act.params.size()) ? 1000 : 0);
    if (score > best_score) {
      best_score = score;
      best = id;
    }
  }
  if (best) return *best;
  for (ActionId id : mine) {
    const DialogueAct& act = cat.at(id);
    if (act.type == ActType::kRetrieve && !st.retrieved.contains(name)) return id;
    if (act.type == ActType::kProvide && st.retrieved.contains(name) &&
        !st.presented.contains(name)) {
      return id;
    }
  }
  return mine.front();
}

DomainId ScriptedDomain(const DialogueEnv& env) {
  const DomainRegistry& reg = env.fixtures().registry;
  const EnvState& st = env.state();
  for (const std::string& name : st.goal.domains) {
    DomainId id = reg.Get(name);
    if (st.introduced.contains(name) && !env.SubdialogueDone(id)) return id;
  }
  if (env.meta_domain()) return *env.meta_domain();
  for (const std::string& name : st.goal.domains) {
    if (!env.SubdialogueDone(reg.Get(name))) return reg.Get(name);
  }
  return reg.Get(st.goal.domains.front());
}

ActionId ScriptedAction(const DialogueEnv& env) {
  return ScriptedAction(env, ScriptedDomain(env));
}

}  // namespace ndqn
