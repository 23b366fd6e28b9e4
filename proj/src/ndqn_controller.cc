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

#include "ndqn/ndqn_controller.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::size_t ArgmaxLowest(const std::vector<double>& v) {
  return std::max_element(v.begin(), v.end()) - v.begin();
}

}  // namespace

DomainTransitionModel::DomainTransitionModel(const DomainRegistry& registry,
                                             const SlotLexicon& lexicon)
    : registry_(registry), lexicon_(lexicon) {}

void DomainTransitionModel::UseClassifier(const DomainClassifier* classifier,
                                          const FeatureSpace* space,
                                          double margin_threshold) {
  if (classifier && (!space || classifier->input_size() != space->size() ||
                     classifier->classes() != registry_.size())) {
    throw ConfigError("classifier does not fit the feature space or registry");
  }
  classifier_ = classifier;
  space_ = space;
  margin_threshold_ = margin_threshold;
}

std::vector<double> DomainTransitionModel::RuleScores(const Observation& obs) const {
  std::vector<double> scores(registry_.size(), 0.0);
  for (const ScoredToken& t : obs.user_tokens) {
    for (DomainId id : registry_.ids()) {
      const auto& kw = registry_.keywords(id);
      if (std::find(kw.begin(), kw.end(), t.token) != kw.end()) scores[id.value] += 1.0;
    }
    if (auto slot = lexicon_.SlotOf(t.token)) {
      if (auto owner = registry_.DomainOfSlot(slot->substr(1))) scores[owner->value] += 1.0;
    }
  }
  return scores;
}

DomainId DomainTransitionModel::Initial(const Observation& opening) const {
  if (registry_.empty()) throw ConfigError("empty domain registry");
  if (auto start = registry_.start()) return *start;
  return DomainId{ArgmaxLowest(RuleScores(opening))};
}

DomainId DomainTransitionModel::RulePredict(DomainId current,
                                            const Observation& obs) const {
  const std::vector<double> scores = RuleScores(obs);
  const double best = *std::max_element(scores.begin(), scores.end());
  if (best <= 0.0 || scores[current.value] == best) return current;
  return DomainId{ArgmaxLowest(scores)};
}

DomainId DomainTransitionModel::Predict(DomainId current, const Observation& obs) const {
  if (!classifier_) return RulePredict(current, obs);
  const std::vector<double> x = HitOrMiss(space_->Encode(obs));
  if (classifier_->Margin(x) < margin_threshold_) return RulePredict(current, obs);
  return DomainId{classifier_->Predict(x)};
}

void DomainStack::Push(DomainId domain, int turn) {
  entries_.push_back({domain, turn});
  ++pushes_;
}

std::optional<DomainStack::Entry> DomainStack::Pop() {
  if (entries_.empty()) return std::nullopt;
  Entry e = entries_.back();
  entries_.pop_back();
  ++pops_;
  return e;
}

std::string SystemModeName(SystemMode mode) {
  return mode == SystemMode::kNdqn ? "ndqn" : "flat";
}

SystemMode ParseSystemMode(const std::string& name) {
  if (name == "ndqn") return SystemMode::kNdqn;
  if (name == "flat" || name == "dqn") return SystemMode::kFlat;
  throw ConfigError("unknown system mode: " + name);
}

void TrainingLog::WriteCsv(std::ostream& out) const {
  out << kHeader << '\n';
  out << std::setprecision(17);  // exact round trip
  for (const TrainingRow& r : rows) {
    out << r.step << ',' << r.episodes << ',' << r.avg_reward << ','
        << r.avg_success << ',' << r.avg_length << ',' << r.elapsed_seconds << '\n';
  }
}

TrainingLog TrainingLog::ReadCsv(std::istream& in) {
  TrainingLog log;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ParseError("csv", 1, "missing training log header");
  }
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    TrainingRow r;
    if (!(ss >> r.step >> r.episodes >> r.avg_reward >> r.avg_success >>
          r.avg_length >> r.elapsed_seconds)) {
      throw ParseError("csv", number, "expected six numeric columns");
    }
    log.rows.push_back(r);
  }
  return log;
}

bool TrainingLog::SameMetrics(const TrainingLog& other) const {
  if (rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TrainingRow& a = rows[i];
    const TrainingRow& b = other.rows[i];
    if (a.step != b.step || a.episodes != b.episodes || a.avg_reward != b.avg_reward ||
        a.avg_success != b.avg_success || a.avg_length != b.avg_length) {
      return false;
    }
  }
  return true;
}

NdqnSystem::NdqnSystem(const FixtureSet& fx, const ActionPrior& prior,
                       SystemConfig config)
    : fx_(fx), prior_(prior), config_(std::move(config)),
      transition_(fx.registry, fx.lexicon) {
  config_.hyper.Validate();
  if (fx_.registry.empty()) throw ConfigError("empty domain registry");
  auto add = [&](const std::string& name, FeatureSpace space,
                 std::vector<ActionId> actions) {
    if (actions.empty()) throw ConfigError("domain without actions: " + name);
    if (space.size() == 0) throw ConfigError("domain without features: " + name);
    const std::uint64_t seed = config_.seed * 1000003 + agents_.size() + 1;
    DqnAgent dqn(space.size(), actions.size(), config_.hyper, seed);
    std::map<ActionId, ActionIndex> local;
    for (ActionIndex i = 0; i < actions.size(); ++i) local[actions[i]] = i;
    local_of_.push_back(std::move(local));
    agents_.push_back({name, std::move(space), std::move(actions), std::move(dqn)});
  };
  if (config_.mode == SystemMode::kFlat) {
    add("flat", MakeFeatureSpace(fx_, config_.compression), fx_.catalog.AllActions());
  } else {
    for (DomainId id : fx_.registry.ids()) {
      const std::string& name = fx_.registry.name(id);
      add(name, MakeFeatureSpace(fx_, config_.compression, name),
          fx_.catalog.ActionsOf(id));
    }
  }
}

std::size_t NdqnSystem::AgentFor(DomainId domain) const {
  return config_.mode == SystemMode::kFlat ? 0 : domain.value;
}

std::vector<ActionIndex> NdqnSystem::ValidLocal(std::size_t index,
                                                const DialogueEnv& env) const {
  std::vector<ActionIndex> out;
  for (ActionId g : env.ConstrainedActions()) {
    auto it = local_of_[index].find(g);
    if (it != local_of_[index].end()) out.push_back(it->second);
  }
  if (out.empty()) {
    // No likely act of this agent: fall back to its useful acts, as the
    // environment does for a domain with an empty restriction.
    const auto& actions = agents_[index].actions;
    for (ActionIndex i = 0; i < actions.size(); ++i) {
      if (!env.IsRedundant(actions[i])) out.push_back(i);
    }
    if (out.empty()) {
      out.resize(actions.size());
      for (ActionIndex i = 0; i < out.size(); ++i) out[i] = i;
    }
  }
  return out;
}

DomainId NdqnSystem::InitialDomain(const Observation& opening) const {
  return transition_.Initial(opening);
}

DomainId NdqnSystem::NextDomain(DomainId current, const Observation& evidence,
                                bool subdialogue_done, int turn) {
  if (subdialogue_done) {
    if (auto prior = stack_.Pop()) return prior->domain;
  }
  const DomainId next = transition_.Predict(current, evidence);
  if (next != current && !subdialogue_done) stack_.Push(current, turn);
  return next;
}

EpisodeResult NdqnSystem::RunEpisode(DialogueEnv& env, const EpisodeOptions& options,
                                     Rng& rng) {
  const bool flat = config_.mode == SystemMode::kFlat;
  EpisodeResult result;
  stack_.Clear();
  Observation obs = env.state().last;
  DomainId domain = InitialDomain(obs);
  while (!env.state().terminal && static_cast<std::size_t>(result.length) < options.step_limit) {
    const std::size_t index = AgentFor(domain);
    Agent& agent = agents_[index];
    std::vector<double> state = agent.space.Encode(obs).values;
    const std::vector<ActionIndex> valid = ValidLocal(index, env);

    std::optional<ActionId> forced;
    if (options.policy) forced = options.policy(env, domain);
    ActionIndex local;
    if (forced) {
      auto it = local_of_[index].find(*forced);
      if (it == local_of_[index].end()) {
        throw EnvironmentError("scripted action outside the acting agent: " +
                               fx_.catalog.at(*forced).Key());
      }
      local = it->second;
    } else {
      const double epsilon = options.epsilon.value_or(
          DqnAgent::AnnealedEpsilon(config_.hyper, total_steps_));
      const auto t0 = Clock::now();
      local = agent.dqn.SelectAction(state, valid, epsilon, rng);
      agent_seconds_ += Seconds(t0);
    }
    const ActionId action = agent.actions[local];
    StepResult step = env.Step(action, rng);
    ++result.length;
    if (options.learn) ++total_steps_;
    result.reward += step.reward.total;

    const std::string& acting = flat
        ? fx_.registry.name(fx_.catalog.at(action).domain)
        : fx_.registry.name(domain);
    ++result.domain_steps[acting];
    if (result.domains.empty() || result.domains.back() != acting) {
      result.domains.push_back(acting);
    }

    const bool done = !flat && env.SubdialogueDone(domain);
    if (options.learn) {
      Transition t{std::move(state), local, step.reward.total,
                   agent.space.Encode(step.observation).values,
                   step.terminal || done, ValidLocal(index, env)};
      const auto t0 = Clock::now();
      agent.dqn.Remember(std::move(t));
      agent.dqn.TrainOnMinibatch(rng);
      agent_seconds_ += Seconds(t0);
    }
    obs = step.observation;
    if (!flat) {
      const DomainId next = NextDomain(domain, obs, done, env.state().turn);
      if (next != domain) ++result.switches;
      domain = next;
    }
  }
  result.completed = env.state().terminal;
  result.success = env.TaskSuccess();
  return result;
}

TrainingLog NdqnSystem::Train(DialogueEnv& env, const TrainOptions& options) {
  TrainingLog log;
  if (options.budget == 0) return log;
  const std::size_t every = std::max<std::size_t>(options.checkpoint_every, 1);
  Rng rng(config_.seed);
  const double agent_start = agent_seconds_;
  std::size_t done = 0;
  std::size_t next_checkpoint = std::min(every, options.budget);
  double sum_reward = 0, sum_success = 0, sum_length = 0;
  std::size_t window = 0;
  TrainingRow last;
  while (done < options.budget) {
    env.Reset(rng);
    EpisodeOptions opts;
    opts.learn = true;
    opts.step_limit = options.budget - done;
    EpisodeResult ep = RunEpisode(env, opts, rng);
    done += ep.length;
    if (ep.completed) {
      sum_reward += ep.reward;
      sum_success += ep.success;
      sum_length += ep.length;
      ++window;
      log.episodes.push_back(std::move(ep));
    }
    if (done >= next_checkpoint) {
      TrainingRow row = last;
      row.step = done;
      row.episodes = log.episodes.size();
      if (window > 0) {
        row.avg_reward = sum_reward / window;
        row.avg_success = sum_success / window;
        row.avg_length = sum_length / window;
      }
      // Learning time only; the simulator is excluded.
      row.elapsed_seconds = agent_seconds_ - agent_start;
      log.rows.push_back(row);
      last = row;
      sum_reward = sum_success = sum_length = 0;
      window = 0;
      while (next_checkpoint <= done) next_checkpoint += every;
      next_checkpoint = std::min(next_checkpoint, options.budget);
    }
  }
  return log;
}

EvalResult NdqnSystem::Evaluate(DialogueEnv& env, int episodes, std::uint64_t seed) {
  EvalResult out;
  Rng rng(seed);
  EpisodeOptions opts;
  opts.epsilon = 0.0;
  for (int i = 0; i < episodes; ++i) {
    env.Reset(rng);
    EpisodeResult ep = RunEpisode(env, opts, rng);
    out.avg_reward += ep.reward;
    out.avg_success += ep.success;
    out.avg_length += ep.length;
  }
  out.episodes = episodes;
  if (episodes > 0) {
    out.avg_reward /= episodes;
    out.avg_success /= episodes;
    out.avg_length /= episodes;
  }
  return out;
}

ActionId NdqnSystem::GreedyAction(DomainId domain, const DialogueEnv& env) const {
  const std::size_t index = AgentFor(domain);
  const Agent& agent = agents_[index];
  const std::vector<double> q = agent.dqn.QValues(agent.space.Encode(env.state().last).values);
  const std::vector<ActionIndex> valid = ValidLocal(index, env);
  ActionIndex best = valid.front();
  for (ActionIndex a : valid) {
    if (q[a] > q[best]) best = a;
  }
  return agent.actions[best];
}

void NdqnSystem::Save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir + "/system.txt");
  if (!manifest) throw InputError("cannot write " + dir + "/system.txt");
  manifest << "mode " << SystemModeName(config_.mode) << '\n'
           << "compression " << CompressionName(config_.compression) << '\n'
           << "steps " << total_steps_ << '\n';
  for (const Agent& a : agents_) {
    manifest << "agent " << a.name << ' ' << a.space.size() << ' ' << a.actions.size() << '\n';
    a.dqn.Save(dir + "/" + a.name);
  }
}

void NdqnSystem::Load(const std::string& dir) {
  std::ifstream manifest(dir + "/system.txt");
  if (!manifest) throw NotFoundError("no checkpoint at " + dir);
  std::string key, value;
  std::size_t agent = 0;
  while (manifest >> key) {
    if (key == "mode") {
      manifest >> value;
      if (ParseSystemMode(value) != config_.mode) throw InputError("checkpoint mode is " + value);
    } else if (key == "compression") {
      manifest >> value;
      if (ParseCompression(value) != config_.compression) {
        throw InputError("checkpoint compression is " + value);
      }
    } else if (key == "steps") {
      manifest >> total_steps_;
    } else if (key == "agent") {
      std::size_t states = 0, actions = 0;
      manifest >> value >> states >> actions;
      if (agent >= agents_.size() || agents_[agent].name != value ||
          agents_[agent].space.size() != states || agents_[agent].actions.size() != actions) {
        throw InputError("checkpoint agent " + value + " does not match this system");
      }
      agents_[agent].dqn.Load(dir + "/" + value);
      ++agent;
    } else {
      throw InputError("unknown checkpoint key " + key);
    }
  }
  if (agent != agents_.size()) throw InputError("checkpoint is missing agents");
}

}  // namespace ndqn
