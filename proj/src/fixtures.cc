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

#include "ndqn/fixtures.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::ifstream Open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  return in;
}

bool IsPlaceholderChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

double ParseDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + value + "'");
  }
}

}  // namespace

void TemplateBank::Add(const std::string& key, const std::string& text) {
  by_key_[key].push_back(text);
}

const std::vector<std::string>& TemplateBank::Get(const std::string& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) throw NotFoundError("no template for " + key);
  return it->second;
}

std::vector<std::string> TemplateBank::Keys() const {
  std::vector<std::string> keys;
  for (const auto& [key, texts] : by_key_) keys.push_back(key);
  return keys;
}

const std::string& TemplateBank::Pick(const std::string& key,
                                      std::mt19937_64& rng) const {
  const auto& options = Get(key);
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  return options[pick(rng)];
}

TemplateBank TemplateBank::ReadFile(const std::string& path) {
  std::ifstream in = Open(path);
  TemplateBank bank;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty() || Trim(line)[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path, number, "expected key<TAB>text");
    }
    std::string key = Trim(line.substr(0, tab));
    if (key[0] != '@') {
      try {
        key = DialogueAct::Parse(key).Key();
      } catch (const InputError& e) {
        throw ParseError(path, number, e.what());
      }
    }
    bank.Add(key, Trim(line.substr(tab + 1)));
  }
  return bank;
}

std::string FillPlaceholders(const std::string& text,
                             const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '$') {
      out += text[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && IsPlaceholderChar(text[j])) ++j;
    const std::string name = text.substr(i, j - i);
    auto it = values.find(name);
    out += it == values.end() ? name : it->second;
    i = j;
  }
  return out;
}

std::vector<std::string> VenueTable::Matching(
    const std::string& domain,
    const std::map<std::string, std::string>& constraints) const {
  std::vector<std::string> names;
  for (const Venue& v : venues_) {
    if (v.domain != domain) continue;
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      auto it = v.attributes.find(slot);
      if (it != v.attributes.end() && it->second != value) ok = false;
    }
    if (ok) names.push_back(v.name);
  }
  return names;
}

VenueTable VenueTable::ReadFile(const std::string& path) {
  std::ifstream in = Open(path);
  VenueTable table;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty() || Trim(line)[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, '\t');) f.push_back(Trim(cell));
    if (f.size() < 2) throw ParseError(path, number, "expected domain<TAB>name");
    Venue v{f[0], f[1], {}};
    if (f.size() > 2) {
      std::stringstream attrs(f[2]);
      for (std::string kv; attrs >> kv;) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError(path, number, "expected slot=value");
        v.attributes[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
    }
    table.Add(std::move(v));
  }
  return table;
}

void EnvConfig::Validate() const {
  if (min_goal_domains < 1 || max_goal_domains < min_goal_domains) {
    throw ConfigError("goal domain bounds must satisfy 1 <= min <= max");
  }
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0,1]");
  };
  prob(volunteer_prob, "volunteer_prob");
  prob(noise_prob, "noise_prob");
  prob(action_threshold, "action_threshold");
  if (!(correct_conf_min <= correct_conf_max) || !(noisy_conf_min <= noisy_conf_max) ||
      correct_conf_min < 0 || correct_conf_max > 1 || noisy_conf_min < 0 ||
      noisy_conf_max > 1) {
    throw ConfigError("confidence ranges must be ordered and within [0,1]");
  }
  if (max_turns < 1) throw ConfigError("max_turns must be positive");
  if (step_penalty < 0) throw ConfigError("step_penalty must be non-negative");
}

void EnvConfig::Set(const std::string& key, const std::string& value) {
  const double d = ParseDouble(key, value);
  if (key == "min_goal_domains") min_goal_domains = static_cast<int>(d);
  else if (key == "max_goal_domains") max_goal_domains = static_cast<int>(d);
  else if (key == "volunteer_prob") volunteer_prob = d;
  else if (key == "noise_prob") noise_prob = d;
  else if (key == "correct_conf_min") correct_conf_min = d;
  else if (key == "correct_conf_max") correct_conf_max = d;
  else if (key == "noisy_conf_min") noisy_conf_min = d;
  else if (key == "noisy_conf_max") noisy_conf_max = d;
  else if (key == "max_turns") max_turns = static_cast<int>(d);
  else if (key == "step_penalty") step_penalty = d;
  else if (key == "action_threshold") action_threshold = d;
  else throw ConfigError("unknown env key: " + key);
}

EnvConfig EnvConfig::ReadFile(const std::string& path) {
  std::ifstream in = Open(path);
  EnvConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, number, "expected key = value");
    cfg.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  cfg.Validate();
  return cfg;
}

std::string DefaultDataDir() {
  if (const char* env = std::getenv("NDQN_DATA_DIR"); env && *env) return env;
  return NDQN_DEFAULT_DATA_DIR;
}

FixtureSet LoadFixtures(const std::string& root, const FixtureOptions& options) {
  if (options.catalog != "desk" && options.catalog != "full") {
    throw ConfigError("catalog must be desk or full, got " + options.catalog);
  }
  FixtureSet fx;
  fx.root = root;
  fx.registry = DomainRegistry::ReadFile(root + "/domains.txt");
  if (!options.domains.empty() || !options.slots.empty()) {
    std::vector<std::string> names = options.domains;
    if (names.empty()) {
      for (DomainId id : fx.registry.ids()) names.push_back(fx.registry.name(id));
    }
    fx.registry = fx.registry.Restricted(names, options.slots);
  }
  const SlotLexicon all = SlotLexicon::ReadFile(root + "/lexicon.txt");
  for (const auto& [value, slot] : all.entries()) {
    if (fx.registry.DomainOfSlot(slot.substr(1))) fx.lexicon.Add(value, slot);
  }
  fx.synonyms = SynonymMap::ReadFile(root + "/synonyms.txt");
  fx.catalog = ActionCatalog::ReadFile(
      root + "/actions_" + options.catalog + ".txt", fx.registry);
  fx.templates = TemplateBank::ReadFile(root + "/templates.txt");
  fx.venues = VenueTable::ReadFile(root + "/venues.txt");
  fx.env = EnvConfig::ReadFile(root + "/env.cfg");
  fx.seeds = ReadSeedCorpusFile(root + "/seed_dialogues.txt");

  for (const DialogueAct& act : fx.catalog.acts()) {
    if (!fx.templates.Has(act.Key())) {
      throw ConfigError("no system template for " + act.Key());
    }
  }
  for (DomainId id : fx.registry.ids()) {
    for (const std::string& slot : fx.registry.slots(id)) {
      if (!fx.templates.Has("@slot." + slot)) {
        throw ConfigError("no user template for slot " + slot);
      }
      if (fx.lexicon.ValuesOf("$" + slot).empty()) {
        throw ConfigError("no lexicon values for slot " + slot);
      }
    }
  }
  if (fx.catalog.size() == 0) throw ConfigError("empty action catalog");
  return fx;
}

}  // namespace ndqn
