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

#include "ndqn/dialogue_act.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

constexpr std::pair<ActType, const char*> kActNames[] = {
    {ActType::kSalutation, "Salutation"}, {ActType::kProvide, "Provide"},
    {ActType::kRequest, "Request"},       {ActType::kAskFor, "AskFor"},
    {ActType::kApology, "Apology"},       {ActType::kExpConfirm, "ExpConfirm"},
    {ActType::kImpConfirm, "ImpConfirm"}, {ActType::kRetrieve, "Retrieve"},
};

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitWords(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

// Slot names look like "h_city"; "h_info" and "h_more" are not slots.
bool IsSlotLikeName(const std::string& name) {
  return name.size() > 2 && name[1] == '_' && !name.ends_with("_info") &&
         !name.ends_with("_more");
}

}  // namespace

DomainId DomainRegistry::Add(const std::string& name,
                             std::vector<std::string> slots) {
  if (Find(name)) throw ConfigError("duplicate domain '" + name + "'");
  names_.push_back(name);
  slots_.push_back(std::move(slots));
  keywords_.emplace_back();
  return DomainId{names_.size() - 1};
}

void DomainRegistry::AddKeywords(DomainId id,
                                 const std::vector<std::string>& words) {
  auto& kw = keywords_.at(id.value);
  kw.insert(kw.end(), words.begin(), words.end());
}

std::vector<DomainId> DomainRegistry::ids() const {
  std::vector<DomainId> out;
  for (std::size_t i = 0; i < names_.size(); ++i) out.push_back({i});
  return out;
}

std::optional<DomainId> DomainRegistry::Find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return DomainId{i};
  }
  return std::nullopt;
}

DomainId DomainRegistry::Get(std::string_view name) const {
  if (auto id = Find(name)) return *id;
  throw ConfigError("unknown domain '" + std::string(name) + "'");
}

std::optional<DomainId> DomainRegistry::DomainOfSlot(
    std::string_view slot) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (std::find(slots_[i].begin(), slots_[i].end(), slot) != slots_[i].end()) {
      return DomainId{i};
    }
  }
  return std::nullopt;
}

std::vector<DomainId> DomainRegistry::TaskDomains() const {
  std::vector<DomainId> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!slots_[i].empty()) out.push_back({i});
  }
  return out;
}

DomainRegistry DomainRegistry::Restricted(
    const std::vector<std::string>& names,
    const std::map<std::string, std::vector<std::string>>& slot_subset) const {
  DomainRegistry out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (std::find(names.begin(), names.end(), names_[i]) == names.end()) {
      continue;
    }
    std::vector<std::string> slots = slots_[i];
    if (auto it = slot_subset.find(names_[i]); it != slot_subset.end()) {
      for (const std::string& s : it->second) {
        if (std::find(slots.begin(), slots.end(), s) == slots.end()) {
          throw ConfigError("domain " + names_[i] + " has no slot " + s);
        }
      }
      slots = it->second;
    }
    DomainId id = out.Add(names_[i], slots);
    out.AddKeywords(id, keywords_[i]);
    if (start_ && start_->value == i) out.set_start(id);
  }
  for (const std::string& n : names) {
    if (!Find(n)) throw ConfigError("unknown domain '" + n + "'");
  }
  return out;
}

DomainRegistry DomainRegistry::ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  DomainRegistry registry;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    try {
      if (f[0] == "domain" && f.size() >= 2) {
        registry.Add(f[1], f.size() > 2 ? SplitWords(f[2])
                                        : std::vector<std::string>{});
      } else if (f[0] == "keywords" && f.size() == 3) {
        registry.AddKeywords(registry.Get(f[1]), SplitWords(f[2]));
      } else if (f[0] == "start" && f.size() == 2) {
        registry.set_start(registry.Get(f[1]));
      } else {
        throw ConfigError("unrecognised record");
      }
    } catch (const ConfigError& e) {
      throw ParseError(path, number, e.what());
    }
  }
  if (registry.empty()) throw ConfigError(path + ": no domains registered");
  return registry;
}

std::string ActTypeName(ActType type) {
  for (const auto& [t, name] : kActNames) {
    if (t == type) return name;
  }
  return "?";
}

std::optional<ActType> ParseActType(std::string_view name) {
  for (const auto& [t, n] : kActNames) {
    if (name == n) return t;
  }
  return std::nullopt;
}

std::string DialogueAct::Key() const {
  std::string out = ActTypeName(type) + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i].name;
  }
  return out + ")";
}

std::string DialogueAct::ToString() const {
  std::string out = ActTypeName(type) + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i].name;
    if (!params[i].value.empty()) out += "=" + params[i].value;
  }
  return out + ")";
}

std::vector<std::string> DialogueAct::ParamNames() const {
  std::vector<std::string> out;
  for (const ActParam& p : params) out.push_back(p.name);
  return out;
}

DialogueAct DialogueAct::Parse(std::string_view text) {
  const std::string s = Trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') {
    throw InputError("malformed dialogue act '" + s + "'");
  }
  auto type = ParseActType(Trim(s.substr(0, open)));
  if (!type) throw InputError("unknown act type in '" + s + "'");
  DialogueAct act;
  act.type = *type;
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) throw InputError("empty parameter in '" + s + "'");
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      act.params.push_back({item, ""});
    } else {
      act.params.push_back({Trim(item.substr(0, eq)), Trim(item.substr(eq + 1))});
    }
  }
  return act;
}

ActionId ActionCatalog::Add(DialogueAct act) {
  const std::string key = act.Key();
  if (by_key_.contains(key)) throw ConfigError("duplicate action " + key);
  by_key_.emplace(key, acts_.size());
  acts_.push_back(std::move(act));
  return acts_.size() - 1;
}

std::optional<ActionId> ActionCatalog::Find(const std::string& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

ActionId ActionCatalog::Get(const std::string& key) const {
  if (auto id = Find(key)) return *id;
  throw NotFoundError("no action " + key + " in the catalog");
}

std::vector<ActionId> ActionCatalog::ActionsOf(DomainId domain) const {
  std::vector<ActionId> out;
  for (ActionId i = 0; i < acts_.size(); ++i) {
    if (acts_[i].domain == domain) out.push_back(i);
  }
  return out;
}

std::vector<ActionId> ActionCatalog::AllActions() const {
  std::vector<ActionId> out(acts_.size());
  for (ActionId i = 0; i < acts_.size(); ++i) out[i] = i;
  return out;
}

ActionCatalog ActionCatalog::ReadFile(const std::string& path,
                                      const DomainRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  ActionCatalog catalog;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path, number, "expected domain<TAB>act");
    }
    auto domain = registry.Find(line.substr(0, tab));
    // Acts of domains outside a restricted registry are skipped.
    if (!domain) continue;
    try {
      DialogueAct act = DialogueAct::Parse(line.substr(tab + 1));
      act.domain = *domain;
      bool usable = true;
      for (const ActParam& p : act.params) {
        auto owner = registry.DomainOfSlot(p.name);
        if (IsSlotLikeName(p.name) && !owner) usable = false;
      }
      if (usable) catalog.Add(std::move(act));
    } catch (const std::exception& e) {
      throw ParseError(path, number, e.what());
    }
  }
  return catalog;
}

}  // namespace ndqn
