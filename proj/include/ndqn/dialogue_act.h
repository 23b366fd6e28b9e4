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

#ifndef NDQN_DIALOGUE_ACT_H_
#define NDQN_DIALOGUE_ACT_H_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ndqn {

struct DomainId {
  std::size_t value = 0;
  auto operator<=>(const DomainId&) const = default;
};

// Registered domains in tie-break order, with their slots and the keywords
// that signal them in user turns.
class DomainRegistry {
 public:
  DomainId Add(const std::string& name, std::vector<std::string> slots = {});
  void AddKeywords(DomainId id, const std::vector<std::string>& words);
  void set_start(DomainId id) { start_ = id; }

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  std::vector<DomainId> ids() const;
  const std::string& name(DomainId id) const { return names_.at(id.value); }
  std::optional<DomainId> Find(std::string_view name) const;
  DomainId Get(std::string_view name) const;  // throws ConfigError
  const std::vector<std::string>& slots(DomainId id) const {
    return slots_.at(id.value);
  }
  const std::vector<std::string>& keywords(DomainId id) const {
    return keywords_.at(id.value);
  }
  std::optional<DomainId> DomainOfSlot(std::string_view slot) const;
  std::optional<DomainId> start() const { return start_; }
  // Domains that own slots.
  std::vector<DomainId> TaskDomains() const;

  // Keeps `names` only (registry order preserved) and, when given, trims
  // each domain's slots to `slot_subset`.
  DomainRegistry Restricted(
      const std::vector<std::string>& names,
      const std::map<std::string, std::vector<std::string>>& slot_subset) const;

  static DomainRegistry ReadFile(const std::string& path);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> slots_;
  std::vector<std::vector<std::string>> keywords_;
  std::optional<DomainId> start_;
};

enum class ActType {
  kSalutation,
  kProvide,
  kRequest,
  kAskFor,
  kApology,
  kExpConfirm,
  kImpConfirm,
  kRetrieve,
};

std::string ActTypeName(ActType type);
std::optional<ActType> ParseActType(std::string_view name);

struct ActParam {
  std::string name;
  std::string value;  // "$h_city" placeholder, literal, or empty
  friend bool operator==(const ActParam&, const ActParam&) = default;
};

struct DialogueAct {
  ActType type = ActType::kSalutation;
  std::vector<ActParam> params;
  DomainId domain;

  // Identity ignoring parameter values: "ExpConfirm(h_day,h_month)".
  std::string Key() const;
  // Appendix-style rendering: "ExpConfirm(h_city=$h_city)".
  std::string ToString() const;
  std::vector<std::string> ParamNames() const;

  // Accepts "Type(a,b)" and "Type(a=$a,b=$b)". Throws InputError.
  static DialogueAct Parse(std::string_view text);

  friend bool operator==(const DialogueAct&, const DialogueAct&) = default;
};

using ActionId = std::size_t;

// The global action inventory. Indices are global action ids.
class ActionCatalog {
 public:
  ActionId Add(DialogueAct act);
  std::size_t size() const { return acts_.size(); }
  const DialogueAct& at(ActionId id) const { return acts_.at(id); }
  const std::vector<DialogueAct>& acts() const { return acts_; }
  std::optional<ActionId> Find(const std::string& key) const;
  ActionId Get(const std::string& key) const;  // throws NotFoundError
  std::vector<ActionId> ActionsOf(DomainId domain) const;
  std::vector<ActionId> AllActions() const;

  // Lines of "domain<TAB>Act(...)".
  static ActionCatalog ReadFile(const std::string& path,
                                const DomainRegistry& registry);

 private:
  std::vector<DialogueAct> acts_;
  std::map<std::string, ActionId> by_key_;
};

}  // namespace ndqn

#endif  // NDQN_DIALOGUE_ACT_H_
