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

#ifndef NDQN_FIXTURES_H_
#define NDQN_FIXTURES_H_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "ndqn/dialogue_act.h"
#include "ndqn/seed_corpus.h"
#include "ndqn/text_features.h"

namespace ndqn {

// Paraphrases keyed by act key ("Request(h_city)") for the system side and
// by '@'-prefixed intents ("@slot.h_city", "@affirm") for the user side.
class TemplateBank {
 public:
  void Add(const std::string& key, const std::string& text);
  bool Has(const std::string& key) const { return by_key_.contains(key); }
  const std::vector<std::string>& Get(const std::string& key) const;
  const std::string& Pick(const std::string& key, std::mt19937_64& rng) const;
  std::size_t size() const { return by_key_.size(); }
  std::vector<std::string> Keys() const;

  static TemplateBank ReadFile(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>> by_key_;
};

// Replaces each "$slot" placeholder with values["$slot"]; unknown
// placeholders are left as they are.
std::string FillPlaceholders(const std::string& text,
                             const std::map<std::string, std::string>& values);

struct Venue {
  std::string domain;
  std::string name;
  std::map<std::string, std::string> attributes;  // slot -> value
};

class VenueTable {
 public:
  void Add(Venue v) { venues_.push_back(std::move(v)); }
  const std::vector<Venue>& venues() const { return venues_; }
  // Names of venues in `domain` whose attributes agree with `constraints`
  // (slot -> value). Attributes a venue lacks never exclude it.
  std::vector<std::string> Matching(
      const std::string& domain,
      const std::map<std::string, std::string>& constraints) const;

  static VenueTable ReadFile(const std::string& path);

 private:
  std::vector<Venue> venues_;
};

struct EnvConfig {
  int min_goal_domains = 1;
  int max_goal_domains = 2;
  double volunteer_prob = 0.5;
  double noise_prob = 0.1;
  double correct_conf_min = 0.5;
  double correct_conf_max = 1.0;
  double noisy_conf_min = 0.3;
  double noisy_conf_max = 0.7;
  int max_turns = 100;
  double step_penalty = 0.1;
  double action_threshold = 1e-4;

  void Validate() const;  // throws ConfigError
  void Set(const std::string& key, const std::string& value);
  static EnvConfig ReadFile(const std::string& path);
};

struct FixtureOptions {
  std::string catalog = "desk";  // "desk" or "full"
  std::vector<std::string> domains;  // empty keeps every domain
  std::map<std::string, std::vector<std::string>> slots;  // optional trims
};

struct FixtureSet {
  std::string root;
  DomainRegistry registry;
  SlotLexicon lexicon;
  SynonymMap synonyms;
  ActionCatalog catalog;
  TemplateBank templates;
  VenueTable venues;
  EnvConfig env;
  std::vector<SeedDialogue> seeds;
};

// $NDQN_DATA_DIR when set, otherwise the data/ directory of the source tree.
std::string DefaultDataDir();

// Loads and cross-checks every fixture under `root`. Throws ConfigError
// when an act has no template or a lexicon slot is unknown.
FixtureSet LoadFixtures(const std::string& root,
                        const FixtureOptions& options = {});

}  // namespace ndqn

#endif  // NDQN_FIXTURES_H_
