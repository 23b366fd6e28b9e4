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

#ifndef NDQN_SEED_CORPUS_H_
#define NDQN_SEED_CORPUS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ndqn/dialogue_act.h"
#include "ndqn/text_features.h"

namespace ndqn {

enum class Speaker { kSystem, kUser };

struct SeedTurn {
  std::string domain;
  Speaker speaker = Speaker::kSystem;
  std::optional<DialogueAct> act;  // system turns only
  std::string text;

  friend bool operator==(const SeedTurn&, const SeedTurn&) = default;
};

struct SeedDialogue {
  std::string id;
  std::vector<SeedTurn> turns;

  // Domain of each maximal run of consecutive same-domain turns.
  std::vector<std::string> DomainSegments() const;

  friend bool operator==(const SeedDialogue&, const SeedDialogue&) = default;
};

// Corpus format, one record per line:
//   @dialogue <id>
//   domain | SYS | [Act(...)] | "verbalisation"
//   domain | USR | [] | "verbalisation"
// Blank lines and '#' comments are ignored. Malformed lines raise
// ParseError with the line number.
std::vector<SeedDialogue> ParseSeedCorpus(std::istream& in,
                                          const std::string& source);
std::vector<SeedDialogue> ReadSeedCorpusFile(const std::string& path);
void WriteSeedCorpus(std::ostream& out,
                     const std::vector<SeedDialogue>& dialogues);

// Union of system act keys, in order of first appearance.
std::vector<std::string> InducedActionKeys(
    const std::vector<SeedDialogue>& dialogues);

// Feature vocabulary for one domain (or all domains when `domain` is
// empty): the corpus words of the matching segments after `pipeline`
// rewriting, plus the domain's slot values (raw) or slot ids (compressed).
Vocabulary InduceVocabulary(const std::vector<SeedDialogue>& dialogues,
                            const FeaturePipeline& pipeline,
                            const DomainRegistry& registry,
                            const SlotLexicon& lexicon,
                            const std::string& domain = "");

// (previous system text, previous user text, act) for every system turn:
// the context a policy sees before choosing that act.
struct ActContext {
  std::string system_text;
  std::string user_text;
  DialogueAct act;
  std::string domain;
};
std::vector<ActContext> ActContexts(const std::vector<SeedDialogue>& dialogues);

}  // namespace ndqn

#endif  // NDQN_SEED_CORPUS_H_
