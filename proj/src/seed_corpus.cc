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

#include "ndqn/seed_corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitRecord(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  // The verbalisation is last and may itself contain '|'.
  for (int i = 0; i < 3; ++i) {
    const auto bar = line.find('|', start);
    if (bar == std::string::npos) break;
    out.push_back(Trim(line.substr(start, bar - start)));
    start = bar + 1;
  }
  out.push_back(Trim(line.substr(start)));
  return out;
}

}  // namespace

std::vector<std::string> SeedDialogue::DomainSegments() const {
  std::vector<std::string> out;
  for (const SeedTurn& t : turns) {
    if (out.empty() || out.back() != t.domain) out.push_back(t.domain);
  }
  return out;
}

std::vector<SeedDialogue> ParseSeedCorpus(std::istream& in,
                                          const std::string& source) {
  std::vector<SeedDialogue> dialogues;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.starts_with("@dialogue")) {
      SeedDialogue d;
      d.id = Trim(line.substr(9));
      if (d.id.empty()) d.id = std::to_string(dialogues.size() + 1);
      dialogues.push_back(std::move(d));
      continue;
    }
    if (dialogues.empty()) {
      throw ParseError(source, number, "turn before any @dialogue header");
    }
    std::vector<std::string> f = SplitRecord(line);
    if (f.size() != 4) {
      throw ParseError(source, number,
                       "expected 'domain | speaker | [act] | \"text\"'");
    }
    SeedTurn turn;
    turn.domain = f[0];
    if (turn.domain.empty()) throw ParseError(source, number, "empty domain");
    if (f[1] == "SYS") {
      turn.speaker = Speaker::kSystem;
    } else if (f[1] == "USR") {
      turn.speaker = Speaker::kUser;
    } else {
      throw ParseError(source, number, "speaker must be SYS or USR");
    }
    const std::string& act = f[2];
    if (act.size() < 2 || act.front() != '[' || act.back() != ']') {
      throw ParseError(source, number, "action must be in square brackets");
    }
    const std::string inner = Trim(act.substr(1, act.size() - 2));
    if (turn.speaker == Speaker::kSystem) {
      if (inner.empty()) throw ParseError(source, number, "system turn without act");
      try {
        turn.act = DialogueAct::Parse(inner);
      } catch (const InputError& e) {
        throw ParseError(source, number, e.what());
      }
    } else if (!inner.empty()) {
      throw ParseError(source, number, "user turns carry no act");
    }
    const std::string& text = f[3];
    if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
      throw ParseError(source, number, "verbalisation must be double-quoted");
    }
    turn.text = text.substr(1, text.size() - 2);
    dialogues.back().turns.push_back(std::move(turn));
  }
  return dialogues;
}

std::vector<SeedDialogue> ReadSeedCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  return ParseSeedCorpus(in, path);
}

void WriteSeedCorpus(std::ostream& out,
                     const std::vector<SeedDialogue>& dialogues) {
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    if (i) out << '\n';
    out << "@dialogue " << dialogues[i].id << '\n';
    for (const SeedTurn& t : dialogues[i].turns) {
      out << t.domain << " | "
          << (t.speaker == Speaker::kSystem ? "SYS" : "USR") << " | ["
          << (t.act ? t.act->ToString() : "") << "] | \"" << t.text << "\"\n";
    }
  }
}

std::vector<std::string> InducedActionKeys(
    const std::vector<SeedDialogue>& dialogues) {
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const SeedDialogue& d : dialogues) {
    for (const SeedTurn& t : d.turns) {
      if (!t.act) continue;
      const std::string key = t.act->Key();
      if (seen.insert(key).second) keys.push_back(key);
    }
  }
  return keys;
}

Vocabulary InduceVocabulary(const std::vector<SeedDialogue>& dialogues,
                            const FeaturePipeline& pipeline,
                            const DomainRegistry& registry,
                            const SlotLexicon& lexicon,
                            const std::string& domain) {
  Tokens candidates;
  std::vector<DomainId> owners;
  if (domain.empty()) {
    owners = registry.ids();
  } else {
    owners.push_back(registry.Get(domain));
  }
  for (const SeedDialogue& d : dialogues) {
    for (const SeedTurn& t : d.turns) {
      if (!registry.Find(t.domain)) continue;
      if (!domain.empty() && t.domain != domain) continue;
      for (const std::string& tok : pipeline.Rewrite(Tokenize(t.text))) {
        // Values of slots outside this feature space are not features.
        if (auto slot = lexicon.SlotOf(tok)) {
          auto owner = registry.DomainOfSlot(slot->substr(1));
          if (!owner || std::find(owners.begin(), owners.end(), *owner) ==
                            owners.end()) {
            continue;
          }
        }
        if (tok.starts_with('$')) {
          auto owner = registry.DomainOfSlot(tok.substr(1));
          if (!owner || std::find(owners.begin(), owners.end(), *owner) ==
                            owners.end()) {
            continue;
          }
        }
        candidates.push_back(tok);
      }
    }
  }
  for (DomainId id : owners) {
    for (const std::string& slot : registry.slots(id)) {
      const std::string slot_id = "$" + slot;
      if (pipeline.compression() == Compression::kRaw) {
        for (const std::string& v : lexicon.ValuesOf(slot_id)) candidates.push_back(v);
      } else {
        candidates.push_back(slot_id);
      }
    }
  }
  // Compressed spaces drop words whose synonym is itself a feature.
  const std::set<std::string> present(candidates.begin(), candidates.end());
  Vocabulary vocab;
  for (const std::string& tok : candidates) {
    if (pipeline.compression() != Compression::kRaw) {
      auto syn = pipeline.synonyms().Lookup(tok);
      if (syn && present.contains(*syn)) continue;
    }
    vocab.Add(tok);
  }
  return vocab;
}

std::vector<ActContext> ActContexts(const std::vector<SeedDialogue>& dialogues) {
  std::vector<ActContext> out;
  for (const SeedDialogue& d : dialogues) {
    std::string last_system;
    std::string last_user;
    for (const SeedTurn& t : d.turns) {
      if (t.speaker == Speaker::kUser) {
        last_user = t.text;
        continue;
      }
      out.push_back({last_system, last_user, *t.act, t.domain});
      last_system = t.text;
      last_user.clear();
    }
  }
  return out;
}

}  // namespace ndqn
