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

#include "ndqn/text_features.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

// Yields (line number, fields) for each non-empty, non-comment line.
template <typename Fn>
void ForEachTabbedLine(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    fn(number, fields);
  }
}

}  // namespace

Vocabulary::Vocabulary(const Tokens& tokens) {
  for (const std::string& t : tokens) Add(t);
}

std::size_t Vocabulary::Add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

bool Vocabulary::Contains(const std::string& token) const {
  return index_.contains(token);
}

std::optional<std::size_t> Vocabulary::IndexOf(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::ReadFile(const std::string& path) {
  Vocabulary vocab;
  ForEachTabbedLine(path, [&](int line, const std::vector<std::string>& f) {
    if (f.size() != 1 || f[0].empty()) {
      throw ParseError(path, line, "expected one token per line");
    }
    if (vocab.Contains(f[0])) {
      throw ParseError(path, line, "duplicate token '" + f[0] + "'");
    }
    vocab.Add(f[0]);
  });
  return vocab;
}

void Vocabulary::WriteFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (const std::string& t : tokens_) out << t << '\n';
}

void SlotLexicon::Add(const std::string& value, const std::string& slot_id) {
  auto it = value_to_slot_.find(value);
  if (it != value_to_slot_.end()) {
    if (it->second != slot_id) {
      throw ConfigError("lexicon value '" + value + "' maps to both " +
                        it->second + " and " + slot_id);
    }
    return;
  }
  value_to_slot_.emplace(value, slot_id);
  slot_to_values_[slot_id].push_back(value);
}

void SlotLexicon::Merge(const SlotLexicon& other) {
  for (const auto& [slot, values] : other.slot_to_values_) {
    for (const std::string& v : values) Add(v, slot);
  }
}

std::optional<std::string> SlotLexicon::SlotOf(const std::string& value) const {
  auto it = value_to_slot_.find(value);
  if (it == value_to_slot_.end()) return std::nullopt;
  return it->second;
}

const Tokens& SlotLexicon::ValuesOf(const std::string& slot_id) const {
  static const Tokens kEmpty;
  auto it = slot_to_values_.find(slot_id);
  return it == slot_to_values_.end() ? kEmpty : it->second;
}

std::vector<std::string> SlotLexicon::SlotIds() const {
  std::vector<std::string> ids;
  for (const auto& [slot, values] : slot_to_values_) ids.push_back(slot);
  return ids;
}

SlotLexicon SlotLexicon::ReadFile(const std::string& path) {
  SlotLexicon lexicon;
  ForEachTabbedLine(path, [&](int line, const std::vector<std::string>& f) {
    if (f.size() != 2 || f[0].empty() || f[1].size() < 2 || f[1][0] != '$') {
      throw ParseError(path, line, "expected value<TAB>$slot_id");
    }
    try {
      lexicon.Add(f[0], f[1]);
    } catch (const ConfigError& e) {
      throw ParseError(path, line, e.what());
    }
  });
  return lexicon;
}

void SynonymMap::Add(const std::string& word, const std::string& synonym) {
  map_[word] = synonym;
}

std::optional<std::string> SynonymMap::Lookup(const std::string& word) const {
  auto it = map_.find(word);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void SynonymMap::Validate(const Vocabulary& vocab) const {
  for (const auto& [word, synonym] : map_) {
    if (!vocab.Contains(synonym)) {
      throw ConfigError("synonym '" + synonym + "' for '" + word +
                        "' is not in the vocabulary");
    }
  }
}

SynonymMap SynonymMap::RestrictedTo(const Vocabulary& vocab) const {
  SynonymMap out;
  for (const auto& [word, synonym] : map_) {
    if (vocab.Contains(synonym) && !vocab.Contains(word)) out.Add(word, synonym);
  }
  return out;
}

SynonymMap SynonymMap::ReadFile(const std::string& path) {
  SynonymMap map;
  ForEachTabbedLine(path, [&](int line, const std::vector<std::string>& f) {
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      throw ParseError(path, line, "expected word<TAB>synonym");
    }
    map.Add(f[0], f[1]);
  });
  return map;
}

Tokens Tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '$' || c == '_') {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    }
    // Other punctuation is dropped without splitting ("don't" -> "dont").
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Tokens Delexicalize(const Tokens& tokens, const SlotLexicon& lexicon) {
  Tokens out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    auto slot = lexicon.SlotOf(t);
    out.push_back(slot ? *slot : t);
  }
  return out;
}

Tokens Synonymize(const Tokens& tokens, const SynonymMap& synonyms,
                  const Vocabulary& vocab) {
  Tokens out;
  for (const std::string& t : tokens) {
    if (vocab.Contains(t)) {
      out.push_back(t);
    } else if (auto syn = synonyms.Lookup(t); syn && vocab.Contains(*syn)) {
      out.push_back(*syn);
    }
  }
  return out;
}

StateVector Vectorize(const Tokens& system_tokens,
                      const std::vector<ScoredToken>& user_tokens,
                      const Vocabulary& vocab) {
  StateVector s;
  s.values.assign(vocab.size(), 0.0);
  s.provenance.assign(vocab.size(), FeatureSource::kAbsent);
  for (const std::string& t : system_tokens) {
    if (auto i = vocab.IndexOf(t)) {
      s.values[*i] = 1.0;
      s.provenance[*i] = FeatureSource::kSystem;
    }
  }
  // A word repeated by the user keeps its highest confidence.
  std::vector<bool> seen(vocab.size(), false);
  for (const ScoredToken& t : user_tokens) {
    auto i = vocab.IndexOf(t.token);
    if (!i) continue;
    const double c = std::clamp(t.confidence, 0.0, 1.0);
    s.values[*i] = seen[*i] ? std::max(s.values[*i], c) : c;
    s.provenance[*i] = FeatureSource::kUser;
    seen[*i] = true;
  }
  return s;
}

std::string CompressionName(Compression compression) {
  return compression == Compression::kRaw ? "raw" : "delex";
}

Compression ParseCompression(const std::string& name) {
  if (name == "raw") return Compression::kRaw;
  if (name == "delex" || name == "compressed" || name == "delex+syn") {
    return Compression::kDelexSynonym;
  }
  throw ConfigError("unknown compression '" + name + "'");
}

std::string FeaturePipeline::Rewrite(const std::string& token) const {
  if (compression_ == Compression::kRaw) return token;
  auto slot = lexicon_.SlotOf(token);
  return slot ? *slot : token;
}

Tokens FeaturePipeline::Rewrite(const Tokens& tokens) const {
  if (compression_ == Compression::kRaw) return tokens;
  return Delexicalize(tokens, lexicon_);
}

StateVector FeaturePipeline::Encode(const Tokens& system_tokens,
                                    const std::vector<ScoredToken>& user_tokens,
                                    const Vocabulary& vocab) const {
  if (compression_ == Compression::kRaw) {
    return Vectorize(system_tokens, user_tokens, vocab);
  }
  Tokens system = Synonymize(Rewrite(system_tokens), synonyms_, vocab);
  std::vector<ScoredToken> user;
  user.reserve(user_tokens.size());
  for (const ScoredToken& t : user_tokens) {
    Tokens one = Synonymize({Rewrite(t.token)}, synonyms_, vocab);
    if (!one.empty()) user.push_back({one.front(), t.confidence});
  }
  return Vectorize(system, user, vocab);
}

}  // namespace ndqn
