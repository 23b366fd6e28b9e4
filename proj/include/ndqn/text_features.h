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

#ifndef NDQN_TEXT_FEATURES_H_
#define NDQN_TEXT_FEATURES_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ndqn {

using Tokens = std::vector<std::string>;

// A recognised user word together with its (simulated) ASR confidence.
struct ScoredToken {
  std::string token;
  double confidence = 1.0;

  friend bool operator==(const ScoredToken&, const ScoredToken&) = default;
};

// Ordered, duplicate-free token list. A token's rank is its feature index.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const Tokens& tokens);

  // Appends `token` unless present. Returns its index.
  std::size_t Add(const std::string& token);
  bool Contains(const std::string& token) const;
  std::optional<std::size_t> IndexOf(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const Tokens& tokens() const { return tokens_; }

  // One token per line; blank lines and '#' comments are skipped.
  static Vocabulary ReadFile(const std::string& path);
  void WriteFile(const std::string& path) const;

 private:
  Tokens tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Surface value -> slot id (e.g. "edinburgh" -> "$h_city").
class SlotLexicon {
 public:
  // Throws ConfigError if `value` is already bound to a different slot.
  void Add(const std::string& value, const std::string& slot_id);
  void Merge(const SlotLexicon& other);
  std::optional<std::string> SlotOf(const std::string& value) const;
  // Values for a slot id, in insertion order.
  const Tokens& ValuesOf(const std::string& slot_id) const;
  std::vector<std::string> SlotIds() const;
  bool empty() const { return value_to_slot_.empty(); }
  const std::map<std::string, std::string>& entries() const {
    return value_to_slot_;
  }

  // Lines of "value<TAB>slot_id".
  static SlotLexicon ReadFile(const std::string& path);

 private:
  std::map<std::string, std::string> value_to_slot_;
  std::map<std::string, Tokens> slot_to_values_;
};

// Unknown word -> known vocabulary word ("fancy" -> "want").
class SynonymMap {
 public:
  void Add(const std::string& word, const std::string& synonym);
  std::optional<std::string> Lookup(const std::string& word) const;
  // Throws ConfigError if some image is not in `vocab`.
  void Validate(const Vocabulary& vocab) const;
  // Copy restricted to entries whose image is in `vocab`.
  SynonymMap RestrictedTo(const Vocabulary& vocab) const;
  const std::map<std::string, std::string>& entries() const { return map_; }

  // Lines of "word<TAB>synonym".
  static SynonymMap ReadFile(const std::string& path);

 private:
  std::map<std::string, std::string> map_;
};

enum class FeatureSource { kAbsent, kSystem, kUser };

struct StateVector {
  std::vector<double> values;
  std::vector<FeatureSource> provenance;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const StateVector&, const StateVector&) = default;
};

// Lowercases, strips punctuation and splits on whitespace. '$' and '_' are
// kept so slot ids and placeholders survive.
Tokens Tokenize(std::string_view text);

Tokens Delexicalize(const Tokens& tokens, const SlotLexicon& lexicon);

// In-vocabulary tokens pass, mapped tokens are replaced, the rest dropped.
Tokens Synonymize(const Tokens& tokens, const SynonymMap& synonyms,
                  const Vocabulary& vocab);

// System tokens set their feature to 1, user tokens to their confidence.
// User features override system ones.
StateVector Vectorize(const Tokens& system_tokens,
                      const std::vector<ScoredToken>& user_tokens,
                      const Vocabulary& vocab);

enum class Compression { kRaw, kDelexSynonym };

std::string CompressionName(Compression compression);
Compression ParseCompression(const std::string& name);

// Raw text -> per-agent feature tokens, for one compression scheme.
class FeaturePipeline {
 public:
  FeaturePipeline(Compression compression, SlotLexicon lexicon,
                  SynonymMap synonyms)
      : compression_(compression),
        lexicon_(std::move(lexicon)),
        synonyms_(std::move(synonyms)) {}

  Compression compression() const { return compression_; }
  const SlotLexicon& lexicon() const { return lexicon_; }
  const SynonymMap& synonyms() const { return synonyms_; }

  // Token-level rewrite without vocabulary filtering. Raw mode is identity.
  std::string Rewrite(const std::string& token) const;
  Tokens Rewrite(const Tokens& tokens) const;

  StateVector Encode(const Tokens& system_tokens,
                     const std::vector<ScoredToken>& user_tokens,
                     const Vocabulary& vocab) const;

 private:
  Compression compression_;
  SlotLexicon lexicon_;
  SynonymMap synonyms_;
};

}  // namespace ndqn

#endif  // NDQN_TEXT_FEATURES_H_
