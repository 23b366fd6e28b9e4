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

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ndqn/errors.h"
#include "ndqn/seed_corpus.h"

namespace ndqn {
namespace {

const std::string kData = NDQN_DEFAULT_DATA_DIR;

TEST(DialogueActTest, ParsesAppendixNotation) {
  DialogueAct act = DialogueAct::Parse(
      "ExpConfirm(h_day=$h_day,h_month=$h_month,h_nights=$h_nights)");
  EXPECT_EQ(act.type, ActType::kExpConfirm);
  ASSERT_EQ(act.params.size(), 3u);
  EXPECT_EQ(act.params[1].name, "h_month");
  EXPECT_EQ(act.params[1].value, "$h_month");
  EXPECT_EQ(act.Key(), "ExpConfirm(h_day,h_month,h_nights)");
  EXPECT_EQ(act.ToString(),
            "ExpConfirm(h_day=$h_day,h_month=$h_month,h_nights=$h_nights)");
  EXPECT_EQ(DialogueAct::Parse(act.ToString()), act);
}

TEST(DialogueActTest, BareParamsAndRoundTrip) {
  DialogueAct act = DialogueAct::Parse("Salutation(greeting)");
  EXPECT_EQ(act.Key(), "Salutation(greeting)");
  EXPECT_EQ(DialogueAct::Parse(act.ToString()).Key(), act.Key());
}

TEST(DialogueActTest, RejectsMalformed) {
  EXPECT_THROW(DialogueAct::Parse("Shout(x)"), InputError);
  EXPECT_THROW(DialogueAct::Parse("Request(h_city"), InputError);
  EXPECT_THROW(DialogueAct::Parse(""), InputError);
}

TEST(DialogueActTest, ActTypeNamesRoundTrip) {
  for (ActType t : {ActType::kSalutation, ActType::kProvide, ActType::kRequest,
                    ActType::kAskFor, ActType::kApology, ActType::kExpConfirm,
                    ActType::kImpConfirm, ActType::kRetrieve}) {
    EXPECT_EQ(ParseActType(ActTypeName(t)), t);
  }
  EXPECT_FALSE(ParseActType("Nope").has_value());
}

TEST(DomainRegistryTest, ReadsFixture) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt");
  ASSERT_EQ(reg.size(), 3u);
  EXPECT_EQ(reg.name(reg.ids()[0]), "meta");
  EXPECT_EQ(reg.start(), reg.Find("meta"));
  EXPECT_EQ(reg.DomainOfSlot("h_city"), reg.Find("hotels"));
  EXPECT_EQ(reg.TaskDomains().size(), 2u);
  EXPECT_THROW(reg.Get("flights"), ConfigError);
}

TEST(DomainRegistryTest, RestrictionKeepsOrderAndTrimsSlots) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt");
  DomainRegistry only = reg.Restricted({"hotels"}, {{"hotels", {"h_city"}}});
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only.slots(only.Get("hotels")), std::vector<std::string>{"h_city"});
  EXPECT_FALSE(only.DomainOfSlot("h_day").has_value());
}

TEST(ActionCatalogTest, FixtureSizes) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt");
  ActionCatalog desk = ActionCatalog::ReadFile(kData + "/actions_desk.txt", reg);
  ActionCatalog full = ActionCatalog::ReadFile(kData + "/actions_full.txt", reg);
  EXPECT_EQ(desk.size(), 24u);
  EXPECT_EQ(full.size(), 69u);
  EXPECT_EQ(desk.ActionsOf(reg.Get("meta")).size(), 6u);
  EXPECT_EQ(desk.ActionsOf(reg.Get("restaurants")).size(), 8u);
  EXPECT_EQ(desk.ActionsOf(reg.Get("hotels")).size(), 10u);
  EXPECT_EQ(full.ActionsOf(reg.Get("meta")).size(), 9u);
  EXPECT_EQ(full.ActionsOf(reg.Get("restaurants")).size(), 27u);
  EXPECT_EQ(full.ActionsOf(reg.Get("hotels")).size(), 33u);
  EXPECT_THROW(desk.Get("Provide(nothing)"), NotFoundError);
}

TEST(ActionCatalogTest, RestrictedRegistryDropsForeignActs) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt")
                           .Restricted({"hotels"}, {{"hotels", {"h_city"}}});
  ActionCatalog desk = ActionCatalog::ReadFile(kData + "/actions_desk.txt", reg);
  for (const DialogueAct& a : desk.acts()) {
    for (const std::string& p : a.ParamNames()) {
      if (p.starts_with("h_") && p != "h_info") EXPECT_EQ(p, "h_city");
    }
  }
  EXPECT_TRUE(desk.Find("Retrieve(h_info)").has_value());
  EXPECT_FALSE(desk.Find("Apology(r_food)").has_value());
}

TEST(ActionCatalogTest, DuplicateIsConfigError) {
  ActionCatalog cat;
  cat.Add(DialogueAct::Parse("Request(h_city)"));
  EXPECT_THROW(cat.Add(DialogueAct::Parse("Request(h_city=$h_city)")),
               ConfigError);
}

TEST(SeedCorpusTest, FixtureCoversDeskCatalog) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt");
  ActionCatalog desk = ActionCatalog::ReadFile(kData + "/actions_desk.txt", reg);
  auto seeds = ReadSeedCorpusFile(kData + "/seed_dialogues.txt");
  EXPECT_EQ(seeds.size(), 12u);
  std::set<std::string> induced;
  for (const std::string& k : InducedActionKeys(seeds)) induced.insert(k);
  for (const DialogueAct& a : desk.acts()) EXPECT_TRUE(induced.count(a.Key())) << a.Key();
  for (const std::string& k : induced) EXPECT_TRUE(desk.Find(k)) << k;
  EXPECT_EQ(seeds[0].DomainSegments(),
            (std::vector<std::string>{"meta", "hotels", "meta", "restaurants", "meta"}));
}

TEST(SeedCorpusTest, SerializeRoundTrip) {
  auto seeds = ReadSeedCorpusFile(kData + "/seed_dialogues.txt");
  std::stringstream ss;
  WriteSeedCorpus(ss, seeds);
  EXPECT_EQ(ParseSeedCorpus(ss, "mem"), seeds);
}

TEST(SeedCorpusTest, EmptyAndMalformed) {
  std::istringstream empty("");
  EXPECT_TRUE(ParseSeedCorpus(empty, "e").empty());
  std::istringstream bad("@dialogue 1\nmeta | SYS | [Salutation(greeting)] | \"hi\"\nmeta | BOT | [] | \"x\"\n");
  try {
    ParseSeedCorpus(bad, "bad");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream orphan("meta | USR | [] | \"x\"\n");
  EXPECT_THROW(ParseSeedCorpus(orphan, "o"), ParseError);
}

TEST(SeedCorpusTest, ActContextsPairPreviousTurns) {
  std::istringstream in(
      "@dialogue 1\n"
      "meta | SYS | [Salutation(greeting)] | \"hello\"\n"
      "meta | USR | [] | \"a hotel please\"\n"
      "hotels | SYS | [Request(h_city)] | \"which city\"\n");
  auto ctx = ActContexts(ParseSeedCorpus(in, "m"));
  ASSERT_EQ(ctx.size(), 2u);
  EXPECT_EQ(ctx[0].system_text, "");
  EXPECT_EQ(ctx[1].system_text, "hello");
  EXPECT_EQ(ctx[1].user_text, "a hotel please");
  EXPECT_EQ(ctx[1].domain, "hotels");
}

TEST(SeedCorpusTest, VocabularyPerDomain) {
  DomainRegistry reg = DomainRegistry::ReadFile(kData + "/domains.txt");
  SlotLexicon lex = SlotLexicon::ReadFile(kData + "/lexicon.txt");
  auto seeds = ReadSeedCorpusFile(kData + "/seed_dialogues.txt");
  FeaturePipeline raw(Compression::kRaw, lex, SynonymMap{});
  FeaturePipeline comp(Compression::kDelexSynonym, lex,
                       SynonymMap::ReadFile(kData + "/synonyms.txt"));
  Vocabulary hr = InduceVocabulary(seeds, raw, reg, lex, "hotels");
  Vocabulary hc = InduceVocabulary(seeds, comp, reg, lex, "hotels");
  EXPECT_TRUE(hr.Contains("york"));
  EXPECT_FALSE(hr.Contains("japanese"));
  EXPECT_TRUE(hc.Contains("$h_city"));
  EXPECT_FALSE(hc.Contains("edinburgh"));
  EXPECT_LT(hc.size(), hr.size());
  Vocabulary all = InduceVocabulary(seeds, raw, reg, lex);
  EXPECT_TRUE(all.Contains("japanese"));
  EXPECT_TRUE(all.Contains("york"));
}

}  // namespace
}  // namespace ndqn
