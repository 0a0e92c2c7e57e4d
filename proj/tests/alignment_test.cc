// Copyright 2026 The sumbias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>

#include "sumbias/alignment.h"
#include "sumbias/summary_io.h"
#include "sumbias/synthetic.h"
#include "test_util.h"

namespace sumbias {
namespace {

using Tokens = std::vector<std::string>;

struct EntitySpec {
  std::string id;
  std::string first;
  Gender gender;
  std::vector<std::pair<int, int>> mentions;
};

GeneratedInput MakeInput(const std::string& id, const std::string& text,
                         const std::vector<EntitySpec>& ents) {
  GeneratedInput in;
  in.id = id;
  in.original_id = id;
  in.tokens = SplitWhitespace(text);
  in.sentence.assign(in.tokens.size(), 0);
  for (const auto& e : ents) {
    InputEntity ie;
    ie.id = e.id;
    ie.first = e.first;
    ie.gender = e.gender;
    ie.group = std::string(GenderName(e.gender));
    for (auto [s, t] : e.mentions) ie.mentions.push_back({s, t, e.id});
    in.entities.push_back(ie);
  }
  return in;
}

// "Melissa Levin spoke . Levin left . Ms. Levin smiled . she waved"
GeneratedInput LevinInput() {
  return MakeInput("d#0", "Melissa Levin spoke . Levin left . Ms. Levin smiled . she waved",
                   {{"1", "Melissa", Gender::kFemale, {{0, 1}, {4, 4}, {7, 8}, {11, 11}}}});
}

AlignmentResult AlignText(const std::string& entity, const GeneratedInput& in) {
  SummaryEntity e;
  e.tokens = SplitWhitespace(entity);
  e.end = static_cast<int>(e.tokens.size()) - 1;
  return Align(e, in, SourceVocabulary(in.tokens));
}

TEST(ChainLastName, MostFrequentFinalToken) {
  const auto in = LevinInput();
  EXPECT_EQ(ChainLastName(in.entities[0], in.tokens), "Levin");
}

TEST(ChainLastName, SingleMention) {
  const auto in = MakeInput("d", "Obama spoke", {{"1", "", Gender::kMale, {{0, 0}}}});
  EXPECT_EQ(ChainLastName(in.entities[0], in.tokens), "Obama");
}

TEST(ChainLastName, TieGoesToEarliestPosition) {
  const auto in = MakeInput("d", "Ann Smith met . Jones", {{"1", "Ann", Gender::kFemale, {{4, 4}, {0, 1}}}});
  EXPECT_EQ(ChainLastName(in.entities[0], in.tokens), "Smith");
}

TEST(Align, Examples) {
  const auto in = LevinInput();
  auto r = AlignText("Melissa Levin", in);
  EXPECT_EQ(r.status, AlignStatus::kAligned);
  EXPECT_EQ(r.matched_entity, "1");

  r = AlignText("John Levin", in);
  EXPECT_EQ(r.status, AlignStatus::kHallucinated);
  EXPECT_FALSE(r.matched_entity.has_value());

  r = AlignText("Boris Yeltsin", in);
  EXPECT_EQ(r.status, AlignStatus::kHallucinated);

  EXPECT_EQ(AlignText("Levin", in).status, AlignStatus::kAligned);
  EXPECT_EQ(AlignText("Ms. Levin", in).status, AlignStatus::kAligned);
}

TEST(Align, TitleGenderMismatchIsFlagged) {
  const auto r = AlignText("Mr. Levin", LevinInput());
  EXPECT_EQ(r.status, AlignStatus::kAligned);
  EXPECT_TRUE(r.title_gender_mismatch);
}

// Every token is in the source, so the safeguard keeps it out of the
// hallucination set.
TEST(Align, SourceTokensAreNeverHallucinated) {
  const auto r = AlignText("Smiled Levin", LevinInput());
  EXPECT_EQ(r.status, AlignStatus::kUnresolved);
  EXPECT_EQ(AlignText("melissa", LevinInput()).status, AlignStatus::kUnresolved);
}

TEST(Align, PrefersFirstNameMatchThenEarliest) {
  const auto in = MakeInput("d", "Ann Levin and Bob Levin met",
                            {{"1", "Ann", Gender::kFemale, {{0, 1}}}, {"2", "Bob", Gender::kMale, {{3, 4}}}});
  EXPECT_EQ(AlignText("Bob Levin", in).matched_entity, "2");
  EXPECT_EQ(AlignText("Levin", in).matched_entity, "1");
}

std::vector<SummaryRecord> Records(const std::vector<std::tuple<std::string, std::string, std::string>>& rows,
                                   const std::vector<GeneratedInput>& inputs) {
  std::vector<nlohmann::json> j;
  std::set<std::string> ids;
  for (const auto& in : inputs) ids.insert(in.id);
  for (const auto& [id, sys, text] : rows) j.push_back({{"input_id", id}, {"system", sys}, {"summary", text}});
  auto recs = SummariesFromJson(j, ids);
  EntityLexicon lex;
  lex.AddAll({"Melissa Levin", "Boris Yeltsin"});
  AttachEntities(recs, lex);
  return recs;
}

TEST(AlignCorpus, VerbatimCopyAlignsEverything) {
  const std::vector<GeneratedInput> inputs{LevinInput()};
  const auto recs = Records({{"d#0", "copy", "Melissa Levin spoke . Levin left ."}}, inputs);
  const auto t = AlignCorpus(recs, inputs);
  const auto& c = t.counts.at("copy");
  EXPECT_EQ(c.summary_entities, 2);
  EXPECT_EQ(c.aligned, 2);
  EXPECT_EQ(c.hallucinated, 0);
  EXPECT_EQ(c.input_entities, 1);
  EXPECT_EQ(c.input_entities_aligned, 1);
  EXPECT_EQ(t.included.at({"d#0", "copy"}), std::set<std::string>{"1"});
}

TEST(AlignCorpus, OneInventedName) {
  const std::vector<GeneratedInput> inputs{LevinInput()};
  const auto recs = Records({{"d#0", "x", "Levin met Boris Yeltsin ."}}, inputs);
  const auto t = AlignCorpus(recs, inputs);
  EXPECT_EQ(t.counts.at("x").hallucinated, 1);
  EXPECT_EQ(t.counts.at("x").aligned, 1);
}

TEST(AlignCorpus, EmptyInput) {
  const auto t = AlignCorpus({}, {});
  EXPECT_TRUE(t.results.empty());
  EXPECT_TRUE(t.counts.empty());
}

// Shuffling a summary's entities does not change any verdict.
TEST(AlignCorpus, OrderInvariance) {
  const std::vector<GeneratedInput> inputs{LevinInput()};
  auto recs = Records({{"d#0", "x", "Boris Yeltsin , Ms. Levin and John Levin ."}}, inputs);
  const auto a = AlignCorpus(recs, inputs);
  std::reverse(recs[0].entities.begin(), recs[0].entities.end());
  const auto b = AlignCorpus(recs, inputs);
  EXPECT_EQ(a.results, b.results);
  EXPECT_EQ(a.counts, b.counts);
}

class ToyAlignment : public ::testing::Test {
 protected:
  void SetUp() override {
    AssignmentScheme s;
    inputs_ = GenerateCorpus(testing::ToyTemplates(), s, 11, testing::ToyInventory()).inputs;
    SyntheticSummarizer sum;
    sum.kind = SyntheticKind::kKeepRate;
    sum.keep_rate = {{"default", 0.7}};
    sum.hallucination_rate = 0.5;
    sum.invented_names = {"Boris Yeltsin", "Hillary Clinton"};
    std::set<std::string> ids;
    for (const auto& in : inputs_) ids.insert(in.id);
    records_ = SummariesFromJson(SynthesizeSummaries(inputs_, "s", sum, 3), ids);
    EntityLexicon lex = BuildLexicon(inputs_, testing::ToyInventory().census, testing::ToyInventory().race,
                                     {"Boris Yeltsin", "Hillary Clinton"});
    AttachEntities(records_, lex);
  }
  std::vector<GeneratedInput> inputs_;
  std::vector<SummaryRecord> records_;
};

TEST_F(ToyAlignment, ConstructedEntitiesAlignAndInventedOnesDoNot) {
  const auto t = AlignCorpus(records_, inputs_);
  long invented = 0;
  for (const auto& r : t.results) {
    const bool is_invented = r.entity.tokens == Tokens{"Boris", "Yeltsin"} ||
                             r.entity.tokens == Tokens{"Hillary", "Clinton"};
    invented += is_invented ? 1 : 0;
    EXPECT_EQ(r.status, is_invented ? AlignStatus::kHallucinated : AlignStatus::kAligned)
        << r.input_id << ": " << r.reason;
  }
  EXPECT_GT(invented, 100);
}

TEST_F(ToyAlignment, SerialMatchesParallel) {
  const auto a = AlignCorpus(records_, inputs_);
  const auto b = AlignCorpusSerial(records_, inputs_);
  EXPECT_EQ(a.results, b.results);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.included, b.included);
}

TEST_F(ToyAlignment, TableRebuildsFromStoredResults) {
  const auto a = AlignCorpus(records_, inputs_);
  std::vector<AlignmentResult> stored;
  for (const auto& r : a.results) stored.push_back(AlignmentResultFromJson(ToJson(r)));
  const auto b = TableFromResults(records_, inputs_, stored);
  EXPECT_EQ(a.results, b.results);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.included, b.included);
}

}  // namespace
}  // namespace sumbias
