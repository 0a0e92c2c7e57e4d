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
#include <set>

#include "sumbias/errors.h"
#include "sumbias/perturbation.h"
#include "test_util.h"

namespace sumbias {
namespace {

using testing::ParseText;
using testing::ToyInventory;
using testing::ToyTemplates;

DocumentTemplate TemplateOf(const std::string& rows) {
  return BuildTemplate(ParseText("#begin document (t); part 000\n" + rows + "#end document\n").at(0));
}

// Four gendered entities, one sentence each.
DocumentTemplate FourPeople() {
  std::string rows;
  const char* names[][2] = {{"Daniel", "Ortiz"}, {"Karen", "Walsh"}, {"Gary", "Holt"}, {"Laura", "Finch"}};
  int chain = 1;
  for (auto& n : names) {
    const std::string c = std::to_string(chain++);
    rows += std::string("t 0 0 ") + n[0] + " NNP (PERSON* (" + c + "\n";
    rows += std::string("t 0 1 ") + n[1] + " NNP *) " + c + ")\n";
    rows += "t 0 2 said VBD * -\n";
    rows += "t 0 3 " + std::string(chain % 2 ? "she" : "he") + " PRP * (" + c + ")\n\n";
  }
  return TemplateOf(rows);
}

TEST(MapPronoun, CaseAndRole) {
  EXPECT_EQ(MapPronoun("He", "PRP", Gender::kFemale), "She");
  EXPECT_EQ(MapPronoun("HE", "PRP", Gender::kFemale), "SHE");
  EXPECT_EQ(MapPronoun("him", "PRP", Gender::kFemale), "her");
  EXPECT_EQ(MapPronoun("his", "PRP$", Gender::kFemale), "her");
  EXPECT_EQ(MapPronoun("himself", "PRP", Gender::kFemale), "herself");
  EXPECT_EQ(MapPronoun("her", "PRP$", Gender::kMale), "his");
  EXPECT_EQ(MapPronoun("her", "PRP", Gender::kMale), "him");
  EXPECT_EQ(MapPronoun("hers", "PRP", Gender::kMale), "his");
  EXPECT_EQ(MapPronoun("She", "PRP", Gender::kFemale), "She");
  EXPECT_THROW(MapPronoun("they", "PRP", Gender::kMale), RenderError);
}

TEST(MapTitle, KeepsFemaleTitleForm) {
  EXPECT_EQ(MapTitle("Mr.", Gender::kFemale, std::nullopt), "Ms.");
  EXPECT_EQ(MapTitle("Mr.", Gender::kFemale, std::string("Mrs.")), "Mrs.");
  EXPECT_EQ(MapTitle("Mrs.", Gender::kMale, std::nullopt), "Mr.");
  EXPECT_EQ(MapTitle("Sir", Gender::kFemale, std::nullopt), "Lady");
  EXPECT_EQ(MapTitle("Lady", Gender::kMale, std::nullopt), "Sir");
  EXPECT_EQ(MapTitle("Ms.", Gender::kFemale, std::nullopt), "Ms.");
}

TEST(Render, TitleAndFullName) {
  const auto tpl = TemplateOf(
      "t 0 0 Thomas NNP (PERSON* (1\n"
      "t 0 1 Levin NNP *) 1)\n"
      "t 0 2 spoke VBD * -\n\n"
      "t 0 0 Mr. NNP * (1\n"
      "t 0 1 Levin NNP (PERSON) 1)\n"
      "t 0 2 smiled VBD * -\n"
      "t 0 3 . . * -\n"
      "t 0 4 He PRP * (1)\n"
      "t 0 5 left VBD * -\n");
  ASSERT_EQ(tpl.entities.size(), 1u);
  const std::vector<EntityAssignment> a{{tpl.entities[0].id, "female", Gender::kFemale, "Melissa", "Levin"}};
  const auto r = Render(tpl, a);
  EXPECT_EQ(Join(r.tokens, " "), "Melissa Levin spoke Ms. Levin smiled . She left");
  EXPECT_EQ(r.sentence, (std::vector<int>{0, 0, 0, 1, 1, 1, 1, 1, 1}));
}

TEST(Render, ContentWordsFollowGoverningEntities) {
  auto tpl = TemplateOf(
      "t 0 0 Daniel NNP (PERSON* (1\n"
      "t 0 1 Ortiz NNP *) 1)\n"
      "t 0 2 and CC * -\n"
      "t 0 3 Karen NNP (PERSON* (2\n"
      "t 0 4 Walsh NNP *) 2)\n"
      "t 0 5 chairman NN * -\n");
  ASSERT_EQ(tpl.entities.size(), 2u);
  tpl.content_spans.push_back({tpl.doc_id, 5, 5, {"1", "2"}, "chairman", "chairwoman", "chairperson"});
  std::vector<EntityAssignment> a{{"1", "male", Gender::kMale, "Gary", "Ortiz"},
                                  {"2", "female", Gender::kFemale, "Laura", "Walsh"}};
  EXPECT_EQ(Render(tpl, a).tokens.back(), "chairperson");
  a[1].gender = Gender::kMale;
  a[1].group = "male";
  EXPECT_EQ(Render(tpl, a).tokens.back(), "chairman");
  a[0].gender = a[1].gender = Gender::kFemale;
  EXPECT_EQ(Render(tpl, a).tokens.back(), "chairwoman");
}

NameInventory SmallInventory() { return ToyInventory(); }

std::map<Gender, int> GenderCounts(const std::vector<EntityAssignment>& a) {
  std::map<Gender, int> c;
  for (const auto& x : a) ++c[x.gender];
  return c;
}

TEST(AssignGroups, LocalSplitsEvenly) {
  const auto tpl = FourPeople();
  ASSERT_EQ(tpl.GenderedEntityCount(), 4);
  AssignmentScheme s;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto c = GenderCounts(AssignGroups(tpl, s, 0, rng, SmallInventory()));
    EXPECT_EQ(c[Gender::kMale], 2);
    EXPECT_EQ(c[Gender::kFemale], 2);
  }
}

TEST(AssignGroups, LocalOddCountDiffersByOne) {
  auto tpl = FourPeople();
  tpl.entities.pop_back();
  std::set<int> males_seen;
  AssignmentScheme s;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    auto c = GenderCounts(AssignGroups(tpl, s, 0, rng, SmallInventory()));
    EXPECT_EQ(std::abs(c[Gender::kMale] - c[Gender::kFemale]), 1);
    males_seen.insert(c[Gender::kMale]);
  }
  EXPECT_EQ(males_seen, (std::set<int>{1, 2}));
}

TEST(AssignGroups, GlobalAlternates) {
  const auto tpl = FourPeople();
  AssignmentScheme s;
  s.kind = SchemeKind::kGenderGlobal;
  for (int v = 0; v < 4; ++v) {
    Rng rng(9);
    auto c = GenderCounts(AssignGroups(tpl, s, v, rng, SmallInventory()));
    EXPECT_EQ(c[v % 2 == 0 ? Gender::kMale : Gender::kFemale], 4);
  }
}

TEST(AssignGroups, FirstNamesDistinctAndNotOriginal) {
  const auto tpl = FourPeople();
  AssignmentScheme s;
  Rng rng(3);
  const auto a = AssignGroups(tpl, s, 0, rng, SmallInventory());
  std::set<std::string> firsts;
  for (const auto& x : a) {
    firsts.insert(x.first);
    EXPECT_NE(x.first, "Daniel");
    EXPECT_NE(x.first, "Karen");
  }
  EXPECT_EQ(firsts.size(), a.size());
}

TEST(AssignGroups, AlteredLastNamesComeFromList) {
  const auto tpl = FourPeople();
  AssignmentScheme s;
  s.alter_last_names = true;
  Rng rng(4);
  const auto& lasts = SmallInventory().last_names;
  for (const auto& x : AssignGroups(tpl, s, 0, rng, SmallInventory())) {
    EXPECT_NE(std::find(lasts.begin(), lasts.end(), x.last), lasts.end()) << x.last;
  }
}

TEST(CheckCapacity, TooFewNames) {
  const auto tpl = FourPeople();
  NameInventory inv = SmallInventory();
  inv.census.male = {{"john", 1.0}};
  AssignmentScheme s;
  s.kind = SchemeKind::kGenderGlobal;
  EXPECT_TRUE(CheckCapacity(tpl, s, inv).has_value());
  EXPECT_FALSE(CheckCapacity(tpl, s, SmallInventory()).has_value());
}

TEST(ParseScheme, NamesRoundTrip) {
  for (const std::string name : {"gender_local", "gender_global", "race_random_gender",
                                 "race_intersectional:black=female,white=male"}) {
    EXPECT_EQ(ParseScheme(name).Name(), name);
  }
  EXPECT_THROW(ParseScheme("gender"), UsageError);
  EXPECT_THROW(ParseScheme("race_intersectional"), UsageError);
  EXPECT_THROW(ParseScheme("gender_local:x=male"), UsageError);
}

class ToyGeneration : public ::testing::Test {
 protected:
  static GenerationResult Generate(SchemeKind kind) {
    AssignmentScheme s;
    s.kind = kind;
    if (kind == SchemeKind::kRaceIntersectional) {
      s.intersection = {{"black", Gender::kFemale}, {"white", Gender::kMale}};
    }
    return GenerateCorpus(ToyTemplates(), s, 77, ToyInventory());
  }
};

TEST_F(ToyGeneration, TwentyVariantsPerEligibleOriginal) {
  const auto r = Generate(SchemeKind::kGenderLocal);
  EXPECT_EQ(r.inputs.size(), 47u * 20u);
  EXPECT_TRUE(r.dropped.empty());
  std::map<std::string, int> per;
  for (const auto& in : r.inputs) ++per[in.original_id];
  for (const auto& [id, c] : per) EXPECT_EQ(c, 20) << id;
}

TEST_F(ToyGeneration, LocalBalanceAndPairInversion) {
  const auto r = Generate(SchemeKind::kGenderLocal);
  for (size_t i = 0; i + 1 < r.inputs.size(); i += 2) {
    const auto& a = r.inputs[i];
    const auto& b = r.inputs[i + 1];
    ASSERT_EQ(a.pair_id, b.pair_id);
    ASSERT_EQ(a.variant + 1, b.variant);
    auto ca = GenderCounts(a.assignments);
    EXPECT_LE(std::abs(ca[Gender::kMale] - ca[Gender::kFemale]), 1) << a.id;
    ASSERT_EQ(a.assignments.size(), b.assignments.size());
    std::map<Gender, std::set<std::string>> na, nb;
    for (size_t k = 0; k < a.assignments.size(); ++k) {
      EXPECT_EQ(a.assignments[k].entity, b.assignments[k].entity);
      EXPECT_EQ(a.assignments[k].gender, Opposite(b.assignments[k].gender));
      na[a.assignments[k].gender].insert(a.assignments[k].first);
      nb[b.assignments[k].gender].insert(b.assignments[k].first);
    }
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      const auto& x = na[g].size() <= nb[g].size() ? na[g] : nb[g];
      const auto& y = na[g].size() <= nb[g].size() ? nb[g] : na[g];
      EXPECT_TRUE(std::includes(y.begin(), y.end(), x.begin(), x.end())) << a.pair_id;
    }
  }
}

TEST_F(ToyGeneration, GlobalIsSingleGenderAndBalancedAcrossVariants) {
  const auto r = Generate(SchemeKind::kGenderGlobal);
  std::map<std::string, std::map<Gender, int>> per;
  for (const auto& in : r.inputs) {
    std::set<Gender> gs;
    for (const auto& a : in.assignments) gs.insert(a.gender);
    ASSERT_EQ(gs.size(), 1u) << in.id;
    ++per[in.original_id][*gs.begin()];
  }
  for (auto& [id, c] : per) {
    EXPECT_EQ(c[Gender::kMale], 10) << id;
    EXPECT_EQ(c[Gender::kFemale], 10) << id;
  }
}

TEST_F(ToyGeneration, RaceSchemesUseRaceNames) {
  const auto r = Generate(SchemeKind::kRaceIntersectional);
  ASSERT_FALSE(r.inputs.empty());
  std::map<std::string, int> per;
  for (const auto& in : r.inputs) {
    ++per[in.original_id];
    for (const auto& a : in.assignments) {
      const auto& g = ToyInventory().race.groups.at(a.group);
      EXPECT_EQ(a.gender, a.group == "black" ? Gender::kFemale : Gender::kMale);
      const auto& firsts = g.First(a.gender);
      EXPECT_TRUE(std::any_of(firsts.begin(), firsts.end(),
                              [&](const std::string& n) { return TitleCase(n) == a.first; }))
          << a.first;
    }
  }
  for (const auto& [id, c] : per) EXPECT_EQ(c, 20);
}

// Every rendered token either matches the original or sits inside a mention
// or content span.
TEST_F(ToyGeneration, RenderedTextOnlyChangesAtSlots) {
  const auto r = Generate(SchemeKind::kGenderLocal);
  std::map<std::string, const DocumentTemplate*> by_id;
  for (const auto& t : ToyTemplates()) by_id[t.doc_id] = &t;
  for (size_t i = 0; i < r.inputs.size(); i += 20) {
    const auto& in = r.inputs[i];
    const auto& tpl = *by_id.at(in.original_id);
    const auto rendered = Render(tpl, in.assignments);
    EXPECT_EQ(rendered.tokens, in.tokens);
    std::vector<bool> slot(tpl.tokens.size(), false);
    for (const auto& e : tpl.entities) {
      for (const auto& s : e.slots) {
        for (const auto& h : s.holes) {
          for (int k = h.start; k <= h.end; ++k) slot[k] = true;
        }
      }
    }
    for (const auto& c : tpl.content_spans) {
      for (int k = c.start; k <= c.end; ++k) slot[k] = true;
    }
    for (size_t k = 0; k < tpl.tokens.size(); ++k) {
      if (slot[k]) continue;
      const int b = rendered.begin[k];
      ASSERT_GE(b, 0);
      EXPECT_EQ(rendered.tokens[b], tpl.tokens[k]) << in.id << " @" << k;
    }
  }
}

TEST_F(ToyGeneration, DeterministicAndSerialEquivalent) {
  AssignmentScheme s;
  const auto a = GenerateCorpus(ToyTemplates(), s, 5, ToyInventory());
  const auto b = GenerateCorpus(ToyTemplates(), s, 5, ToyInventory());
  const auto c = GenerateCorpusSerial(ToyTemplates(), s, 5, ToyInventory());
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.inputs, c.inputs);
  const auto d = GenerateCorpus(ToyTemplates(), s, 6, ToyInventory());
  EXPECT_NE(a.inputs, d.inputs);
}

TEST_F(ToyGeneration, JsonRoundTrip) {
  const auto r = Generate(SchemeKind::kGenderLocal);
  for (size_t i = 0; i < r.inputs.size(); i += 37) {
    EXPECT_EQ(GeneratedInputFromJson(ToJson(r.inputs[i])), r.inputs[i]);
  }
}

TEST_F(ToyGeneration, InsufficientNamesDropsOriginal) {
  NameInventory inv = ToyInventory();
  inv.census.female = {{"mary", 1.0}};
  AssignmentScheme s;
  s.kind = SchemeKind::kGenderGlobal;
  const auto r = GenerateCorpus(ToyTemplates(), s, 1, inv);
  EXPECT_FALSE(r.dropped.empty());
  for (const auto& d : r.dropped) EXPECT_EQ(d.code, "insufficient_names");
  EXPECT_EQ(r.inputs.size() % 20, 0u);
}

}  // namespace
}  // namespace sumbias
