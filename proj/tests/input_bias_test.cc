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

#include <cmath>
#include <random>

#include "sumbias/errors.h"
#include "sumbias/input_bias.h"

namespace sumbias {
namespace {

using Tokens = std::vector<std::string>;

SentenceDocument Doc(std::string id, std::vector<Tokens> sentences) {
  return {std::move(id), std::move(sentences)};
}

TEST(IdentifierSplit, MajorityAndTies) {
  const std::vector<SentenceDocument> docs{
      Doc("m", {{"He", "and", "his", "son", "."}, {"She", "left", "."}}),
      Doc("f", {{"Her", "mother", "said", "so", "."}}),
      Doc("t", {{"He", "met", "her", "."}}),
      Doc("z", {{"Nothing", "here", "."}}),
  };
  const auto split = SplitByIdentifierMajority(docs, HelmWordLists());
  EXPECT_EQ(split.group_a, "female");
  EXPECT_EQ(split.group_b, "male");
  EXPECT_EQ(split.a, (std::vector<size_t>{1}));
  EXPECT_EQ(split.b, (std::vector<size_t>{0}));
  EXPECT_EQ(split.ties, 2u);
  WordLists three;
  three.groups = {{"a", {"x"}}, {"b", {"y"}}, {"c", {"z"}}};
  EXPECT_THROW(SplitByIdentifierMajority(docs, three), UsageError);
}

// Smoothed log-odds written as a difference of logits.
double OracleZ(double ya, double na, double yb, double nb, double alpha, double alpha0) {
  auto logit = [](double p) { return std::log(p) - std::log1p(-p); };
  const double delta = logit((ya + alpha) / (na + alpha0)) - logit((yb + alpha) / (nb + alpha0));
  return delta / std::sqrt(1.0 / (ya + alpha) + 1.0 / (yb + alpha));
}

TEST(FightinWords, MatchesDirectEvaluation) {
  std::mt19937_64 gen(11);
  const Tokens vocab{"goal", "Match", "kitchen", "vote", "market", "the", "school", "storm"};
  std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(1, 40);
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<Tokens> a(3), b(4);
    for (auto* side : {&a, &b}) {
      for (auto& doc : *side) {
        for (int k = len(gen); k > 0; --k) doc.push_back(vocab[pick(gen)]);
      }
    }
    const auto r = FightinWords(a, b, {}, {});
    std::map<std::string, double> ca, cb;
    double na = 0, nb = 0;
    for (const auto& d : a) {
      for (const auto& t : d) ca[ToLower(t)] += 1, na += 1;
    }
    for (const auto& d : b) {
      for (const auto& t : d) cb[ToLower(t)] += 1, nb += 1;
    }
    std::set<std::string> v;
    for (const auto& [w, c] : ca) v.insert(w);
    for (const auto& [w, c] : cb) v.insert(w);
    ASSERT_EQ(r.entries.size(), v.size());
    for (size_t i = 0; i < r.entries.size(); ++i) {
      const auto& e = r.entries[i];
      const double want = OracleZ(ca[e.token], na, cb[e.token], nb, 0.01, 0.01 * v.size());
      EXPECT_NEAR(e.z, want, 1e-9) << e.token;
      if (i > 0) EXPECT_GE(r.entries[i - 1].z, e.z);
    }
  }
}

TEST(FightinWords, SymmetricCorporaGiveZero) {
  const std::vector<Tokens> a{{"goal", "vote", "goal"}};
  const auto r = FightinWords(a, a, {}, {});
  for (const auto& e : r.entries) EXPECT_NEAR(e.z, 0.0, 1e-12);
}

TEST(FightinWords, MarkersMergeAndExclusionsDrop) {
  const std::vector<Tokens> a{{"mother", "her", "goal"}}, b{{"father", "his", "goal"}};
  const auto r = FightinWords(a, b, IdentifierPairMarkers(HelmWordLists()), {"her", "his"});
  std::set<std::string> tokens;
  for (const auto& e : r.entries) tokens.insert(e.token);
  EXPECT_EQ(tokens, (std::set<std::string>{"father/mother", "goal"}));
  for (const auto& e : r.entries) {
    if (e.token == "father/mother") {
      EXPECT_EQ(e.count_a, 1);
      EXPECT_EQ(e.count_b, 1);
    }
  }
}

TEST(AnalyzeInputBias, PlantedWordRanksFirst) {
  std::vector<SentenceDocument> docs;
  for (int i = 0; i < 30; ++i) {
    docs.push_back(Doc("f" + std::to_string(i), {{"She", "baked", "bread", "at", "the", "fair", "."}}));
    docs.push_back(Doc("m" + std::to_string(i), {{"He", "scored", "a", "goal", "at", "the", "fair", "."}}));
  }
  const auto r = AnalyzeInputBias(docs, HelmWordLists());
  EXPECT_EQ(r.docs_a, 30u);
  EXPECT_EQ(r.docs_b, 30u);
  ASSERT_FALSE(r.entries.empty());
  // Pronouns map to a shared marker, so content words lead.
  EXPECT_TRUE(r.entries.front().token == "baked" || r.entries.front().token == "bread");
  EXPECT_TRUE(r.entries.back().token == "goal" || r.entries.back().token == "scored");
  const auto j = ToJson(r, 2);
  EXPECT_EQ(j.at("top_a").size(), 2u);
  EXPECT_EQ(j.at("top_b").size(), 2u);
}

TEST(ClassifyTopic, Examples) {
  const auto topics = TopicWordLists();
  EXPECT_EQ(ClassifyTopic({"The", "team", "won", "the", "game"}, topics), Topic::kSport);
  EXPECT_EQ(ClassifyTopic({"her", "husband", "and", "children"}, topics), Topic::kFamily);
  EXPECT_EQ(ClassifyTopic({"family", "game"}, topics), Topic::kUnknown);
  EXPECT_EQ(ClassifyTopic({"markets", "fell"}, topics), Topic::kUnknown);
}

TEST(Baselines, SelectionRules) {
  const auto topics = TopicWordLists();
  const auto lists = HelmWordLists();
  const IdentifierCounter counter(lists);
  const BaselineContext ctx{&counter, &topics};
  Rng rng(1);
  const auto plain = Doc("p", {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}});
  EXPECT_EQ(BaselineSummarize(plain, Baseline::kLead, rng, ctx), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(BaselineSummarize(plain, Baseline::kRandom, rng, ctx).size(), 3u);
  const auto family = Doc("f", {{"The", "family", "met", "."}, {"Her", "husband", "spoke", "."},
                                {"x"}, {"y"}, {"z"}});
  EXPECT_EQ(BaselineSummarize(family, Baseline::kTopic, rng, ctx).size(), 1u);
  const auto sport = Doc("s", {{"The", "team", "won", "."}, {"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}, {"g"}});
  EXPECT_EQ(BaselineSummarize(sport, Baseline::kTopic, rng, ctx).size(), 6u);
  const auto short_doc = Doc("s2", {{"team"}, {"game"}});
  EXPECT_EQ(BaselineSummarize(short_doc, Baseline::kTopic, rng, ctx), (std::vector<int>{0, 1}));
  // Sport document: the sentence richest in male identifiers is kept.
  const auto sexist = Doc("x", {{"The", "team", "played", "."}, {"She", "watched", "."}, {"a"}, {"b"},
                                {"He", "and", "his", "brother", "scored", "."}});
  const auto picked = BaselineSummarize(sexist, Baseline::kSexist, rng, ctx);
  ASSERT_EQ(picked.size(), 3u);
  EXPECT_NE(std::find(picked.begin(), picked.end(), 4), picked.end());
  EXPECT_EQ(ParseBaseline("topic"), Baseline::kTopic);
  EXPECT_FALSE(ParseBaseline("abstractive").has_value());
}

std::vector<SentenceDocument> SmallSynthetic(size_t n) {
  SyntheticCorpusConfig c;
  c.documents = n;
  c.seed = 7;
  return GenerateSyntheticCorpus(c);
}

TEST(Simulation, SerialMatchesParallel) {
  const auto docs = SmallSynthetic(400);
  const auto a = SimulationExperiment(docs, HelmWordLists(), TopicWordLists(), 3);
  const auto b = SimulationExperimentSerial(docs, HelmWordLists(), TopicWordLists(), 3);
  EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
  EXPECT_NE(ToJson(a).dump(), ToJson(SimulationExperiment(docs, HelmWordLists(), TopicWordLists(), 4)).dump());
}

TEST(Simulation, WholeDocumentSummariesHaveNoAdjustedBias) {
  std::vector<SentenceDocument> docs;
  for (int i = 0; i < 50; ++i) {
    docs.push_back(Doc("d" + std::to_string(i), {{i % 3 ? "He" : "She", "and", "the", "team", "met", "her", "."}}));
  }
  const auto r = SimulationExperiment(docs, HelmWordLists(), TopicWordLists(), 1);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.adjusted.has_value()) << row.algorithm;
    EXPECT_NEAR(*row.adjusted, 0.0, 1e-12) << row.algorithm;
  }
}

TEST(SyntheticCorpus, PlantedCorrelation) {
  const auto docs = SmallSynthetic(3000);
  ASSERT_EQ(docs.size(), 3000u);
  const auto r = SimulationExperiment(docs, HelmWordLists(), TopicWordLists(), 1);
  std::map<std::string, TopicStats> by;
  for (const auto& t : r.topics) by[t.topic] = t;
  // Stray keywords in other documents can only add to the planted shares.
  const double other = 1 - 0.37 - 0.38;
  EXPECT_GT(by["sport"].docs / 3000.0, 0.37 - 0.03);
  EXPECT_LT(by["sport"].docs / 3000.0, 0.37 + other);
  EXPECT_GT(by["family"].docs / 3000.0, 0.38 - 0.03);
  EXPECT_LT(by["family"].docs / 3000.0, 0.38 + other);
  EXPECT_GT(by["unknown"].docs, 0u);
  EXPECT_NEAR(by["sport"].female_share, 0.14, 0.05);
  EXPECT_NEAR(by["family"].female_share, 0.49, 0.05);
  // The sexist baseline leans away from the input distribution.
  for (const auto& row : r.rows) {
    if (row.algorithm == "sexist") EXPECT_GT(*row.adjusted, 0.01);
  }
  EXPECT_EQ(GenerateSyntheticCorpus(SyntheticCorpusConfigFromJson(ToJson(SyntheticCorpusConfig{}))).size(), 6000u);
}

TEST(SyntheticCorpus, ConfigValidation) {
  EXPECT_THROW(SyntheticCorpusConfigFromJson({{"p_sport", 0.8}, {"p_family", 0.5}}), DataError);
  EXPECT_THROW(SyntheticCorpusConfigFromJson({{"min_sentences", 9}, {"max_sentences", 3}}), DataError);
  EXPECT_EQ(SyntheticCorpusConfigFromJson({{"documents", 12}}).documents, 12u);
}

TEST(SentenceDocument, JsonRoundTrip) {
  const auto d = Doc("x", {{"a", "b"}, {"c"}});
  EXPECT_EQ(SentenceDocumentFromJson(ToJson(d)), d);
  EXPECT_EQ(d.Tokens(), (Tokens{"a", "b", "c"}));
}

}  // namespace
}  // namespace sumbias
