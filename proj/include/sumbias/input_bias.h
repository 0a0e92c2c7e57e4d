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

#ifndef SUMBIAS_INPUT_BIAS_H_
#define SUMBIAS_INPUT_BIAS_H_

// Bias already present in source documents: Fightin' Words contrast of
// male- and female-majority documents, a keyword topic classifier, and
// extractive baselines whose word-list inclusion shows how input
// correlations leak into scores.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/corpus.h"
#include "sumbias/measures.h"
#include "sumbias/name_inventory.h"
#include "sumbias/rng.h"

namespace sumbias {

struct SentenceDocument {
  std::string id;
  std::vector<std::vector<std::string>> sentences;

  std::vector<std::string> Tokens() const;
  bool operator==(const SentenceDocument&) const = default;
};

SentenceDocument ToSentenceDocument(const AnnotatedDocument& doc);
nlohmann::json ToJson(const SentenceDocument& doc);
SentenceDocument SentenceDocumentFromJson(const nlohmann::json& j);
// JSONL of {id, sentences: [[tokens]]}, or any corpus LoadCorpus accepts.
std::vector<SentenceDocument> LoadSentenceDocuments(const std::string& path);

// Documents whose identifier count for one group strictly exceeds the
// other's. Raw counts per document; ties (including 0/0) are excluded.
struct IdentifierSplit {
  std::string group_a;  // first group of the lists in name order
  std::string group_b;
  std::vector<size_t> a;
  std::vector<size_t> b;
  size_t ties = 0;
};
IdentifierSplit SplitByIdentifierMajority(const std::vector<SentenceDocument>& docs,
                                          const WordLists& lists);

struct FightinWordsEntry {
  std::string token;
  double count_a = 0;
  double count_b = 0;
  double delta = 0;
  double z = 0;  // positive: associated with corpus A
};

struct FightinWordsResult {
  std::string group_a;
  std::string group_b;
  size_t docs_a = 0;
  size_t docs_b = 0;
  std::vector<FightinWordsEntry> entries;  // z descending, then token
};

// Log-odds ratio with a uniform Dirichlet prior (alpha per word, alpha *
// |V| in total) divided by its approximate standard deviation. Tokens are
// lowercased; words in `markers` are replaced by their pair marker and
// words in `excluded` are dropped before counting.
FightinWordsResult FightinWords(const std::vector<std::vector<std::string>>& corpus_a,
                                const std::vector<std::vector<std::string>>& corpus_b,
                                const std::map<std::string, std::string>& markers,
                                const std::set<std::string>& excluded, double alpha = 0.01);

// Split, pair markers from `lists`, and him/her/his/hers excluded.
FightinWordsResult AnalyzeInputBias(const std::vector<SentenceDocument>& docs,
                                    const WordLists& lists, double alpha = 0.01);

enum class Topic { kSport, kFamily, kUnknown };
std::string_view TopicName(Topic t);

// Majority of "sport" vs "family" keyword occurrences; a tie is unknown.
Topic ClassifyTopic(const std::vector<std::string>& tokens, const WordLists& topics);

enum class Baseline { kRandom, kLead, kTopic, kSexist };
std::string_view BaselineName(Baseline b);
std::optional<Baseline> ParseBaseline(std::string_view s);
inline constexpr Baseline kAllBaselines[] = {Baseline::kRandom, Baseline::kLead, Baseline::kTopic,
                                             Baseline::kSexist};

struct BaselineContext {
  const IdentifierCounter* identifiers;  // "male"/"female" lists
  const WordLists* topics;
};

// Selected sentence indices in document order. Requests beyond the
// document length return every sentence.
std::vector<int> BaselineSummarize(const SentenceDocument& doc, Baseline algorithm, Rng& rng,
                                   const BaselineContext& ctx);

struct SimulationRow {
  std::string algorithm;
  std::optional<double> uniform;
  std::optional<double> adjusted;
  std::map<std::string, double> identifier_counts;
};

struct TopicStats {
  std::string topic;
  size_t docs = 0;
  double female_share = 0;  // of identifiers in those documents
};

struct SimulationResult {
  std::vector<TopicStats> topics;  // total, sport, family, unknown
  std::vector<SimulationRow> rows;
};

// Word-list inclusion of every baseline against uniform and the input
// identifier distribution. Per-document seeds derive from `seed`.
SimulationResult SimulationExperiment(const std::vector<SentenceDocument>& docs,
                                      const WordLists& identifiers, const WordLists& topics,
                                      uint64_t seed);
SimulationResult SimulationExperimentSerial(const std::vector<SentenceDocument>& docs,
                                            const WordLists& identifiers,
                                            const WordLists& topics, uint64_t seed);

nlohmann::json ToJson(const SimulationResult& r);
nlohmann::json ToJson(const FightinWordsResult& r, size_t top_k);

// Synthetic news-like corpus with a planted topic/gender correlation.
struct SyntheticCorpusConfig {
  size_t documents = 6000;
  double p_sport = 0.37;
  double p_family = 0.38;
  // Expected female share of identifiers by topic.
  double female_sport = 0.14;
  double female_family = 0.49;
  double female_other = 0.35;
  double doc_share_jitter = 0.1;
  int min_sentences = 6;
  int max_sentences = 14;
  uint64_t seed = 1;
};
std::vector<SentenceDocument> GenerateSyntheticCorpus(const SyntheticCorpusConfig& config);

// Missing keys keep their defaults.
SyntheticCorpusConfig SyntheticCorpusConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const SyntheticCorpusConfig& c);

}  // namespace sumbias

#endif  // SUMBIAS_INPUT_BIAS_H_
