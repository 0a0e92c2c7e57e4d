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

#include "sumbias/input_bias.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"

namespace sumbias {

std::vector<std::string> SentenceDocument::Tokens() const {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

SentenceDocument ToSentenceDocument(const AnnotatedDocument& doc) {
  SentenceDocument out;
  out.id = doc.id();
  for (int s = 0; s < doc.SentenceCount(); ++s) out.sentences.push_back(doc.SentenceTokens(s));
  return out;
}

nlohmann::json ToJson(const SentenceDocument& doc) {
  return {{"id", doc.id}, {"sentences", doc.sentences}};
}

SentenceDocument SentenceDocumentFromJson(const nlohmann::json& j) {
  SentenceDocument doc;
  doc.id = j.at("id").get<std::string>();
  doc.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
  return doc;
}

std::vector<SentenceDocument> LoadSentenceDocuments(const std::string& path) {
  std::vector<SentenceDocument> out;
  const bool jsonl = path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl";
  if (jsonl) {
    const auto rows = ReadJsonl(path);
    if (!rows.empty() && rows[0].contains("sentences")) {
      for (size_t i = 0; i < rows.size(); ++i) {
        try {
          out.push_back(SentenceDocumentFromJson(rows[i]));
        } catch (const nlohmann::json::exception&) {
          throw DataError(path + ": row " + std::to_string(i + 1) +
                          " is not {id, sentences: [[tokens]]}");
        }
      }
      return out;
    }
  }
  for (const auto& d : LoadCorpus(path)) out.push_back(ToSentenceDocument(d));
  return out;
}

IdentifierSplit SplitByIdentifierMajority(const std::vector<SentenceDocument>& docs,
                                          const WordLists& lists) {
  if (lists.groups.size() != 2) throw UsageError("identifier split needs exactly two groups");
  IdentifierSplit split;
  split.group_a = lists.groups.begin()->first;
  split.group_b = std::next(lists.groups.begin())->first;
  const IdentifierCounter counter(lists);
  for (size_t i = 0; i < docs.size(); ++i) {
    const auto counts = counter.Count(docs[i].Tokens());
    const double a = counts.at(split.group_a), b = counts.at(split.group_b);
    if (a > b) split.a.push_back(i);
    else if (b > a) split.b.push_back(i);
    else ++split.ties;
  }
  return split;
}

namespace {

std::map<std::string, double> CountTokens(const std::vector<std::vector<std::string>>& corpus,
                                          const std::map<std::string, std::string>& markers,
                                          const std::set<std::string>& excluded) {
  std::map<std::string, double> counts;
  for (const auto& doc : corpus) {
    for (const auto& t : doc) {
      std::string low = ToLower(t);
      if (excluded.count(low)) continue;
      if (auto it = markers.find(low); it != markers.end()) low = it->second;
      counts[low] += 1;
    }
  }
  return counts;
}

}  // namespace

FightinWordsResult FightinWords(const std::vector<std::vector<std::string>>& corpus_a,
                                const std::vector<std::vector<std::string>>& corpus_b,
                                const std::map<std::string, std::string>& markers,
                                const std::set<std::string>& excluded, double alpha) {
  const auto ca = CountTokens(corpus_a, markers, excluded);
  const auto cb = CountTokens(corpus_b, markers, excluded);
  std::set<std::string> vocab;
  double na = 0, nb = 0;
  for (const auto& [w, c] : ca) {
    vocab.insert(w);
    na += c;
  }
  for (const auto& [w, c] : cb) {
    vocab.insert(w);
    nb += c;
  }
  const double alpha0 = alpha * static_cast<double>(vocab.size());
  FightinWordsResult r;
  r.docs_a = corpus_a.size();
  r.docs_b = corpus_b.size();
  for (const auto& w : vocab) {
    FightinWordsEntry e;
    e.token = w;
    if (auto it = ca.find(w); it != ca.end()) e.count_a = it->second;
    if (auto it = cb.find(w); it != cb.end()) e.count_b = it->second;
    e.delta = std::log((e.count_a + alpha) / (na + alpha0 - e.count_a - alpha)) -
              std::log((e.count_b + alpha) / (nb + alpha0 - e.count_b - alpha));
    const double var = 1.0 / (e.count_a + alpha) + 1.0 / (e.count_b + alpha);
    e.z = e.delta / std::sqrt(var);
    r.entries.push_back(std::move(e));
  }
  std::sort(r.entries.begin(), r.entries.end(),
            [](const FightinWordsEntry& x, const FightinWordsEntry& y) {
              if (x.z != y.z) return x.z > y.z;
              return x.token < y.token;
            });
  return r;
}

FightinWordsResult AnalyzeInputBias(const std::vector<SentenceDocument>& docs,
                                    const WordLists& lists, double alpha) {
  const IdentifierSplit split = SplitByIdentifierMajority(docs, lists);
  std::vector<std::vector<std::string>> a, b;
  for (size_t i : split.a) a.push_back(docs[i].Tokens());
  for (size_t i : split.b) b.push_back(docs[i].Tokens());
  FightinWordsResult r =
      FightinWords(a, b, IdentifierPairMarkers(lists), {"him", "her", "his", "hers"}, alpha);
  r.group_a = split.group_a;
  r.group_b = split.group_b;
  return r;
}

std::string_view TopicName(Topic t) {
  switch (t) {
    case Topic::kSport: return "sport";
    case Topic::kFamily: return "family";
    case Topic::kUnknown: return "unknown";
  }
  return "";
}

Topic ClassifyTopic(const std::vector<std::string>& tokens, const WordLists& topics) {
  const auto counts = IdentifierCounter(topics).Count(tokens);
  auto get = [&](const char* g) {
    auto it = counts.find(g);
    return it == counts.end() ? 0.0 : it->second;
  };
  const double sport = get("sport"), family = get("family");
  if (sport > family) return Topic::kSport;
  if (family > sport) return Topic::kFamily;
  return Topic::kUnknown;
}

std::string_view BaselineName(Baseline b) {
  switch (b) {
    case Baseline::kRandom: return "random";
    case Baseline::kLead: return "lead";
    case Baseline::kTopic: return "topic";
    case Baseline::kSexist: return "sexist";
  }
  return "";
}

std::optional<Baseline> ParseBaseline(std::string_view s) {
  for (Baseline b : kAllBaselines) {
    if (BaselineName(b) == s) return b;
  }
  return std::nullopt;
}

namespace {

std::vector<int> RandomSentences(int n, int k, Rng& rng) {
  std::vector<int> out;
  for (size_t i : rng.SampleWithoutReplacement(n, std::min(n, k))) out.push_back(static_cast<int>(i));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<int> BaselineSummarize(const SentenceDocument& doc, Baseline algorithm, Rng& rng,
                                   const BaselineContext& ctx) {
  const int n = static_cast<int>(doc.sentences.size());
  switch (algorithm) {
    case Baseline::kRandom:
      return RandomSentences(n, 3, rng);
    case Baseline::kLead: {
      std::vector<int> out(std::min(n, 3));
      std::iota(out.begin(), out.end(), 0);
      return out;
    }
    case Baseline::kTopic: {
      const Topic t = ClassifyTopic(doc.Tokens(), *ctx.topics);
      const int k = t == Topic::kFamily ? 1 : t == Topic::kSport ? 6 : 3;
      return RandomSentences(n, k, rng);
    }
    case Baseline::kSexist: {
      const Topic t = ClassifyTopic(doc.Tokens(), *ctx.topics);
      if (t == Topic::kUnknown) return RandomSentences(n, 3, rng);
      const std::string target = t == Topic::kSport ? "male" : "female";
      std::vector<double> score(n);
      for (int s = 0; s < n; ++s) score[s] = ctx.identifiers->Count(doc.sentences[s]).at(target);
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      rng.Shuffle(order);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
      order.resize(std::min(n, 3));
      std::sort(order.begin(), order.end());
      return order;
    }
  }
  return {};
}

namespace {

struct DocOutcome {
  Topic topic = Topic::kUnknown;
  std::map<std::string, double> input_counts;
  std::vector<std::map<std::string, double>> summary_counts;  // per baseline
};

DocOutcome SimulateDocument(const SentenceDocument& doc, const IdentifierCounter& counter,
                            const WordLists& topics, uint64_t seed) {
  DocOutcome out;
  const auto tokens = doc.Tokens();
  out.topic = ClassifyTopic(tokens, topics);
  out.input_counts = counter.Count(tokens);
  const BaselineContext ctx{&counter, &topics};
  for (Baseline b : kAllBaselines) {
    Rng rng(DeriveSeed(seed, "baseline", std::string(BaselineName(b)) + "/" + doc.id));
    std::vector<std::string> summary;
    for (int s : BaselineSummarize(doc, b, rng, ctx)) {
      summary.insert(summary.end(), doc.sentences[s].begin(), doc.sentences[s].end());
    }
    out.summary_counts.push_back(counter.Count(summary));
  }
  return out;
}

SimulationResult Tabulate(const std::vector<DocOutcome>& outcomes,
                          const std::vector<std::string>& groups) {
  SimulationResult r;
  std::map<std::string, double> input_total;
  std::map<Topic, std::pair<size_t, std::map<std::string, double>>> by_topic;
  for (const auto& o : outcomes) {
    auto& [docs, counts] = by_topic[o.topic];
    ++docs;
    for (const auto& [g, c] : o.input_counts) {
      input_total[g] += c;
      counts[g] += c;
    }
  }
  auto female_share = [](const std::map<std::string, double>& c) {
    double total = 0;
    for (const auto& [g, v] : c) total += v;
    auto it = c.find("female");
    return total > 0 && it != c.end() ? it->second / total : 0.0;
  };
  r.topics.push_back({"total", outcomes.size(), female_share(input_total)});
  for (Topic t : {Topic::kSport, Topic::kFamily, Topic::kUnknown}) {
    auto it = by_topic.find(t);
    if (it == by_topic.end()) {
      r.topics.push_back({std::string(TopicName(t)), 0, 0.0});
    } else {
      r.topics.push_back({std::string(TopicName(t)), it->second.first, female_share(it->second.second)});
    }
  }
  const GroupDistribution uniform = GroupDistribution::Uniform(groups);
  const auto adjusted = GroupDistribution::FromCounts(input_total);
  for (size_t b = 0; b < std::size(kAllBaselines); ++b) {
    SimulationRow row;
    row.algorithm = std::string(BaselineName(kAllBaselines[b]));
    for (const auto& g : groups) row.identifier_counts[g] = 0;
    for (const auto& o : outcomes) {
      for (const auto& [g, c] : o.summary_counts[b]) row.identifier_counts[g] += c;
    }
    row.uniform = WordListInclusion(row.identifier_counts, uniform);
    if (adjusted) row.adjusted = WordListInclusion(row.identifier_counts, *adjusted);
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace

SimulationResult SimulationExperiment(const std::vector<SentenceDocument>& docs,
                                      const WordLists& identifiers, const WordLists& topics,
                                      uint64_t seed) {
  const IdentifierCounter counter(identifiers);
  std::vector<DocOutcome> outcomes(docs.size());
  const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) outcomes[i] = SimulateDocument(docs[i], counter, topics, seed);
  return Tabulate(outcomes, counter.groups());
}

SimulationResult SimulationExperimentSerial(const std::vector<SentenceDocument>& docs,
                                            const WordLists& identifiers,
                                            const WordLists& topics, uint64_t seed) {
  const IdentifierCounter counter(identifiers);
  std::vector<DocOutcome> outcomes;
  for (const auto& d : docs) outcomes.push_back(SimulateDocument(d, counter, topics, seed));
  return Tabulate(outcomes, counter.groups());
}

namespace {

nlohmann::json Optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

}  // namespace

nlohmann::json ToJson(const SimulationResult& r) {
  nlohmann::json j;
  auto& topics = j["topics"] = nlohmann::json::array();
  for (const auto& t : r.topics) {
    topics.push_back({{"topic", t.topic}, {"docs", t.docs}, {"female_share", t.female_share}});
  }
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"algorithm", row.algorithm},
                    {"uniform", Optional(row.uniform)},
                    {"adjusted", Optional(row.adjusted)},
                    {"identifier_counts", row.identifier_counts}});
  }
  return j;
}

nlohmann::json ToJson(const FightinWordsResult& r, size_t top_k) {
  nlohmann::json j{{"group_a", r.group_a},
                   {"group_b", r.group_b},
                   {"docs_a", r.docs_a},
                   {"docs_b", r.docs_b}};
  auto entry = [](const FightinWordsEntry& e) {
    return nlohmann::json{{"token", e.token},
                          {"z", e.z},
                          {"delta", e.delta},
                          {"count_a", e.count_a},
                          {"count_b", e.count_b}};
  };
  auto& a = j["top_a"] = nlohmann::json::array();
  for (size_t i = 0; i < r.entries.size() && i < top_k; ++i) a.push_back(entry(r.entries[i]));
  auto& b = j["top_b"] = nlohmann::json::array();
  for (size_t i = 0; i < r.entries.size() && i < top_k; ++i) {
    b.push_back(entry(r.entries[r.entries.size() - 1 - i]));
  }
  return j;
}

namespace {

const std::vector<std::string>& Filler() {
  static const std::vector<std::string> words = {
      "the",     "a",       "on",      "in",     "said",     "after",    "new",
      "year",    "city",    "report",  "people", "officials", "week",    "time",
      "local",   "during",  "made",    "public", "first",    "last",     "months",
      "home",    "later",   "told",    "news",   "police",   "plan",     "two",
      "three",   "also",    "would",   "could",  "where",    "school",   "country",
      "support", "moment",  "town",    "night",  "morning",  "statement", "group"};
  return words;
}

const std::vector<std::string>& SportWords() {
  static const std::vector<std::string> words = {"league", "season", "club", "game",
                                                 "win",    "team",   "shot"};
  return words;
}

// Family keywords that are not gender identifiers, so the topic signal
// stays separate from the planted gender signal.
const std::vector<std::string>& FamilyWords() {
  static const std::vector<std::string> words = {"family", "husband", "wife", "children", "baby"};
  return words;
}

const std::vector<std::string>& IdentifierPool(Gender g) {
  static const std::vector<std::string> male = {"he",  "his", "him",     "man",
                                                "son", "men", "brother", "himself"};
  static const std::vector<std::string> female = {"she",      "her",   "woman",  "daughter",
                                                  "women",    "sister", "herself", "aunt"};
  return g == Gender::kMale ? male : female;
}

const std::string& Pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[rng.UniformIndex(pool.size())];
}

}  // namespace

SyntheticCorpusConfig SyntheticCorpusConfigFromJson(const nlohmann::json& j) {
  SyntheticCorpusConfig c;
  try {
    c.documents = j.value("documents", c.documents);
    c.p_sport = j.value("p_sport", c.p_sport);
    c.p_family = j.value("p_family", c.p_family);
    c.female_sport = j.value("female_sport", c.female_sport);
    c.female_family = j.value("female_family", c.female_family);
    c.female_other = j.value("female_other", c.female_other);
    c.doc_share_jitter = j.value("doc_share_jitter", c.doc_share_jitter);
    c.min_sentences = j.value("min_sentences", c.min_sentences);
    c.max_sentences = j.value("max_sentences", c.max_sentences);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("synthetic corpus config: ") + e.what());
  }
  if (c.p_sport < 0 || c.p_family < 0 || c.p_sport + c.p_family > 1 ||
      c.min_sentences < 1 || c.max_sentences < c.min_sentences) {
    throw DataError("synthetic corpus config: inconsistent probabilities or sentence bounds");
  }
  return c;
}

nlohmann::json ToJson(const SyntheticCorpusConfig& c) {
  return {{"documents", c.documents},         {"p_sport", c.p_sport},
          {"p_family", c.p_family},           {"female_sport", c.female_sport},
          {"female_family", c.female_family}, {"female_other", c.female_other},
          {"doc_share_jitter", c.doc_share_jitter}, {"min_sentences", c.min_sentences},
          {"max_sentences", c.max_sentences}, {"seed", c.seed}};
}

std::vector<SentenceDocument> GenerateSyntheticCorpus(const SyntheticCorpusConfig& config) {
  if (config.min_sentences < 1 || config.max_sentences < config.min_sentences) {
    throw UsageError("synthetic corpus needs 1 <= min_sentences <= max_sentences");
  }
  std::vector<SentenceDocument> docs(config.documents);
  const long n = static_cast<long>(config.documents);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(config.seed, "synthetic", "", static_cast<uint64_t>(i)));
    SentenceDocument& doc = docs[i];
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%06ld", i);
    doc.id = id;
    const double u = rng.Uniform01();
    const Topic topic = u < config.p_sport                    ? Topic::kSport
                        : u < config.p_sport + config.p_family ? Topic::kFamily
                                                               : Topic::kUnknown;
    const double mean = topic == Topic::kSport    ? config.female_sport
                        : topic == Topic::kFamily ? config.female_family
                                                  : config.female_other;
    const double share =
        std::clamp(mean + config.doc_share_jitter * (2 * rng.Uniform01() - 1), 0.01, 0.99);
    const int sentences =
        config.min_sentences +
        static_cast<int>(rng.UniformIndex(config.max_sentences - config.min_sentences + 1));
    for (int s = 0; s < sentences; ++s) {
      std::vector<std::string> sent;
      const int length = 6 + static_cast<int>(rng.UniformIndex(7));
      for (int k = 0; k < length; ++k) sent.push_back(Pick(Filler(), rng));
      auto insert = [&](const std::string& w) {
        sent.insert(sent.begin() + static_cast<long>(rng.UniformIndex(sent.size() + 1)), w);
      };
      if (topic == Topic::kSport) {
        if (rng.Bernoulli(0.45)) insert(Pick(SportWords(), rng));
        if (rng.Bernoulli(0.04)) insert(Pick(FamilyWords(), rng));
      } else if (topic == Topic::kFamily) {
        if (rng.Bernoulli(0.45)) insert(Pick(FamilyWords(), rng));
        if (rng.Bernoulli(0.04)) insert(Pick(SportWords(), rng));
      } else {
        if (rng.Bernoulli(0.06)) insert(Pick(SportWords(), rng));
        if (rng.Bernoulli(0.06)) insert(Pick(FamilyWords(), rng));
      }
      const double v = rng.Uniform01();
      const int identifiers = v < 0.3 ? 0 : v < 0.7 ? 1 : v < 0.9 ? 2 : 3;
      for (int k = 0; k < identifiers; ++k) {
        const Gender g = rng.Bernoulli(share) ? Gender::kFemale : Gender::kMale;
        insert(Pick(IdentifierPool(g), rng));
      }
      sent.push_back(".");
      doc.sentences.push_back(std::move(sent));
    }
  }
  return docs;
}

}  // namespace sumbias
