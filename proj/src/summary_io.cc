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

#include "sumbias/summary_io.h"

#include <algorithm>
#include <cctype>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"

namespace sumbias {
namespace {

bool IsPunctChar(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool KeepsPeriod(const std::string& core) {
  if (IsTitle(core)) return true;
  return core.size() == 2 && std::isupper(static_cast<unsigned char>(core[0])) && core[1] == '.';
}

// Sentence-initial or function words that often precede a name in a
// capitalized run.
const std::set<std::string>& ClosedClass() {
  static const std::set<std::string> words = {
      "a",     "after", "also",   "an",   "and",   "as",    "at",    "before", "but",
      "by",    "during", "for",   "from", "he",    "her",   "his",   "however", "i",
      "if",    "in",    "it",     "its",  "meanwhile", "of", "on",   "or",    "she",
      "since", "so",    "that",   "the",  "their", "then",  "there", "these", "they",
      "this",  "those", "though", "to",   "under", "when",  "where", "while", "with",
      "yesterday", "today", "we", "you", "according", "speaking", "said", "says"};
  return words;
}

SummaryEntity MakeEntity(const std::vector<std::string>& tokens, int start, int end) {
  SummaryEntity e;
  e.start = start;
  e.end = end;
  e.tokens.assign(tokens.begin() + start, tokens.begin() + end + 1);
  return e;
}

}  // namespace

std::vector<std::string> TokenizeSummary(const std::string& text) {
  std::vector<std::string> out;
  for (std::string word : SplitWhitespace(text)) {
    const std::string low = ToLower(word);
    if (low == "'s" || low == "n't" || low == "'") {
      out.push_back(word);
      continue;
    }
    size_t b = 0;
    while (b < word.size() && IsPunctChar(word[b])) out.push_back(std::string(1, word[b++]));
    word = word.substr(b);
    std::vector<std::string> trailing;
    while (!word.empty() && IsPunctChar(word.back())) {
      if (word.back() == '.' && KeepsPeriod(word)) break;
      trailing.insert(trailing.begin(), std::string(1, word.back()));
      word.pop_back();
    }
    std::string possessive;
    if (word.size() > 2) {
      const std::string tail = ToLower(word.substr(word.size() - 2));
      if (tail == "'s") {
        possessive = word.substr(word.size() - 2);
        word.resize(word.size() - 2);
      }
    }
    if (!word.empty()) out.push_back(word);
    if (!possessive.empty()) out.push_back(possessive);
    for (auto& t : trailing) out.push_back(std::move(t));
  }
  return out;
}

void EntityLexicon::Add(const std::string& name) {
  for (const auto& tok : SplitWhitespace(name)) {
    const std::string w = ToLower(StripPunct(tok));
    if (!w.empty()) words_.insert(w);
  }
}

void EntityLexicon::AddAll(const std::vector<std::string>& names) {
  for (const auto& n : names) Add(n);
}

bool EntityLexicon::Contains(const std::string& token) const {
  return words_.count(ToLower(StripPunct(token))) > 0;
}

EntityLexicon BuildLexicon(const std::vector<GeneratedInput>& inputs,
                           const GenderNameTable& census, const RaceNameTable& race,
                           const std::vector<std::string>& extra) {
  EntityLexicon lex;
  for (const auto& in : inputs) {
    for (const auto& a : in.assignments) {
      lex.Add(a.first);
      lex.Add(a.last);
    }
    for (const auto& e : in.entities) lex.Add(e.first);
  }
  for (Gender g : {Gender::kMale, Gender::kFemale}) lex.AddAll(census.Names(g));
  for (const auto& [group, names] : race.groups) {
    lex.AddAll(names.male_first);
    lex.AddAll(names.female_first);
    lex.AddAll(names.last);
  }
  lex.AddAll(extra);
  return lex;
}

std::vector<SummaryEntity> DetectEntities(const std::vector<std::string>& tokens,
                                          const EntityLexicon& lexicon) {
  std::vector<SummaryEntity> out;
  const int n = static_cast<int>(tokens.size());
  auto in_run = [&](int i) { return IsCapitalized(tokens[i]) || IsTitle(tokens[i]); };
  auto closed = [&](int i) { return ClosedClass().count(ToLower(tokens[i])) > 0; };
  for (int i = 0; i < n;) {
    if (!in_run(i)) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && in_run(j + 1)) ++j;
    int s = i, e = j;
    while (s <= e && closed(s)) ++s;
    while (e >= s && closed(e)) --e;
    bool has_name = false;
    for (int k = s; k <= e; ++k) {
      if (!IsTitle(tokens[k]) && lexicon.Contains(tokens[k])) has_name = true;
    }
    // Capitalized words before the name ("Senator", sentence-initial
    // adverbs) are not part of it.
    if (has_name) {
      while (s < e && !IsTitle(tokens[s]) && !lexicon.Contains(tokens[s])) ++s;
    }
    bool has_title = false, all_titles = true;
    for (int k = s; k <= e; ++k) {
      if (IsTitle(tokens[k])) has_title = true;
      else all_titles = false;
    }
    if (s <= e && (has_name || has_title) && !all_titles) out.push_back(MakeEntity(tokens, s, e));
    i = j + 1;
  }
  return out;
}

std::vector<SummaryRecord> SummariesFromJson(const std::vector<nlohmann::json>& rows,
                                             const std::set<std::string>& known_inputs) {
  std::vector<SummaryRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::string> unknown;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    SummaryRecord r;
    try {
      r.input_id = row.at("input_id").get<std::string>();
      r.system = row.at("system").get<std::string>();
      r.text = row.at("summary").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("summary row " + std::to_string(i + 1) +
                      ": expected string fields input_id, system, summary");
    }
    if (!known_inputs.count(r.input_id)) {
      unknown.push_back(r.input_id);
      continue;
    }
    if (!seen.insert({r.input_id, r.system}).second) {
      throw IntegrityError("duplicate summary for (" + r.input_id + ", " + r.system + ") at row " +
                           std::to_string(i + 1));
    }
    r.tokens = TokenizeSummary(r.text);
    out.push_back(std::move(r));
  }
  if (!unknown.empty()) {
    std::string msg = std::to_string(unknown.size()) + " summaries reference unknown inputs:";
    for (size_t k = 0; k < unknown.size() && k < 10; ++k) msg += " " + unknown[k];
    if (unknown.size() > 10) msg += " ...";
    throw JoinError(msg);
  }
  std::sort(out.begin(), out.end(), [](const SummaryRecord& a, const SummaryRecord& b) {
    return std::tie(a.input_id, a.system) < std::tie(b.input_id, b.system);
  });
  return out;
}

std::vector<SummaryRecord> LoadSummaries(const std::string& path,
                                         const std::set<std::string>& known_inputs) {
  return SummariesFromJson(ReadJsonl(path), known_inputs);
}

NerSideFile LoadNerSideFile(const std::string& path) {
  NerSideFile side;
  const auto rows = ReadJsonl(path);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    try {
      const std::string input = row.at("input_id").get<std::string>();
      std::vector<SummaryEntity> ents;
      for (const auto& item : row.at("entities")) {
        const std::string label = item.size() > 2 ? item.at(2).get<std::string>() : "PERSON";
        if (label != "PERSON" && label != "PER") continue;
        SummaryEntity e;
        e.start = item.at(0).get<int>();
        e.end = item.at(1).get<int>();
        if (e.start < 0 || e.end < e.start) {
          throw DataError("NER side file row " + std::to_string(i + 1) + ": bad span");
        }
        ents.push_back(std::move(e));
      }
      if (row.contains("system")) {
        side.by_record[{input, row["system"].get<std::string>()}] = std::move(ents);
      } else {
        side.by_input[input] = std::move(ents);
      }
    } catch (const nlohmann::json::exception&) {
      throw DataError("NER side file row " + std::to_string(i + 1) +
                      ": expected {input_id, entities: [[start, end, label], ...]}");
    }
  }
  return side;
}

void AttachEntities(std::vector<SummaryRecord>& records, const EntityLexicon& lexicon,
                    const NerSideFile* side) {
  const long n = static_cast<long>(records.size());
  std::vector<std::string> errors(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    SummaryRecord& r = records[i];
    const std::vector<SummaryEntity>* given = nullptr;
    if (side) {
      if (auto it = side->by_record.find({r.input_id, r.system}); it != side->by_record.end()) {
        given = &it->second;
      } else if (auto jt = side->by_input.find(r.input_id); jt != side->by_input.end()) {
        given = &jt->second;
      }
    }
    if (!given) {
      r.entities = DetectEntities(r.tokens, lexicon);
      continue;
    }
    r.entities.clear();
    for (const auto& e : *given) {
      if (e.end >= static_cast<int>(r.tokens.size())) {
        errors[i] = "NER span [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
                    "] out of range for " + r.input_id + " / " + r.system;
        break;
      }
      r.entities.push_back(MakeEntity(r.tokens, e.start, e.end));
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError(e);
  }
}

nlohmann::json ToJson(const SummaryRecord& r) {
  nlohmann::json j{{"input_id", r.input_id}, {"system", r.system}, {"summary", r.text},
                   {"tokens", r.tokens}};
  auto& ents = j["entities"] = nlohmann::json::array();
  for (const auto& e : r.entities) ents.push_back({{"start", e.start}, {"end", e.end}, {"tokens", e.tokens}});
  return j;
}

SummaryRecord SummaryRecordFromJson(const nlohmann::json& j) {
  SummaryRecord r;
  r.input_id = j.at("input_id").get<std::string>();
  r.system = j.at("system").get<std::string>();
  r.text = j.at("summary").get<std::string>();
  r.tokens = j.contains("tokens") ? j["tokens"].get<std::vector<std::string>>() : TokenizeSummary(r.text);
  if (j.contains("entities")) {
    for (const auto& e : j["entities"]) {
      r.entities.push_back({e.at("start").get<int>(), e.at("end").get<int>(),
                            e.at("tokens").get<std::vector<std::string>>()});
    }
  }
  return r;
}

}  // namespace sumbias
