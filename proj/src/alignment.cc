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

#include "sumbias/alignment.h"

#include <algorithm>
#include <tuple>

#include "sumbias/errors.h"

namespace sumbias {

std::string_view AlignStatusName(AlignStatus s) {
  switch (s) {
    case AlignStatus::kAligned: return "aligned";
    case AlignStatus::kHallucinated: return "hallucinated";
    case AlignStatus::kUnresolved: return "unresolved";
  }
  return "";
}

std::optional<AlignStatus> ParseAlignStatus(std::string_view s) {
  if (s == "aligned") return AlignStatus::kAligned;
  if (s == "hallucinated") return AlignStatus::kHallucinated;
  if (s == "unresolved") return AlignStatus::kUnresolved;
  return std::nullopt;
}

std::string ChainLastName(const InputEntity& entity, const std::vector<std::string>& tokens) {
  std::map<std::string, std::pair<int, int>> count;  // token -> (count, first position)
  for (const MentionSpan& m : entity.mentions) {
    if (m.end < 0 || m.end >= static_cast<int>(tokens.size())) continue;
    if (m.start == m.end && IsGenderedPronoun(ToLower(tokens[m.start]))) continue;
    const std::string& last = tokens[m.end];
    if (!IsCapitalized(last) || IsTitle(last)) continue;
    auto [it, fresh] = count.try_emplace(last, 0, m.end);
    ++it->second.first;
    it->second.second = std::min(it->second.second, m.end);
  }
  std::string best;
  int best_count = 0, best_pos = 0;
  for (const auto& [tok, cp] : count) {
    if (cp.first > best_count || (cp.first == best_count && cp.second < best_pos)) {
      best = tok;
      best_count = cp.first;
      best_pos = cp.second;
    }
  }
  return best;
}

std::set<std::string> SourceVocabulary(const std::vector<std::string>& tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) out.insert(ToLower(t));
  return out;
}

AlignmentResult Align(const SummaryEntity& entity, const GeneratedInput& input,
                      const std::set<std::string>& source_vocab) {
  AlignmentResult r;
  r.input_id = input.id;
  r.entity = entity;
  std::vector<std::string> low;
  for (const auto& t : entity.tokens) low.push_back(ToLower(t));

  struct Candidate {
    size_t index;
    bool first_match;
  };
  std::vector<Candidate> candidates;
  for (size_t i = 0; i < input.entities.size(); ++i) {
    const InputEntity& e = input.entities[i];
    const std::string last = ToLower(ChainLastName(e, input.tokens));
    if (last.empty()) continue;
    const auto first_tokens = SplitWhitespace(ToLower(e.first));
    auto pos = std::find(low.begin(), low.end(), last);
    if (pos == low.end()) continue;
    bool ok = true, first_match = false;
    for (auto it = low.begin(); it != low.end(); ++it) {
      if (it == pos) continue;
      if (IsTitle(*it)) continue;
      if (std::find(first_tokens.begin(), first_tokens.end(), *it) != first_tokens.end()) {
        first_match = true;
        continue;
      }
      ok = false;
      break;
    }
    if (ok) candidates.push_back({i, first_match});
  }

  if (!candidates.empty()) {
    auto best = std::find_if(candidates.begin(), candidates.end(),
                             [](const Candidate& c) { return c.first_match; });
    if (best == candidates.end()) best = candidates.begin();
    const InputEntity& e = input.entities[best->index];
    r.status = AlignStatus::kAligned;
    r.matched_entity = e.id;
    r.reason = "last name matches " + e.id;
    r.reason += best->first_match ? "; first name matches" : "; other tokens are titles";
    if (candidates.size() > 1) r.reason += "; " + std::to_string(candidates.size()) + " candidates";
    for (const auto& t : entity.tokens) {
      auto tg = TitleGender(t);
      if (tg && e.gender && *tg != *e.gender) {
        r.title_gender_mismatch = true;
        r.reason += "; title gender differs";
        break;
      }
    }
    return r;
  }

  for (size_t k = 0; k < low.size(); ++k) {
    if (IsTitle(low[k])) continue;
    if (!source_vocab.count(low[k])) {
      r.status = AlignStatus::kHallucinated;
      r.reason = "no input entity matches; '" + entity.tokens[k] + "' not in source";
      return r;
    }
  }
  r.status = AlignStatus::kUnresolved;
  r.reason = "no input entity matches; every token appears in source";
  return r;
}

namespace {

struct RecordAlignment {
  std::vector<AlignmentResult> results;
};

RecordAlignment AlignRecord(const SummaryRecord& rec, const GeneratedInput& input) {
  RecordAlignment out;
  const auto vocab = SourceVocabulary(input.tokens);
  for (const auto& e : rec.entities) {
    AlignmentResult r = Align(e, input, vocab);
    r.system = rec.system;
    out.results.push_back(std::move(r));
  }
  return out;
}

std::vector<const GeneratedInput*> JoinInputs(const std::vector<SummaryRecord>& records,
                                              const std::vector<GeneratedInput>& inputs) {
  std::map<std::string, const GeneratedInput*> by_id;
  for (const auto& in : inputs) by_id[in.id] = &in;
  std::vector<const GeneratedInput*> out;
  std::vector<std::string> missing;
  for (const auto& r : records) {
    auto it = by_id.find(r.input_id);
    if (it == by_id.end()) {
      missing.push_back(r.input_id);
      out.push_back(nullptr);
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = "summaries reference unknown inputs:";
    for (size_t k = 0; k < missing.size() && k < 10; ++k) msg += " " + missing[k];
    throw JoinError(msg);
  }
  return out;
}

AlignmentTable Aggregate(const std::vector<SummaryRecord>& records,
                         const std::vector<const GeneratedInput*>& joined,
                         std::vector<RecordAlignment>& per_record) {
  AlignmentTable table;
  for (size_t i = 0; i < records.size(); ++i) {
    const SummaryRecord& rec = records[i];
    AlignmentCounts& c = table.counts[rec.system];
    c.input_entities += static_cast<long>(joined[i]->entities.size());
    c.summary_entities += static_cast<long>(rec.entities.size());
    auto& included = table.included[{rec.input_id, rec.system}];
    for (auto& r : per_record[i].results) {
      switch (r.status) {
        case AlignStatus::kAligned:
          ++c.aligned;
          included.insert(*r.matched_entity);
          break;
        case AlignStatus::kHallucinated:
          ++c.hallucinated;
          ++c.hallucinated_unguarded;
          break;
        case AlignStatus::kUnresolved:
          ++c.unresolved;
          ++c.hallucinated_unguarded;
          break;
      }
      table.results.push_back(std::move(r));
    }
    c.input_entities_aligned += static_cast<long>(included.size());
  }
  std::stable_sort(table.results.begin(), table.results.end(),
                   [](const AlignmentResult& a, const AlignmentResult& b) {
                     return std::tie(a.input_id, a.system, a.entity.start) <
                            std::tie(b.input_id, b.system, b.entity.start);
                   });
  return table;
}

}  // namespace

AlignmentTable AlignCorpus(const std::vector<SummaryRecord>& records,
                           const std::vector<GeneratedInput>& inputs) {
  const auto joined = JoinInputs(records, inputs);
  std::vector<RecordAlignment> per_record(records.size());
  const long n = static_cast<long>(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) per_record[i] = AlignRecord(records[i], *joined[i]);
  return Aggregate(records, joined, per_record);
}

AlignmentTable AlignCorpusSerial(const std::vector<SummaryRecord>& records,
                                 const std::vector<GeneratedInput>& inputs) {
  const auto joined = JoinInputs(records, inputs);
  std::vector<RecordAlignment> per_record(records.size());
  for (size_t i = 0; i < records.size(); ++i) per_record[i] = AlignRecord(records[i], *joined[i]);
  return Aggregate(records, joined, per_record);
}

AlignmentTable TableFromResults(const std::vector<SummaryRecord>& records,
                                const std::vector<GeneratedInput>& inputs,
                                std::vector<AlignmentResult> results) {
  const auto joined = JoinInputs(records, inputs);
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (size_t i = 0; i < records.size(); ++i) index[{records[i].input_id, records[i].system}] = i;
  std::vector<RecordAlignment> per_record(records.size());
  for (auto& r : results) {
    auto it = index.find({r.input_id, r.system});
    if (it == index.end()) {
      throw JoinError("alignment for " + r.input_id + " / " + r.system + " has no summary");
    }
    per_record[it->second].results.push_back(std::move(r));
  }
  return Aggregate(records, joined, per_record);
}

nlohmann::json ToJson(const AlignmentResult& r) {
  nlohmann::json j{{"input_id", r.input_id},
                   {"system", r.system},
                   {"entity_tokens", r.entity.tokens},
                   {"start", r.entity.start},
                   {"end", r.entity.end},
                   {"status", AlignStatusName(r.status)},
                   {"reason", r.reason}};
  j["matched_entity"] = r.matched_entity ? nlohmann::json(*r.matched_entity) : nlohmann::json();
  if (r.title_gender_mismatch) j["title_gender_mismatch"] = true;
  return j;
}

AlignmentResult AlignmentResultFromJson(const nlohmann::json& j) {
  AlignmentResult r;
  r.input_id = j.at("input_id").get<std::string>();
  r.system = j.at("system").get<std::string>();
  r.entity.tokens = j.at("entity_tokens").get<std::vector<std::string>>();
  r.entity.start = j.value("start", 0);
  r.entity.end = j.value("end", static_cast<int>(r.entity.tokens.size()) - 1);
  const auto status = ParseAlignStatus(j.at("status").get<std::string>());
  if (!status) throw DataError("unknown alignment status '" + j["status"].get<std::string>() + "'");
  r.status = *status;
  if (j.contains("matched_entity") && !j["matched_entity"].is_null()) {
    r.matched_entity = j["matched_entity"].get<std::string>();
  }
  r.reason = j.value("reason", "");
  r.title_gender_mismatch = j.value("title_gender_mismatch", false);
  return r;
}

}  // namespace sumbias
