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

#ifndef SUMBIAS_SUMMARY_IO_H_
#define SUMBIAS_SUMMARY_IO_H_

// Summarizer outputs: loading, tokenization, and person-entity detection
// with a name lexicon.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sumbias/name_inventory.h"
#include "sumbias/perturbation.h"

namespace sumbias {

struct SummaryEntity {
  int start = 0;  // inclusive token span
  int end = 0;
  std::vector<std::string> tokens;

  bool operator==(const SummaryEntity&) const = default;
};

struct SummaryRecord {
  std::string input_id;
  std::string system;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<SummaryEntity> entities;

  bool operator==(const SummaryRecord&) const = default;
};

// Whitespace split, then leading/trailing punctuation becomes separate
// tokens. "." stays attached to titles ("Ms.") and initials ("J."), and a
// possessive "'s" is split off.
std::vector<std::string> TokenizeSummary(const std::string& text);

// Lowercased name tokens that can trigger a detection. Titles always
// trigger and need not be added.
class EntityLexicon {
 public:
  void Add(const std::string& name);  // multi-word names add every token
  void AddAll(const std::vector<std::string>& names);
  bool Contains(const std::string& token) const;
  size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

// Injected first/last names of every input, census names, race-table
// names, and extra names (e.g. encyclopedia page titles).
EntityLexicon BuildLexicon(const std::vector<GeneratedInput>& inputs,
                           const GenderNameTable& census, const RaceNameTable& race,
                           const std::vector<std::string>& extra = {});

// Maximal runs of capitalized tokens (or titles) with closed-class words
// trimmed from both edges; a run is kept if some token is a lexicon name
// or a title, and leading tokens before the first name or title are
// dropped. Title-only runs are dropped.
std::vector<SummaryEntity> DetectEntities(const std::vector<std::string>& tokens,
                                          const EntityLexicon& lexicon);

// Reads {input_id, system, summary} rows and tokenizes them. Throws
// JoinError listing unknown input ids and IntegrityError on a duplicate
// (input_id, system) pair. Entities are left empty.
std::vector<SummaryRecord> LoadSummaries(const std::string& path,
                                         const std::set<std::string>& known_inputs);
std::vector<SummaryRecord> SummariesFromJson(const std::vector<nlohmann::json>& rows,
                                             const std::set<std::string>& known_inputs);

// Pre-detected entities from an external tagger, keyed by (input_id,
// system). A row without "system" applies to every system of that input.
struct NerSideFile {
  std::map<std::pair<std::string, std::string>, std::vector<SummaryEntity>> by_record;
  std::map<std::string, std::vector<SummaryEntity>> by_input;
};
// Rows {input_id, [system], entities: [[start, end, label], ...]}; only
// PERSON/PER labels are kept. Token positions refer to TokenizeSummary.
NerSideFile LoadNerSideFile(const std::string& path);

// Fills `entities` for every record, from the side file when it has an
// entry, otherwise by lexicon detection. Parallel over records.
void AttachEntities(std::vector<SummaryRecord>& records, const EntityLexicon& lexicon,
                    const NerSideFile* side = nullptr);

nlohmann::json ToJson(const SummaryRecord& r);
SummaryRecord SummaryRecordFromJson(const nlohmann::json& j);

}  // namespace sumbias

#endif  // SUMBIAS_SUMMARY_IO_H_
