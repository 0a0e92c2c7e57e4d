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

#ifndef SUMBIAS_ALIGNMENT_H_
#define SUMBIAS_ALIGNMENT_H_

// Matches summary entities to input entities by last name and assigned
// first name, and tags the leftovers as hallucinations.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/perturbation.h"
#include "sumbias/summary_io.h"

namespace sumbias {

enum class AlignStatus { kAligned, kHallucinated, kUnresolved };
std::string_view AlignStatusName(AlignStatus s);
std::optional<AlignStatus> ParseAlignStatus(std::string_view s);

struct AlignmentResult {
  std::string input_id;
  std::string system;
  SummaryEntity entity;
  AlignStatus status = AlignStatus::kUnresolved;
  std::optional<std::string> matched_entity;
  std::string reason;
  // Gender inferred from a title in the summary entity that disagrees with
  // the matched entity's gender, e.g. "Mr. Levin" aligned to a woman.
  bool title_gender_mismatch = false;

  bool operator==(const AlignmentResult&) const = default;
};

// The capitalized token most often in final position among the entity's
// non-pronoun mentions; ties go to the earliest occurrence. Empty when no
// mention ends in a capitalized token.
std::string ChainLastName(const InputEntity& entity, const std::vector<std::string>& tokens);

// Lowercased tokens of an input document.
std::set<std::string> SourceVocabulary(const std::vector<std::string>& tokens);

// Aligns one summary entity against the input's entities.
AlignmentResult Align(const SummaryEntity& entity, const GeneratedInput& input,
                      const std::set<std::string>& source_vocab);

// Per-system validation counts.
struct AlignmentCounts {
  long input_entities = 0;
  long summary_entities = 0;
  long input_entities_aligned = 0;  // input entities with >= 1 aligned summary entity
  long aligned = 0;                 // summary entities
  long hallucinated = 0;
  long hallucinated_unguarded = 0;  // no match, before the source-token safeguard
  long unresolved = 0;
  long hallucinated_gender_classified = 0;  // filled in after classification

  bool operator==(const AlignmentCounts&) const = default;
};

struct AlignmentTable {
  std::vector<AlignmentResult> results;  // sorted by (input, system, span)
  std::map<std::string, AlignmentCounts> counts;  // by system
  // (input id, system) -> ids of input entities aligned at least once.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> included;
};

// Records must reference ids present in `inputs` (JoinError otherwise).
// Parallel over records; the result does not depend on scheduling.
AlignmentTable AlignCorpus(const std::vector<SummaryRecord>& records,
                           const std::vector<GeneratedInput>& inputs);
// Serial reference for AlignCorpus.
AlignmentTable AlignCorpusSerial(const std::vector<SummaryRecord>& records,
                                 const std::vector<GeneratedInput>& inputs);

// Rebuilds counts and inclusion sets from stored results.
AlignmentTable TableFromResults(const std::vector<SummaryRecord>& records,
                                const std::vector<GeneratedInput>& inputs,
                                std::vector<AlignmentResult> results);

nlohmann::json ToJson(const AlignmentResult& r);
AlignmentResult AlignmentResultFromJson(const nlohmann::json& j);

}  // namespace sumbias

#endif  // SUMBIAS_ALIGNMENT_H_
