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

#ifndef SUMBIAS_TEMPLATE_BUILDER_H_
#define SUMBIAS_TEMPLATE_BUILDER_H_

// Turns an annotated document into a fillable template: person entities,
// their inferred first/last names, and the token positions ("holes") that
// must change when an entity is assigned a different gender or name.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/corpus.h"
#include "sumbias/text_util.h"

namespace sumbias {

enum class SlotCategory { kFullName, kFirstName, kLastName, kPronoun, kTitle };

std::string_view SlotCategoryName(SlotCategory c);
SlotCategory ParseSlotCategory(std::string_view name);

// What a hole is replaced with when rendering.
enum class HoleKind { kFirst, kLast, kFull, kPronoun, kTitle };

std::string_view HoleKindName(HoleKind k);
HoleKind ParseHoleKind(std::string_view name);

// A contiguous token range inside a mention that rendering rewrites.
struct SlotHole {
  int start = 0;
  int end = 0;  // inclusive
  HoleKind kind = HoleKind::kLast;
  std::string pos;  // POS of the single token for pronoun holes

  bool operator==(const SlotHole&) const = default;
};

struct EntitySlot {
  std::string entity;
  MentionSpan mention;
  SlotCategory category = SlotCategory::kLastName;
  std::string title_text;  // set when category == kTitle
  std::vector<SlotHole> holes;

  bool operator==(const EntitySlot&) const = default;
};

struct EntityTemplate {
  std::string id;
  std::optional<std::string> inferred_first;
  std::optional<std::string> inferred_last;
  std::vector<EntitySlot> slots;
  // Every mention of the entity, including ones that are not slots.
  std::vector<MentionSpan> mentions;
  bool is_gendered = false;
  // Majority of pronoun/title evidence; nullopt when absent or tied.
  std::optional<Gender> original_gender;
  // Most frequent original female title (Mrs. or Ms.), if any.
  std::optional<std::string> female_title;

  bool operator==(const EntityTemplate&) const = default;
};

struct ContentWordSpan {
  std::string doc_id;
  int start = 0;
  int end = 0;  // inclusive
  std::vector<std::string> entities;  // governing entity ids
  std::string male_variant;
  std::string female_variant;
  std::string neutral_variant;  // required when entities.size() > 1

  bool operator==(const ContentWordSpan&) const = default;
};

struct DocumentTemplate {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;
  std::vector<int> sentence;
  std::vector<EntityTemplate> entities;
  std::vector<ContentWordSpan> content_spans;
  bool eligible = false;
  std::vector<Diagnostic> diagnostics;

  const EntityTemplate* FindEntity(const std::string& id) const;
  int GenderedEntityCount() const;
};

// A person entity found in a document: a coreference chain with a linked
// PERSON span, or a synthetic singleton for an unlinked PERSON span.
struct PersonEntity {
  std::string id;
  std::vector<MentionSpan> mentions;
  std::vector<NamedEntitySpan> person_spans;
};

// Chain ids of person chains plus one "ne:<start>-<end>" singleton id per
// PERSON span not linked to any chain. Each PERSON span links to the
// shortest chain mention containing it (earliest on ties).
std::vector<PersonEntity> SelectPersonEntities(const AnnotatedDocument& doc);
std::vector<std::string> SelectPersonChains(const AnnotatedDocument& doc);

struct InferredNames {
  std::optional<std::string> first;
  std::optional<std::string> last;
  // True when the last name rests only on single-token spans with no
  // title context (could equally be a first name).
  bool single_token_only = false;

  bool operator==(const InferredNames&) const = default;
};

InferredNames InferNames(const AnnotatedDocument& doc, const PersonEntity& entity);

// `content_spans` are the side annotations for this document (may be empty).
DocumentTemplate BuildTemplate(const AnnotatedDocument& doc,
                               const std::vector<ContentWordSpan>& content_spans = {});

// Content-word side file: JSONL of ContentWordSpan rows keyed by doc_id.
std::map<std::string, std::vector<ContentWordSpan>> LoadContentWordSpans(
    const std::string& path);

nlohmann::json ToJson(const DocumentTemplate& t);
DocumentTemplate TemplateFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ContentWordSpan& s);
ContentWordSpan ContentWordSpanFromJson(const nlohmann::json& j);

}  // namespace sumbias

#endif  // SUMBIAS_TEMPLATE_BUILDER_H_
