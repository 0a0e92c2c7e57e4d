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

#ifndef SUMBIAS_PERTURBATION_H_
#define SUMBIAS_PERTURBATION_H_

// Fills document templates with controlled demographic assignments to
// build the locally balanced (every input half male, half female) and
// globally balanced (single-gender inputs, balanced across variants)
// corpora, plus race and race-by-gender variants.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/name_inventory.h"
#include "sumbias/rng.h"
#include "sumbias/template_builder.h"

namespace sumbias {

enum class SchemeKind { kGenderLocal, kGenderGlobal, kRaceRandomGender, kRaceIntersectional };

struct AssignmentScheme {
  SchemeKind kind = SchemeKind::kGenderLocal;
  // race -> gender; required iff kind == kRaceIntersectional.
  std::map<std::string, Gender> intersection;
  int variants_per_original = 20;
  bool alter_last_names = false;
  SamplingMode sampling = SamplingMode::kUniform;

  bool IsRace() const {
    return kind == SchemeKind::kRaceRandomGender || kind == SchemeKind::kRaceIntersectional;
  }
  std::string Name() const;
};

// "gender_local", "gender_global", "race_random_gender", or
// "race_intersectional:black=male,white=female".
AssignmentScheme ParseScheme(const std::string& text);

struct NameInventory {
  GenderNameTable census;  // already passed through ResolveAmbiguous
  RaceNameTable race;
  std::vector<std::string> last_names;  // used when altering last names
};

struct EntityAssignment {
  std::string entity;
  std::string group;  // "male"/"female" or a race label
  Gender gender = Gender::kMale;
  std::string first;
  std::string last;  // original last name unless altered

  bool operator==(const EntityAssignment&) const = default;
};

// A person entity as it appears in a rendered input.
struct InputEntity {
  std::string id;
  std::optional<std::string> group;  // set for assigned entities
  std::optional<Gender> gender;
  std::string first;  // assigned, else inferred, else empty
  std::vector<MentionSpan> mentions;  // rendered token positions

  bool operator==(const InputEntity&) const = default;
};

struct GeneratedInput {
  std::string id;
  std::string original_id;
  int variant = 0;
  std::string pair_id;
  std::string scheme;
  uint64_t seed = 0;
  std::vector<EntityAssignment> assignments;
  std::vector<std::string> tokens;
  std::vector<int> sentence;
  std::vector<InputEntity> entities;

  std::string Text() const { return Join(tokens, " "); }
  bool operator==(const GeneratedInput&) const = default;
};

struct RenderedDocument {
  std::vector<std::string> tokens;
  std::vector<int> sentence;
  // Rendered range [begin, end] for every template token.
  std::vector<int> begin;
  std::vector<int> end;
};

// Maps a gendered pronoun to `target`, keeping the original casing. The
// ambiguous "her"/"his" use the POS tag (PRP vs PRP$). Throws RenderError
// for forms that cannot be mapped.
std::string MapPronoun(const std::string& original, const std::string& pos, Gender target);

// Mr. <-> Mrs./Ms. and Sir <-> Lady. `female_title` is the entity's own
// female form, if it has one; otherwise "Ms." is used.
std::string MapTitle(const std::string& original, Gender target,
                     const std::optional<std::string>& female_title);

// Entities without an assignment keep their original text.
RenderedDocument Render(const DocumentTemplate& tpl,
                        const std::vector<EntityAssignment>& assignments);

// Original names and genders; renders the original token stream.
std::vector<EntityAssignment> IdentityAssignments(const DocumentTemplate& tpl);

// Reason the template cannot produce a full set of variants under
// `scheme`, or nullopt. Depends only on the template and inventory, never
// on the seed.
std::optional<std::string> CheckCapacity(const DocumentTemplate& tpl,
                                         const AssignmentScheme& scheme,
                                         const NameInventory& inventory);

// Assignments for one variant. Variants 2k and 2k+1 form a pair that
// shares `pair_rng` draws: same name lists, inverted groups.
std::vector<EntityAssignment> AssignGroups(const DocumentTemplate& tpl,
                                           const AssignmentScheme& scheme, int variant,
                                           Rng& pair_rng, const NameInventory& inventory);

GeneratedInput GenerateInput(const DocumentTemplate& tpl, const AssignmentScheme& scheme,
                             int variant, uint64_t master_seed, const NameInventory& inventory);

struct GenerationResult {
  std::vector<GeneratedInput> inputs;
  std::vector<Diagnostic> dropped;  // one per dropped original
};

// Parallel over (original, variant); output order is (original id, variant)
// regardless of scheduling.
GenerationResult GenerateCorpus(const std::vector<DocumentTemplate>& templates,
                                const AssignmentScheme& scheme, uint64_t master_seed,
                                const NameInventory& inventory);
// Serial reference for GenerateCorpus.
GenerationResult GenerateCorpusSerial(const std::vector<DocumentTemplate>& templates,
                                      const AssignmentScheme& scheme, uint64_t master_seed,
                                      const NameInventory& inventory);

nlohmann::json ToJson(const GeneratedInput& in);
GeneratedInput GeneratedInputFromJson(const nlohmann::json& j);

}  // namespace sumbias

#endif  // SUMBIAS_PERTURBATION_H_
