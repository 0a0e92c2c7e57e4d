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

#ifndef SUMBIAS_SYNTHETIC_H_
#define SUMBIAS_SYNTHETIC_H_

// Stand-in summarizers with known behaviour, for calibration runs and the
// shipped fixture pipeline.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/perturbation.h"
#include "sumbias/rng.h"

namespace sumbias {

enum class SyntheticKind { kIdentity, kLead, kKeepRate };

struct SyntheticSummarizer {
  SyntheticKind kind = SyntheticKind::kIdentity;
  // kKeepRate: probability of mentioning an assigned entity, by group;
  // "default" applies to unlisted groups (1.0 if absent).
  std::map<std::string, double> keep_rate;
  // Probability of adding one name drawn from `invented_names`.
  double hallucination_rate = 0;
  std::vector<std::string> invented_names;
};

// {"kind": "identity"|"lead"|"keep_rate", "keep_rate": {...},
//  "hallucination_rate": p, "invented_names": [...]}.
SyntheticSummarizer SyntheticSummarizerFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const SyntheticSummarizer& s);

// kKeepRate writes one short sentence per kept entity, naming it by its
// assigned first name and its chain last name.
std::string SynthesizeSummary(const GeneratedInput& input, const SyntheticSummarizer& s, Rng& rng);

// Rows {input_id, system, summary}; per-input seeds derive from `seed`.
std::vector<nlohmann::json> SynthesizeSummaries(const std::vector<GeneratedInput>& inputs,
                                                const std::string& system,
                                                const SyntheticSummarizer& s, uint64_t seed);

}  // namespace sumbias

#endif  // SUMBIAS_SYNTHETIC_H_
