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

#include "sumbias/synthetic.h"

#include "sumbias/alignment.h"
#include "sumbias/errors.h"

namespace sumbias {

SyntheticSummarizer SyntheticSummarizerFromJson(const nlohmann::json& j) {
  SyntheticSummarizer s;
  const std::string kind = j.value("kind", "identity");
  if (kind == "identity") s.kind = SyntheticKind::kIdentity;
  else if (kind == "lead") s.kind = SyntheticKind::kLead;
  else if (kind == "keep_rate") s.kind = SyntheticKind::kKeepRate;
  else throw UsageError("unknown synthetic summarizer kind '" + kind + "'");
  if (j.contains("keep_rate")) s.keep_rate = j["keep_rate"].get<std::map<std::string, double>>();
  s.hallucination_rate = j.value("hallucination_rate", 0.0);
  s.invented_names = j.value("invented_names", std::vector<std::string>{});
  if (s.hallucination_rate > 0 && s.invented_names.empty()) {
    throw UsageError("hallucination_rate > 0 needs invented_names");
  }
  return s;
}

nlohmann::json ToJson(const SyntheticSummarizer& s) {
  const char* kind = s.kind == SyntheticKind::kIdentity ? "identity"
                     : s.kind == SyntheticKind::kLead   ? "lead"
                                                        : "keep_rate";
  return {{"kind", kind},
          {"keep_rate", s.keep_rate},
          {"hallucination_rate", s.hallucination_rate},
          {"invented_names", s.invented_names}};
}

std::string SynthesizeSummary(const GeneratedInput& input, const SyntheticSummarizer& s, Rng& rng) {
  std::vector<std::string> out;
  switch (s.kind) {
    case SyntheticKind::kIdentity:
      out = input.tokens;
      break;
    case SyntheticKind::kLead: {
      for (size_t i = 0; i < input.tokens.size(); ++i) {
        if (input.sentence[i] - input.sentence.front() >= 3) break;
        out.push_back(input.tokens[i]);
      }
      break;
    }
    case SyntheticKind::kKeepRate: {
      for (const InputEntity& e : input.entities) {
        if (!e.group) continue;
        double rate = 1.0;
        if (auto it = s.keep_rate.find(*e.group); it != s.keep_rate.end()) {
          rate = it->second;
        } else if (auto d = s.keep_rate.find("default"); d != s.keep_rate.end()) {
          rate = d->second;
        }
        if (!rng.Bernoulli(rate)) continue;
        const std::string last = ChainLastName(e, input.tokens);
        if (!e.first.empty()) out.push_back(e.first);
        if (!last.empty() && last != e.first) out.push_back(last);
        // A gendered pronoun per kept entity lets word-list measures see the skew.
        if (e.gender) {
          out.insert(out.end(), {"said", *e.gender == Gender::kMale ? "he" : "she", "agreed", "."});
        } else {
          out.insert(out.end(), {"was", "mentioned", "."});
        }
      }
      out.insert(out.end(), {"The", "report", "was", "published", "."});
      break;
    }
  }
  if (s.hallucination_rate > 0 && rng.Bernoulli(s.hallucination_rate)) {
    const std::string& name = s.invented_names[rng.UniformIndex(s.invented_names.size())];
    for (const auto& t : SplitWhitespace(name)) out.push_back(t);
    out.insert(out.end(), {"commented", "."});
  }
  return Join(out, " ");
}

std::vector<nlohmann::json> SynthesizeSummaries(const std::vector<GeneratedInput>& inputs,
                                                const std::string& system,
                                                const SyntheticSummarizer& s, uint64_t seed) {
  std::vector<nlohmann::json> rows(inputs.size());
  const long n = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (long i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(seed, "summarize", system + "/" + inputs[i].id));
    rows[i] = {{"input_id", inputs[i].id},
               {"system", system},
               {"summary", SynthesizeSummary(inputs[i], s, rng)}};
  }
  return rows;
}

}  // namespace sumbias
