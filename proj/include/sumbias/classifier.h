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

#ifndef SUMBIAS_CLASSIFIER_H_
#define SUMBIAS_CLASSIFIER_H_

// Apparent gender of hallucinated entities: encyclopedia page lookup
// first, first-name census lists second. Race is never inferred.

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/name_inventory.h"

namespace sumbias {

struct EncyclopediaPage {
  std::string title;
  std::set<std::string> categories;
  std::map<std::string, long> pronoun_counts;  // he, him, his, himself, she, ...
};

// Lookup by exact page title. Implementations must be safe for concurrent
// queries.
class LookupClient {
 public:
  virtual ~LookupClient() = default;
  // All pages matching the title (several when a redirect is ambiguous).
  // Throws LoadError on transport failure.
  virtual std::vector<EncyclopediaPage> Query(const std::string& title) = 0;
};

// Offline cache: JSON object title -> page or list of pages, each
// {"categories": [...], "counts": {"he": n, ...}}. Titles match
// case-insensitively. Repeated queries are served from a memo.
class FixtureLookupClient : public LookupClient {
 public:
  explicit FixtureLookupClient(const nlohmann::json& cache);
  static FixtureLookupClient FromFile(const std::string& path);
  FixtureLookupClient(const FixtureLookupClient& other);

  std::vector<EncyclopediaPage> Query(const std::string& title) override;
  long query_count() const;
  // Lowercased titles with at least one person page; these extend the
  // summary entity lexicon.
  std::vector<std::string> PersonTitles() const;

 private:
  std::map<std::string, std::vector<EncyclopediaPage>> pages_;  // lowercase title
  mutable std::mutex mu_;
  std::map<std::string, std::vector<EncyclopediaPage>> memo_;
  long queries_ = 0;
};

enum class VerdictSource { kEncyclopedia, kCensus, kNone };
std::string_view VerdictSourceName(VerdictSource s);

struct GenderVerdict {
  std::optional<Gender> gender;  // nullopt = unknown
  VerdictSource source = VerdictSource::kNone;
  std::string note;

  bool operator==(const GenderVerdict&) const = default;
};

// Male/female majority of the pronoun counts; nullopt on a tie.
std::optional<Gender> PronounMajority(const std::map<std::string, long>& counts);

// True if some category contains "births", "deaths" or "people".
bool IsPersonPage(const EncyclopediaPage& page);

// nullopt when there is no usable page (single-token entity, no match,
// no person category, or a lookup failure). Conflicting person pages give
// an unknown verdict.
std::optional<GenderVerdict> ClassifyEncyclopedia(const std::vector<std::string>& tokens,
                                                  LookupClient& client);

// Male if any token is a male first name, female if any is a female one,
// unknown if both or neither. `names` should be ambiguity-resolved.
GenderVerdict ClassifyCensus(const std::vector<std::string>& tokens, const GenderNameTable& names);

GenderVerdict Classify(const std::vector<std::string>& tokens, LookupClient* client,
                       const GenderNameTable& names);

}  // namespace sumbias

#endif  // SUMBIAS_CLASSIFIER_H_
