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

#include "sumbias/classifier.h"

#include <algorithm>
#include <iostream>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"

namespace sumbias {
namespace {

EncyclopediaPage PageFromJson(const std::string& title, const nlohmann::json& j) {
  EncyclopediaPage p;
  p.title = j.value("title", title);
  for (const auto& c : j.at("categories")) p.categories.insert(c.get<std::string>());
  for (const auto& [k, v] : j.at("counts").items()) p.pronoun_counts[ToLower(k)] = v.get<long>();
  return p;
}

}  // namespace

FixtureLookupClient::FixtureLookupClient(const nlohmann::json& cache) {
  if (!cache.is_object()) throw LoadError("encyclopedia cache must be a JSON object");
  for (const auto& [title, value] : cache.items()) {
    try {
      auto& pages = pages_[ToLower(title)];
      if (value.is_array()) {
        for (const auto& p : value) pages.push_back(PageFromJson(title, p));
      } else {
        pages.push_back(PageFromJson(title, value));
      }
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("encyclopedia cache entry '" + title + "': " + e.what());
    }
  }
}

FixtureLookupClient FixtureLookupClient::FromFile(const std::string& path) {
  return FixtureLookupClient(ReadJsonFile(path));
}

FixtureLookupClient::FixtureLookupClient(const FixtureLookupClient& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  pages_ = other.pages_;
  memo_ = other.memo_;
  queries_ = other.queries_;
}

std::vector<EncyclopediaPage> FixtureLookupClient::Query(const std::string& title) {
  const std::string key = ToLower(title);
  std::lock_guard<std::mutex> lock(mu_);
  ++queries_;
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<EncyclopediaPage> found;
  if (auto it = pages_.find(key); it != pages_.end()) found = it->second;
  memo_[key] = found;
  return found;
}

long FixtureLookupClient::query_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queries_;
}

std::vector<std::string> FixtureLookupClient::PersonTitles() const {
  std::vector<std::string> out;
  for (const auto& [title, pages] : pages_) {
    if (std::any_of(pages.begin(), pages.end(), IsPersonPage)) out.push_back(title);
  }
  return out;
}

std::string_view VerdictSourceName(VerdictSource s) {
  switch (s) {
    case VerdictSource::kEncyclopedia: return "encyclopedia";
    case VerdictSource::kCensus: return "census";
    case VerdictSource::kNone: return "none";
  }
  return "";
}

std::optional<Gender> PronounMajority(const std::map<std::string, long>& counts) {
  long male = 0, female = 0;
  for (const auto& [word, n] : counts) {
    if (auto g = PronounGender(word)) (*g == Gender::kMale ? male : female) += n;
  }
  if (male == female) return std::nullopt;
  return male > female ? Gender::kMale : Gender::kFemale;
}

bool IsPersonPage(const EncyclopediaPage& page) {
  for (const auto& c : page.categories) {
    const std::string low = ToLower(c);
    if (low.find("births") != std::string::npos || low.find("deaths") != std::string::npos ||
        low.find("people") != std::string::npos) {
      return true;
    }
  }
  return false;
}

std::optional<GenderVerdict> ClassifyEncyclopedia(const std::vector<std::string>& tokens,
                                                  LookupClient& client) {
  if (tokens.size() < 2) return std::nullopt;
  std::vector<EncyclopediaPage> pages;
  try {
    pages = client.Query(Join(tokens, " "));
  } catch (const LoadError& e) {
    std::cerr << "warning: encyclopedia lookup failed for '" << Join(tokens, " ")
              << "': " << e.what() << "\n";
    return std::nullopt;
  }
  std::set<std::optional<Gender>> verdicts;
  int person_pages = 0;
  for (const auto& p : pages) {
    if (!IsPersonPage(p)) continue;
    ++person_pages;
    verdicts.insert(PronounMajority(p.pronoun_counts));
  }
  if (person_pages == 0) return std::nullopt;
  GenderVerdict v;
  v.source = VerdictSource::kEncyclopedia;
  if (verdicts.size() == 1) {
    v.gender = *verdicts.begin();
    v.note = v.gender ? "pronoun majority" : "pronoun tie";
  } else {
    v.note = "conflicting pages";
  }
  return v;
}

GenderVerdict ClassifyCensus(const std::vector<std::string>& tokens, const GenderNameTable& names) {
  bool male = false, female = false;
  for (const auto& t : tokens) {
    const std::string low = ToLower(StripPunct(t));
    male = male || names.male.count(low) > 0;
    female = female || names.female.count(low) > 0;
  }
  GenderVerdict v;
  if (male == female) {
    v.note = male ? "tokens in both lists" : "no token in either list";
    return v;
  }
  v.gender = male ? Gender::kMale : Gender::kFemale;
  v.source = VerdictSource::kCensus;
  v.note = "first-name list";
  return v;
}

GenderVerdict Classify(const std::vector<std::string>& tokens, LookupClient* client,
                       const GenderNameTable& names) {
  if (client) {
    if (auto v = ClassifyEncyclopedia(tokens, *client)) return *v;
  }
  return ClassifyCensus(tokens, names);
}

}  // namespace sumbias
