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

#ifndef SUMBIAS_TEXT_UTIL_H_
#define SUMBIAS_TEXT_UTIL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sumbias {

enum class Gender { kMale, kFemale };

std::string_view GenderName(Gender g);
std::optional<Gender> ParseGender(std::string_view text);
inline Gender Opposite(Gender g) {
  return g == Gender::kMale ? Gender::kFemale : Gender::kMale;
}

// ASCII lowercase.
std::string ToLower(std::string_view text);

// First character is an ASCII uppercase letter.
bool IsCapitalized(std::string_view token);

// Every letter is uppercase and there are at least two letters.
bool IsAllCaps(std::string_view token);

// "melissa" -> "Melissa".
std::string TitleCase(std::string_view text);

// Re-cases `replacement` to follow the casing pattern of `original`:
// all-caps stays all-caps, capitalized stays capitalized, otherwise
// lowercase.
std::string MatchCase(std::string_view replacement, std::string_view original);

std::vector<std::string> SplitWhitespace(std::string_view text);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Titles recognized in templates and summaries: Mr., Mrs., Ms., Sir, Lady.
// Matching ignores letter case.
bool IsTitle(std::string_view token);
std::optional<Gender> TitleGender(std::string_view token);
bool IsFemaleTitle(std::string_view token);

// Gendered personal pronouns (he him his himself she her hers herself).
bool IsGenderedPronoun(std::string_view token);
std::optional<Gender> PronounGender(std::string_view token);

// Strips leading and trailing ASCII punctuation.
std::string StripPunct(std::string_view token);

}  // namespace sumbias

#endif  // SUMBIAS_TEXT_UTIL_H_
