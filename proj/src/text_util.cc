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

#include "sumbias/text_util.h"

#include <cctype>

namespace sumbias {

std::string_view GenderName(Gender g) {
  return g == Gender::kMale ? "male" : "female";
}

std::optional<Gender> ParseGender(std::string_view text) {
  if (text == "male" || text == "m") return Gender::kMale;
  if (text == "female" || text == "f") return Gender::kFemale;
  return std::nullopt;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsCapitalized(std::string_view token) {
  return !token.empty() && std::isupper(static_cast<unsigned char>(token[0]));
}

bool IsAllCaps(std::string_view token) {
  int letters = 0;
  for (unsigned char c : token) {
    if (std::isalpha(c)) {
      if (!std::isupper(c)) return false;
      ++letters;
    }
  }
  return letters >= 2;
}

std::string TitleCase(std::string_view text) {
  std::string out = ToLower(text);
  bool start = true;
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (start && std::isalpha(u)) c = static_cast<char>(std::toupper(u));
    start = (c == ' ' || c == '-' || c == '\'');
  }
  return out;
}

std::string MatchCase(std::string_view replacement, std::string_view original) {
  if (IsAllCaps(original)) {
    std::string out(replacement);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  std::string out = ToLower(replacement);
  if (IsCapitalized(original) && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::optional<Gender> TitleGender(std::string_view token) {
  const std::string t = ToLower(token);
  if (t == "mr." || t == "sir") return Gender::kMale;
  if (t == "mrs." || t == "ms." || t == "lady") return Gender::kFemale;
  return std::nullopt;
}

bool IsTitle(std::string_view token) { return TitleGender(token).has_value(); }

bool IsFemaleTitle(std::string_view token) {
  return TitleGender(token) == Gender::kFemale;
}

std::optional<Gender> PronounGender(std::string_view token) {
  const std::string t = ToLower(token);
  if (t == "he" || t == "him" || t == "his" || t == "himself") return Gender::kMale;
  if (t == "she" || t == "her" || t == "hers" || t == "herself") return Gender::kFemale;
  return std::nullopt;
}

bool IsGenderedPronoun(std::string_view token) {
  return PronounGender(token).has_value();
}

std::string StripPunct(std::string_view token) {
  size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1]))) --e;
  return std::string(token.substr(b, e - b));
}

}  // namespace sumbias
