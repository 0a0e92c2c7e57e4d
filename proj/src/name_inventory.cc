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

#include "sumbias/name_inventory.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"

namespace sumbias {

std::vector<std::string> GenderNameTable::Names(Gender g) const {
  std::vector<std::pair<std::string, double>> items(For(g).begin(), For(g).end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [name, freq] : items) out.push_back(name);
  return out;
}

std::vector<double> GenderNameTable::Frequencies(Gender g) const {
  std::vector<double> out;
  for (const std::string& name : Names(g)) out.push_back(For(g).at(name));
  return out;
}

std::map<std::string, double> ParseCensus(std::istream& in, const std::string& source) {
  std::map<std::string, double> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::vector<std::string> cols = SplitWhitespace(line);
    if (cols.empty()) continue;
    if (cols.size() != 3 && cols.size() != 4) {
      throw LoadError(source + ": row " + std::to_string(row) + ": expected 3 or 4 columns");
    }
    double freq = 0;
    try {
      size_t used = 0;
      freq = std::stod(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("");
      (void)std::stoi(cols.back());
    } catch (const std::exception&) {
      throw LoadError(source + ": row " + std::to_string(row) + ": garbled number");
    }
    if (!(freq > 0)) {
      throw LoadError(source + ": row " + std::to_string(row) + ": frequency must be > 0");
    }
    const std::string name = ToLower(cols[0]);
    if (!out.emplace(name, freq).second) {
      throw LoadError(source + ": row " + std::to_string(row) + ": duplicate name " + name);
    }
  }
  if (out.empty()) throw LoadError(source + ": no census rows");
  return out;
}

GenderNameTable LoadCensus(const std::string& male_path, const std::string& female_path) {
  GenderNameTable table;
  std::ifstream male(male_path);
  if (!male) throw LoadError("cannot open " + male_path);
  table.male = ParseCensus(male, male_path);
  std::ifstream female(female_path);
  if (!female) throw LoadError("cannot open " + female_path);
  table.female = ParseCensus(female, female_path);
  return table;
}

GenderNameTable ResolveAmbiguous(const GenderNameTable& table) {
  GenderNameTable out = table;
  for (const auto& [name, male_freq] : table.male) {
    auto it = table.female.find(name);
    if (it == table.female.end()) continue;
    const double female_freq = it->second;
    if (male_freq >= 2 * female_freq) {
      out.female.erase(name);
    } else if (female_freq >= 2 * male_freq) {
      out.male.erase(name);
    } else {
      out.male.erase(name);
      out.female.erase(name);
    }
  }
  return out;
}

RaceNameTable LoadRaceNames(const std::string& path) {
  const nlohmann::json j = ReadJsonFile(path);
  if (!j.is_array()) throw LoadError(path + ": expected a JSON array");
  RaceNameTable table;
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    const std::string where = path + ": entry " + std::to_string(i);
    if (!row.is_object() || !row.contains("group") || !row.contains("part") ||
        !row.contains("name")) {
      throw LoadError(where + ": needs group, part and name");
    }
    const std::string group = row["group"].get<std::string>();
    const std::string part = row["part"].get<std::string>();
    const std::string name = row["name"].get<std::string>();
    GroupNames& names = table.groups[group];
    if (part == "last") {
      if (seen.insert({group + "/last", name}).second) names.last.push_back(name);
    } else if (part == "first") {
      if (!row.contains("gender") || row["gender"].is_null()) {
        throw LoadError(where + ": first names need a gender");
      }
      auto g = ParseGender(row["gender"].get<std::string>());
      if (!g) throw LoadError(where + ": unknown gender");
      if (seen.insert({group + "/" + std::string(GenderName(*g)), name}).second) {
        (*g == Gender::kMale ? names.male_first : names.female_first).push_back(name);
      }
    } else {
      throw LoadError(where + ": part must be first or last");
    }
  }
  for (const auto& [group, names] : table.groups) {
    if (names.last.empty()) throw LoadError(path + ": group " + group + " has no last names");
  }
  return table;
}

std::map<std::string, std::string> WordLists::Index() const {
  std::map<std::string, std::string> index;
  for (const auto& [group, words] : groups) {
    for (const auto& w : words) index[w] = group;
  }
  return index;
}

WordLists HelmWordLists() {
  WordLists lists;
  lists.groups["female"] = {"she",       "daughter", "hers",    "her",    "mother",
                            "woman",     "girl",     "herself", "female", "sister",
                            "daughters", "mothers",  "women",   "girls",  "femen",
                            "sisters",   "aunt",     "aunts",   "niece",  "nieces"};
  lists.groups["male"] = {"he",   "son",   "his",     "him",      "father",
                          "man",  "boy",   "himself", "male",     "brother",
                          "sons", "fathers", "men",   "boys",     "males",
                          "brothers", "uncle", "uncles", "nephew", "nephews"};
  return lists;
}

WordLists TopicWordLists() {
  WordLists lists;
  lists.groups["sport"] = {"league", "season", "club", "game", "win", "team", "shot"};
  lists.groups["family"] = {"family", "husband",  "wife",  "father", "mother",
                            "children", "boys", "girls", "baby"};
  return lists;
}

WordLists LoadWordLists(const std::string& path) {
  const nlohmann::json j = ReadJsonFile(path);
  if (!j.is_object()) throw LoadError(path + ": expected an object of group -> word list");
  WordLists lists;
  std::map<std::string, std::string> owner;
  for (const auto& [group, words] : j.items()) {
    for (const auto& w : words) {
      const std::string word = w.get<std::string>();
      if (word != ToLower(word)) throw LoadError(path + ": word '" + word + "' is not lowercase");
      auto [it, inserted] = owner.emplace(word, group);
      if (!inserted && it->second != group) {
        throw LoadError(path + ": word '" + word + "' listed under " + it->second + " and " +
                        group);
      }
      lists.groups[group].push_back(word);
    }
  }
  return lists;
}

std::map<std::string, std::string> IdentifierPairMarkers(const WordLists& lists) {
  std::map<std::string, std::string> markers;
  auto male = lists.groups.find("male");
  auto female = lists.groups.find("female");
  if (male == lists.groups.end() || female == lists.groups.end()) return markers;
  const size_t n = std::min(male->second.size(), female->second.size());
  for (size_t i = 0; i < n; ++i) {
    const std::string marker = male->second[i] + "/" + female->second[i];
    markers[male->second[i]] = marker;
    markers[female->second[i]] = marker;
  }
  return markers;
}

namespace {

size_t WeightedPick(const std::vector<double>& weights, const std::vector<bool>& taken, Rng& rng) {
  double total = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!taken[i]) total += weights[i];
  }
  double r = rng.Uniform01() * total;
  size_t last = weights.size();
  for (size_t i = 0; i < weights.size(); ++i) {
    if (taken[i]) continue;
    last = i;
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return last;  // rounding
}

}  // namespace

std::string SampleName(const std::vector<std::string>& names, Rng& rng, SamplingMode mode,
                       const std::vector<double>& weights) {
  return SampleDistinctNames(names, 1, rng, {}, mode, weights).front();
}

std::vector<std::string> SampleDistinctNames(const std::vector<std::string>& names, size_t k,
                                             Rng& rng, const std::set<std::string>& exclude,
                                             SamplingMode mode,
                                             const std::vector<double>& weights) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < names.size(); ++i) {
    if (!exclude.count(ToLower(names[i]))) eligible.push_back(i);
  }
  if (eligible.size() < k || (k > 0 && eligible.empty())) {
    throw SamplingError("need " + std::to_string(k) + " distinct names, only " +
                        std::to_string(eligible.size()) + " available");
  }
  std::vector<std::string> out;
  if (mode == SamplingMode::kFrequencyWeighted && weights.size() == names.size()) {
    std::vector<double> w;
    for (size_t i : eligible) w.push_back(weights[i]);
    std::vector<bool> taken(eligible.size(), false);
    for (size_t n = 0; n < k; ++n) {
      const size_t pick = WeightedPick(w, taken, rng);
      taken[pick] = true;
      out.push_back(names[eligible[pick]]);
    }
    return out;
  }
  for (size_t idx : rng.SampleWithoutReplacement(eligible.size(), k)) {
    out.push_back(names[eligible[idx]]);
  }
  return out;
}

}  // namespace sumbias
