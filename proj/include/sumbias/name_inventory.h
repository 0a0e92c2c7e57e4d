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

#ifndef SUMBIAS_NAME_INVENTORY_H_
#define SUMBIAS_NAME_INVENTORY_H_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sumbias/rng.h"
#include "sumbias/text_util.h"

namespace sumbias {

// First-name frequencies per gender. Keys are lowercase.
struct GenderNameTable {
  std::map<std::string, double> male;
  std::map<std::string, double> female;

  const std::map<std::string, double>& For(Gender g) const {
    return g == Gender::kMale ? male : female;
  }
  // Names of one gender, most frequent first (ties by name).
  std::vector<std::string> Names(Gender g) const;
  std::vector<double> Frequencies(Gender g) const;  // parallel to Names(g)
};

// Parses one census file: "NAME FREQ RANK" or the original
// "NAME FREQ CUMFREQ RANK" rows. Throws LoadError naming the row.
std::map<std::string, double> ParseCensus(std::istream& in, const std::string& source);
GenderNameTable LoadCensus(const std::string& male_path, const std::string& female_path);

// Names listed under both genders go to the more frequent gender when its
// frequency is at least twice the other; otherwise they are dropped.
GenderNameTable ResolveAmbiguous(const GenderNameTable& table);

struct GroupNames {
  std::vector<std::string> male_first;
  std::vector<std::string> female_first;
  std::vector<std::string> last;

  const std::vector<std::string>& First(Gender g) const {
    return g == Gender::kMale ? male_first : female_first;
  }
};

// Race-coded name dictionary, BBQ vocabulary style.
struct RaceNameTable {
  std::map<std::string, GroupNames> groups;
};

// JSON array of {"group", "gender" (null for last names), "part":
// "first"|"last", "name"}.
RaceNameTable LoadRaceNames(const std::string& path);

// Group -> identifier words. Lowercase; the male and female lists are
// disjoint.
struct WordLists {
  std::map<std::string, std::vector<std::string>> groups;

  // word -> group, for counting.
  std::map<std::string, std::string> Index() const;
};

// The HELM gender identifier lists (20 words per gender, including the
// "femen" entry as published).
WordLists HelmWordLists();
// Topic keywords: "sport" and "family".
WordLists TopicWordLists();

WordLists LoadWordLists(const std::string& path);

// Positional male/female pairs ("father" <-> "mother") keyed by each word,
// mapped to the shared marker "father/mother".
std::map<std::string, std::string> IdentifierPairMarkers(const WordLists& lists);

enum class SamplingMode { kUniform, kFrequencyWeighted };

// One name from `names` (uniform, or proportional to `weights` when
// weighted). Throws SamplingError on an empty list.
std::string SampleName(const std::vector<std::string>& names, Rng& rng,
                       SamplingMode mode = SamplingMode::kUniform,
                       const std::vector<double>& weights = {});

// `k` distinct names not in `exclude`, in draw order. Throws SamplingError
// when fewer than `k` eligible names exist.
std::vector<std::string> SampleDistinctNames(const std::vector<std::string>& names, size_t k,
                                             Rng& rng, const std::set<std::string>& exclude = {},
                                             SamplingMode mode = SamplingMode::kUniform,
                                             const std::vector<double>& weights = {});

}  // namespace sumbias

#endif  // SUMBIAS_NAME_INVENTORY_H_
