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

#ifndef SUMBIAS_MEASURES_H_
#define SUMBIAS_MEASURES_H_

// Word-list inclusion, entity inclusion, hallucination bias and
// distinguishability, with percentile bootstrap intervals.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sumbias/name_inventory.h"

namespace sumbias {

// group -> probability.
struct GroupDistribution {
  std::map<std::string, double> p;

  // nullopt if the counts sum to zero.
  static std::optional<GroupDistribution> FromCounts(const std::map<std::string, double>& counts);
  static GroupDistribution Uniform(const std::vector<std::string>& groups);
};

// Half the L1 distance. Groups missing from one side have probability 0.
double TotalVariation(const GroupDistribution& a, const GroupDistribution& b);

// Identifier occurrences per group: lowercase whole-token matches after
// stripping punctuation. Every group of the lists appears in the result.
class IdentifierCounter {
 public:
  explicit IdentifierCounter(const WordLists& lists);
  std::map<std::string, double> Count(const std::vector<std::string>& tokens) const;
  const std::vector<std::string>& groups() const { return groups_; }

 private:
  std::map<std::string, std::string> index_;
  std::vector<std::string> groups_;
};

std::map<std::string, double> CountIdentifiers(const std::vector<std::string>& tokens,
                                               const WordLists& lists);

// TVD between the observed identifier distribution and `reference`;
// nullopt when no identifier was observed.
std::optional<double> WordListInclusion(const std::map<std::string, double>& observed,
                                        const GroupDistribution& reference);

struct GroupInclusion {
  double included = 0;
  double total = 0;
};
using InclusionTable = std::map<std::string, GroupInclusion>;

// Largest odds ratio over ordered group pairs, minus one. `smoothing` is
// added to both included and excluded counts of every group. Groups with
// no entities are skipped; nullopt when fewer than two groups remain or an
// odds is degenerate (possible only without smoothing).
std::optional<double> EntityInclusion(const InclusionTable& table, double smoothing = 0.5);

// TVD of the classified-hallucination distribution against uniform over
// `groups`; nullopt when the counts sum to zero.
std::optional<double> HallucinationBias(const std::map<std::string, double>& counts,
                                        const std::vector<std::string>& groups = {"male",
                                                                                  "female"});

// Unit-normalized representation for cosine similarity: sparse (sorted
// ids) or dense.
struct Representation {
  std::vector<int> ids;  // empty for dense
  std::vector<double> values;
  bool dense = false;
};
double Cosine(const Representation& a, const Representation& b);

// Pronouns become they/them/themselves, titles become TITLE, and tokens
// equal to a name in `first_names` / `last_names` (lowercase) become
// FIRST_NAME / LAST_NAME.
std::vector<std::string> NeutralizeTokens(const std::vector<std::string>& tokens,
                                          const std::set<std::string>& first_names,
                                          const std::set<std::string>& last_names);

// Lowercase bag of words over a shared vocabulary; punctuation-only tokens
// are dropped.
class BagOfWords {
 public:
  Representation Encode(const std::vector<std::string>& tokens);

 private:
  std::map<std::string, int> vocab_;
};

Representation DenseRepresentation(std::vector<double> values);

struct DistinguishItem {
  std::string original;
  std::string group;
  int variant = 0;
  Representation rep;
};

struct DistinguishabilityResult {
  std::optional<double> score;
  long hits = 0;  // summaries closer to their own group
  long n = 0;
  // Per scored item (index into the input): 1 if distinguishable.
  std::vector<std::pair<size_t, int>> indicators;
  std::vector<std::string> diagnostics;
};

// For each summary, mean similarity to the other summaries of its own
// group and to those of the other groups, within the same original
// (leave-one-out). Ties are not distinguishable. Originals with fewer than
// two summaries in some group are skipped with a diagnostic. Parallel over
// originals.
DistinguishabilityResult Distinguishability(const std::vector<DistinguishItem>& items);
DistinguishabilityResult DistinguishabilitySerial(const std::vector<DistinguishItem>& items);

// Bootstrap over additive count vectors. Each unit belongs to one
// original and one assignment variant; a score is recomputed from the
// summed counts of a resample.
struct BootstrapUnit {
  std::string original;
  int variant = 0;
  std::vector<double> counts;
};
using CountScore = std::function<std::optional<double>(const std::vector<double>&)>;

enum class BootstrapAxis { kDocuments, kAssignments };
std::string_view AxisName(BootstrapAxis axis);

struct Interval {
  double lo = 0;
  double hi = 0;
  bool operator==(const Interval&) const = default;
};

struct BootstrapResult {
  std::optional<Interval> ci;
  int valid = 0;  // replicates with a defined score
};

// Linear-interpolation percentile of sorted values, q in [0, 1].
double Percentile(const std::vector<double>& sorted, double q);

// kDocuments draws originals with replacement; kAssignments keeps every
// original and draws its variants with replacement. Replicate r uses a
// seed derived from (seed, axis, r), so results do not depend on thread
// count. Throws UsageError when replicates < 2.
BootstrapResult Bootstrap(const std::vector<BootstrapUnit>& units, const CountScore& score,
                          BootstrapAxis axis, int replicates, uint64_t seed);
BootstrapResult BootstrapSerial(const std::vector<BootstrapUnit>& units, const CountScore& score,
                                BootstrapAxis axis, int replicates, uint64_t seed);

std::vector<double> SumCounts(const std::vector<BootstrapUnit>& units);

struct ScoreWithCI {
  std::string system;
  std::string measure;
  std::optional<double> point;
  std::optional<Interval> ci_d;
  std::optional<Interval> ci_s;
  int replicates = 0;
  long n = 0;
  std::vector<std::string> diagnostics;

  bool operator==(const ScoreWithCI&) const = default;
};

ScoreWithCI ScoreUnits(const std::string& system, const std::string& measure,
                       const std::vector<BootstrapUnit>& units, const CountScore& score,
                       int replicates, uint64_t seed, long n);

nlohmann::json ToJson(const ScoreWithCI& s);
ScoreWithCI ScoreFromJson(const nlohmann::json& j);

}  // namespace sumbias

#endif  // SUMBIAS_MEASURES_H_
