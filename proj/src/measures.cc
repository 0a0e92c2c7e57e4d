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

#include "sumbias/measures.h"

#include <algorithm>
#include <cmath>

#include "sumbias/errors.h"
#include "sumbias/rng.h"

namespace sumbias {

std::optional<GroupDistribution> GroupDistribution::FromCounts(
    const std::map<std::string, double>& counts) {
  double total = 0;
  for (const auto& [g, c] : counts) total += c;
  if (total <= 0) return std::nullopt;
  GroupDistribution d;
  for (const auto& [g, c] : counts) d.p[g] = c / total;
  return d;
}

GroupDistribution GroupDistribution::Uniform(const std::vector<std::string>& groups) {
  GroupDistribution d;
  for (const auto& g : groups) d.p[g] = 1.0 / static_cast<double>(groups.size());
  return d;
}

double TotalVariation(const GroupDistribution& a, const GroupDistribution& b) {
  std::set<std::string> keys;
  for (const auto& [g, v] : a.p) keys.insert(g);
  for (const auto& [g, v] : b.p) keys.insert(g);
  double sum = 0;
  for (const auto& g : keys) {
    auto ia = a.p.find(g);
    auto ib = b.p.find(g);
    sum += std::abs((ia == a.p.end() ? 0.0 : ia->second) - (ib == b.p.end() ? 0.0 : ib->second));
  }
  return 0.5 * sum;
}

IdentifierCounter::IdentifierCounter(const WordLists& lists) : index_(lists.Index()) {
  for (const auto& [g, words] : lists.groups) groups_.push_back(g);
}

std::map<std::string, double> IdentifierCounter::Count(
    const std::vector<std::string>& tokens) const {
  std::map<std::string, double> out;
  for (const auto& g : groups_) out[g] = 0;
  for (const auto& t : tokens) {
    auto it = index_.find(ToLower(StripPunct(t)));
    if (it != index_.end()) out[it->second] += 1;
  }
  return out;
}

std::map<std::string, double> CountIdentifiers(const std::vector<std::string>& tokens,
                                               const WordLists& lists) {
  return IdentifierCounter(lists).Count(tokens);
}

std::optional<double> WordListInclusion(const std::map<std::string, double>& observed,
                                        const GroupDistribution& reference) {
  auto obs = GroupDistribution::FromCounts(observed);
  if (!obs) return std::nullopt;
  return TotalVariation(*obs, reference);
}

std::optional<double> EntityInclusion(const InclusionTable& table, double smoothing) {
  std::vector<double> odds;
  for (const auto& [g, row] : table) {
    if (row.total <= 0) continue;
    const double inc = row.included + smoothing;
    const double exc = row.total - row.included + smoothing;
    if (exc <= 0 || inc <= 0) return std::nullopt;
    odds.push_back(inc / exc);
  }
  if (odds.size() < 2) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(odds.begin(), odds.end());
  return *hi / *lo - 1.0;
}

std::optional<double> HallucinationBias(const std::map<std::string, double>& counts,
                                        const std::vector<std::string>& groups) {
  std::map<std::string, double> restricted;
  for (const auto& g : groups) {
    auto it = counts.find(g);
    restricted[g] = it == counts.end() ? 0.0 : it->second;
  }
  auto obs = GroupDistribution::FromCounts(restricted);
  if (!obs) return std::nullopt;
  return TotalVariation(*obs, GroupDistribution::Uniform(groups));
}

double Cosine(const Representation& a, const Representation& b) {
  double dot = 0, na = 0, nb = 0;
  for (double v : a.values) na += v * v;
  for (double v : b.values) nb += v * v;
  if (na == 0 || nb == 0) return 0;
  if (a.dense != b.dense) throw UsageError("cannot compare dense and sparse representations");
  if (a.dense) {
    if (a.values.size() != b.values.size()) throw DataError("dense vectors differ in dimension");
    for (size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  } else {
    size_t i = 0, j = 0;
    while (i < a.ids.size() && j < b.ids.size()) {
      if (a.ids[i] == b.ids[j]) {
        dot += a.values[i++] * b.values[j++];
      } else if (a.ids[i] < b.ids[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  return dot / std::sqrt(na * nb);
}

std::vector<std::string> NeutralizeTokens(const std::vector<std::string>& tokens,
                                          const std::set<std::string>& first_names,
                                          const std::set<std::string>& last_names) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const std::string low = ToLower(t);
    if (low == "he" || low == "she") {
      out.push_back("they");
    } else if (low == "him" || low == "her" || low == "his" || low == "hers") {
      out.push_back("them");
    } else if (low == "himself" || low == "herself") {
      out.push_back("themselves");
    } else if (IsTitle(t)) {
      out.push_back("TITLE");
    } else if (first_names.count(low)) {
      out.push_back("FIRST_NAME");
    } else if (last_names.count(low)) {
      out.push_back("LAST_NAME");
    } else {
      out.push_back(t);
    }
  }
  return out;
}

Representation BagOfWords::Encode(const std::vector<std::string>& tokens) {
  std::map<int, double> counts;
  for (const auto& t : tokens) {
    if (StripPunct(t).empty()) continue;
    const std::string key = t == "FIRST_NAME" || t == "LAST_NAME" || t == "TITLE" ? t : ToLower(t);
    auto [it, fresh] = vocab_.try_emplace(key, static_cast<int>(vocab_.size()));
    counts[it->second] += 1;
  }
  Representation r;
  for (const auto& [id, c] : counts) {
    r.ids.push_back(id);
    r.values.push_back(c);
  }
  return r;
}

Representation DenseRepresentation(std::vector<double> values) {
  Representation r;
  r.dense = true;
  r.values = std::move(values);
  return r;
}

namespace {

struct OriginalOutcome {
  std::vector<std::pair<size_t, int>> indicators;
  std::string diagnostic;
};

OriginalOutcome ScoreOriginal(const std::vector<DistinguishItem>& items,
                              const std::vector<size_t>& members) {
  OriginalOutcome out;
  std::map<std::string, int> group_size;
  for (size_t m : members) ++group_size[items[m].group];
  if (group_size.size() < 2) {
    out.diagnostic = items[members[0]].original + ": only one group";
    return out;
  }
  for (const auto& [g, c] : group_size) {
    if (c < 2) {
      out.diagnostic = items[members[0]].original + ": fewer than two summaries for " + g;
      return out;
    }
  }
  const size_t k = members.size();
  std::vector<double> sim(k * k, 0.0);
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      sim[a * k + b] = sim[b * k + a] = Cosine(items[members[a]].rep, items[members[b]].rep);
    }
  }
  for (size_t a = 0; a < k; ++a) {
    double same = 0, other = 0;
    int n_same = 0, n_other = 0;
    for (size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      if (items[members[a]].group == items[members[b]].group) {
        same += sim[a * k + b];
        ++n_same;
      } else {
        other += sim[a * k + b];
        ++n_other;
      }
    }
    const double u = same / n_same;
    const double u_bar = other / n_other;
    out.indicators.push_back({members[a], u > u_bar ? 1 : 0});
  }
  return out;
}

std::map<std::string, std::vector<size_t>> GroupByOriginal(
    const std::vector<DistinguishItem>& items) {
  std::map<std::string, std::vector<size_t>> out;
  for (size_t i = 0; i < items.size(); ++i) out[items[i].original].push_back(i);
  return out;
}

DistinguishabilityResult Collect(std::vector<OriginalOutcome>& outcomes) {
  DistinguishabilityResult r;
  for (auto& o : outcomes) {
    if (!o.diagnostic.empty()) r.diagnostics.push_back(o.diagnostic);
    for (const auto& ind : o.indicators) {
      r.hits += ind.second;
      ++r.n;
      r.indicators.push_back(ind);
    }
  }
  if (r.n > 0) r.score = 2.0 * static_cast<double>(r.hits) / static_cast<double>(r.n) - 1.0;
  return r;
}

}  // namespace

DistinguishabilityResult Distinguishability(const std::vector<DistinguishItem>& items) {
  const auto by_original = GroupByOriginal(items);
  std::vector<const std::vector<size_t>*> groups;
  for (const auto& [o, members] : by_original) groups.push_back(&members);
  std::vector<OriginalOutcome> outcomes(groups.size());
  const long n = static_cast<long>(groups.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) outcomes[i] = ScoreOriginal(items, *groups[i]);
  return Collect(outcomes);
}

DistinguishabilityResult DistinguishabilitySerial(const std::vector<DistinguishItem>& items) {
  std::vector<OriginalOutcome> outcomes;
  for (const auto& [o, members] : GroupByOriginal(items)) {
    outcomes.push_back(ScoreOriginal(items, members));
  }
  return Collect(outcomes);
}

std::string_view AxisName(BootstrapAxis axis) {
  return axis == BootstrapAxis::kDocuments ? "d" : "s";
}

double Percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw UsageError("percentile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> SumCounts(const std::vector<BootstrapUnit>& units) {
  std::vector<double> total;
  for (const auto& u : units) {
    if (total.size() < u.counts.size()) total.resize(u.counts.size(), 0.0);
    for (size_t k = 0; k < u.counts.size(); ++k) total[k] += u.counts[k];
  }
  return total;
}

namespace {

// Counts summed per (original, variant), grouped by original.
struct Cells {
  size_t width = 0;
  std::vector<std::vector<std::vector<double>>> by_original;  // [original][variant slot]
  std::vector<std::vector<double>> original_totals;
};

Cells BuildCells(const std::vector<BootstrapUnit>& units) {
  std::map<std::string, std::map<int, std::vector<double>>> grouped;
  Cells cells;
  for (const auto& u : units) cells.width = std::max(cells.width, u.counts.size());
  for (const auto& u : units) {
    auto& cell = grouped[u.original][u.variant];
    cell.resize(cells.width, 0.0);
    for (size_t k = 0; k < u.counts.size(); ++k) cell[k] += u.counts[k];
  }
  for (auto& [o, variants] : grouped) {
    std::vector<std::vector<double>> slots;
    std::vector<double> total(cells.width, 0.0);
    for (auto& [v, c] : variants) {
      for (size_t k = 0; k < cells.width; ++k) total[k] += c[k];
      slots.push_back(std::move(c));
    }
    cells.by_original.push_back(std::move(slots));
    cells.original_totals.push_back(std::move(total));
  }
  return cells;
}

std::optional<double> Replicate(const Cells& cells, const CountScore& score, BootstrapAxis axis,
                                uint64_t seed, int r) {
  Rng rng(DeriveSeed(seed, "bootstrap", AxisName(axis), static_cast<uint64_t>(r)));
  std::vector<double> sum(cells.width, 0.0);
  const size_t n_orig = cells.by_original.size();
  if (axis == BootstrapAxis::kDocuments) {
    for (size_t i = 0; i < n_orig; ++i) {
      const auto& t = cells.original_totals[rng.UniformIndex(n_orig)];
      for (size_t k = 0; k < cells.width; ++k) sum[k] += t[k];
    }
  } else {
    for (const auto& slots : cells.by_original) {
      for (size_t i = 0; i < slots.size(); ++i) {
        const auto& c = slots[rng.UniformIndex(slots.size())];
        for (size_t k = 0; k < cells.width; ++k) sum[k] += c[k];
      }
    }
  }
  return score(sum);
}

BootstrapResult Summarize(const std::vector<std::optional<double>>& values) {
  std::vector<double> finite;
  for (const auto& v : values) {
    if (v && std::isfinite(*v)) finite.push_back(*v);
  }
  BootstrapResult out;
  out.valid = static_cast<int>(finite.size());
  if (finite.empty()) return out;
  std::sort(finite.begin(), finite.end());
  out.ci = Interval{Percentile(finite, 0.025), Percentile(finite, 0.975)};
  return out;
}

void CheckReplicates(int replicates) {
  if (replicates < 2) {
    throw UsageError("bootstrap needs at least 2 replicates, got " + std::to_string(replicates));
  }
}

}  // namespace

BootstrapResult Bootstrap(const std::vector<BootstrapUnit>& units, const CountScore& score,
                          BootstrapAxis axis, int replicates, uint64_t seed) {
  CheckReplicates(replicates);
  if (units.empty()) return {};
  const Cells cells = BuildCells(units);
  std::vector<std::optional<double>> values(replicates);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) values[r] = Replicate(cells, score, axis, seed, r);
  return Summarize(values);
}

BootstrapResult BootstrapSerial(const std::vector<BootstrapUnit>& units, const CountScore& score,
                                BootstrapAxis axis, int replicates, uint64_t seed) {
  CheckReplicates(replicates);
  if (units.empty()) return {};
  const Cells cells = BuildCells(units);
  std::vector<std::optional<double>> values(replicates);
  for (int r = 0; r < replicates; ++r) values[r] = Replicate(cells, score, axis, seed, r);
  return Summarize(values);
}

ScoreWithCI ScoreUnits(const std::string& system, const std::string& measure,
                       const std::vector<BootstrapUnit>& units, const CountScore& score,
                       int replicates, uint64_t seed, long n) {
  ScoreWithCI s;
  s.system = system;
  s.measure = measure;
  s.replicates = replicates;
  s.n = n;
  if (units.empty()) {
    s.diagnostics.push_back("no data");
    return s;
  }
  s.point = score(SumCounts(units));
  if (!s.point) s.diagnostics.push_back("score undefined on the full sample");
  const uint64_t base = DeriveSeed(seed, "score", system + "/" + measure);
  for (BootstrapAxis axis : {BootstrapAxis::kDocuments, BootstrapAxis::kAssignments}) {
    const BootstrapResult b = Bootstrap(units, score, axis, replicates, base);
    (axis == BootstrapAxis::kDocuments ? s.ci_d : s.ci_s) = b.ci;
    if (b.valid < replicates) {
      s.diagnostics.push_back(std::to_string(replicates - b.valid) + " of " +
                              std::to_string(replicates) + " " + std::string(AxisName(axis)) +
                              "-resamples had no defined score");
    }
  }
  return s;
}

namespace {

nlohmann::json IntervalJson(const std::optional<Interval>& ci) {
  if (!ci) return nullptr;
  return nlohmann::json::array({ci->lo, ci->hi});
}

std::optional<Interval> IntervalFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return Interval{j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

nlohmann::json ToJson(const ScoreWithCI& s) {
  nlohmann::json j{{"system", s.system}, {"measure", s.measure}};
  j["point"] = s.point ? nlohmann::json(*s.point) : nlohmann::json();
  j["ci_d"] = IntervalJson(s.ci_d);
  j["ci_s"] = IntervalJson(s.ci_s);
  j["replicates"] = s.replicates;
  j["n"] = s.n;
  j["diagnostics"] = s.diagnostics;
  return j;
}

ScoreWithCI ScoreFromJson(const nlohmann::json& j) {
  ScoreWithCI s;
  s.system = j.at("system").get<std::string>();
  s.measure = j.at("measure").get<std::string>();
  if (!j.at("point").is_null()) s.point = j["point"].get<double>();
  s.ci_d = IntervalFromJson(j.at("ci_d"));
  s.ci_s = IntervalFromJson(j.at("ci_s"));
  s.replicates = j.value("replicates", 0);
  s.n = j.value("n", 0L);
  s.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return s;
}

}  // namespace sumbias
