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

#include "sumbias/perturbation.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "sumbias/errors.h"

namespace sumbias {

std::string AssignmentScheme::Name() const {
  switch (kind) {
    case SchemeKind::kGenderLocal: return "gender_local";
    case SchemeKind::kGenderGlobal: return "gender_global";
    case SchemeKind::kRaceRandomGender: return "race_random_gender";
    case SchemeKind::kRaceIntersectional: {
      std::string out = "race_intersectional:";
      bool first = true;
      for (const auto& [race, g] : intersection) {
        if (!first) out += ",";
        out += race + "=" + std::string(GenderName(g));
        first = false;
      }
      return out;
    }
  }
  return "";
}

AssignmentScheme ParseScheme(const std::string& text) {
  AssignmentScheme s;
  const size_t colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "gender_local") {
    s.kind = SchemeKind::kGenderLocal;
  } else if (kind == "gender_global") {
    s.kind = SchemeKind::kGenderGlobal;
  } else if (kind == "race_random_gender") {
    s.kind = SchemeKind::kRaceRandomGender;
  } else if (kind == "race_intersectional") {
    s.kind = SchemeKind::kRaceIntersectional;
    if (colon == std::string::npos) {
      throw UsageError("race_intersectional needs a mapping, e.g. "
                       "race_intersectional:black=male,white=female");
    }
    for (const std::string& item : SplitWhitespace([&] {
           std::string rest = text.substr(colon + 1);
           std::replace(rest.begin(), rest.end(), ',', ' ');
           return rest;
         }())) {
      const size_t eq = item.find('=');
      auto g = eq == std::string::npos ? std::nullopt : ParseGender(item.substr(eq + 1));
      if (!g) throw UsageError("bad intersection entry '" + item + "'");
      s.intersection[item.substr(0, eq)] = *g;
    }
  } else {
    throw UsageError("unknown scheme '" + text + "'");
  }
  if (s.kind != SchemeKind::kRaceIntersectional && colon != std::string::npos) {
    throw UsageError("scheme '" + kind + "' takes no mapping");
  }
  return s;
}

std::string MapPronoun(const std::string& original, const std::string& pos, Gender target) {
  const std::string low = ToLower(original);
  const auto source = PronounGender(low);
  if (!source) throw RenderError("not a gendered pronoun: '" + original + "'");
  if (*source == target) return original;
  std::string mapped;
  if (target == Gender::kFemale) {
    if (low == "he") mapped = "she";
    else if (low == "him") mapped = "her";
    else if (low == "himself") mapped = "herself";
    else if (low == "his" && pos == "PRP$") mapped = "her";
    else if (low == "his" && pos == "PRP") mapped = "hers";
  } else {
    if (low == "she") mapped = "he";
    else if (low == "hers") mapped = "his";
    else if (low == "herself") mapped = "himself";
    else if (low == "her" && pos == "PRP$") mapped = "his";
    else if (low == "her" && pos == "PRP") mapped = "him";
  }
  if (mapped.empty()) {
    throw RenderError("cannot map pronoun '" + original + "' with POS '" + pos + "'");
  }
  return MatchCase(mapped, original);
}

std::string MapTitle(const std::string& original, Gender target,
                     const std::optional<std::string>& female_title) {
  const auto source = TitleGender(original);
  if (!source) throw RenderError("not a title: '" + original + "'");
  if (*source == target) return original;
  const std::string low = ToLower(original);
  std::string mapped;
  if (target == Gender::kMale) {
    mapped = low == "lady" ? "Sir" : "Mr.";
  } else {
    mapped = low == "sir" ? "Lady" : female_title.value_or("Ms.");
  }
  return MatchCase(mapped, original);
}

namespace {

std::string CaseLike(const std::string& name, const std::string& original) {
  if (IsAllCaps(original)) return MatchCase(name, original);
  return name;
}

struct Span {
  int start;
  int end;
  const SlotHole* hole = nullptr;
  const EntityTemplate* entity = nullptr;
  const ContentWordSpan* content = nullptr;
};

}  // namespace

RenderedDocument Render(const DocumentTemplate& tpl,
                        const std::vector<EntityAssignment>& assignments) {
  std::map<std::string, const EntityAssignment*> by_entity;
  for (const auto& a : assignments) by_entity[a.entity] = &a;
  std::map<std::string, const EntityTemplate*> entity_by_id;
  for (const auto& e : tpl.entities) entity_by_id[e.id] = &e;

  std::vector<Span> spans;
  for (const auto& e : tpl.entities) {
    for (const auto& s : e.slots) {
      for (const auto& h : s.holes) spans.push_back({h.start, h.end, &h, &e, nullptr});
    }
  }
  for (const auto& c : tpl.content_spans) spans.push_back({c.start, c.end, nullptr, nullptr, &c});
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.start < b.start; });

  RenderedDocument out;
  const int n = static_cast<int>(tpl.tokens.size());
  out.begin.assign(n, 0);
  out.end.assign(n, 0);
  auto original = [&](int s, int e) {
    return std::vector<std::string>(tpl.tokens.begin() + s, tpl.tokens.begin() + e + 1);
  };

  size_t next = 0;
  for (int i = 0; i < n;) {
    if (next < spans.size() && spans[next].start == i) {
      const Span& sp = spans[next++];
      std::vector<std::string> produced;
      if (sp.hole) {
        auto it = by_entity.find(sp.entity->id);
        const std::string& orig = tpl.tokens[sp.start];
        if (it == by_entity.end()) {
          produced = original(sp.start, sp.end);
        } else {
          const EntityAssignment& a = *it->second;
          switch (sp.hole->kind) {
            case HoleKind::kFirst:
              produced = {a.first.empty() ? orig : CaseLike(a.first, orig)};
              break;
            case HoleKind::kLast:
              produced = {a.last.empty() ? orig : CaseLike(a.last, orig)};
              break;
            case HoleKind::kFull:
              for (const auto& t : SplitWhitespace(a.first.empty() ? orig : a.first)) {
                produced.push_back(CaseLike(t, orig));
              }
              for (const auto& t : SplitWhitespace(a.last.empty() ? tpl.tokens[sp.end] : a.last)) {
                produced.push_back(CaseLike(t, tpl.tokens[sp.end]));
              }
              break;
            case HoleKind::kPronoun:
              produced = {MapPronoun(orig, sp.hole->pos, a.gender)};
              break;
            case HoleKind::kTitle:
              produced = {MapTitle(orig, a.gender, sp.entity->female_title)};
              break;
          }
        }
      } else {
        const ContentWordSpan& c = *sp.content;
        std::optional<Gender> shared;
        bool known = true, mixed = false;
        for (const auto& id : c.entities) {
          std::optional<Gender> g;
          if (auto it = by_entity.find(id); it != by_entity.end()) {
            g = it->second->gender;
          } else if (auto et = entity_by_id.find(id); et != entity_by_id.end()) {
            g = et->second->original_gender;
          }
          if (!g) {
            known = false;
            break;
          }
          if (shared && *shared != *g) mixed = true;
          shared = g;
        }
        if (!known) {
          produced = original(c.start, c.end);
        } else {
          const std::string& variant = mixed ? c.neutral_variant
                                       : *shared == Gender::kMale ? c.male_variant
                                                                  : c.female_variant;
          produced = SplitWhitespace(variant);
          const std::string& orig = tpl.tokens[c.start];
          if (!produced.empty()) {
            if (IsAllCaps(orig)) {
              for (auto& t : produced) t = MatchCase(t, orig);
            } else if (IsCapitalized(orig)) {
              produced[0][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(produced[0][0])));
            }
          }
        }
      }
      const int first = static_cast<int>(out.tokens.size());
      for (auto& t : produced) {
        out.tokens.push_back(std::move(t));
        out.sentence.push_back(tpl.sentence[sp.start]);
      }
      const int last = std::max(first, static_cast<int>(out.tokens.size()) - 1);
      for (int k = sp.start; k <= sp.end; ++k) {
        out.begin[k] = first;
        out.end[k] = last;
      }
      i = sp.end + 1;
      continue;
    }
    out.begin[i] = out.end[i] = static_cast<int>(out.tokens.size());
    out.tokens.push_back(tpl.tokens[i]);
    out.sentence.push_back(tpl.sentence[i]);
    ++i;
  }
  return out;
}

std::vector<EntityAssignment> IdentityAssignments(const DocumentTemplate& tpl) {
  std::vector<EntityAssignment> out;
  for (const auto& e : tpl.entities) {
    if (!e.original_gender) continue;
    out.push_back({e.id, std::string(GenderName(*e.original_gender)), *e.original_gender,
                   e.inferred_first.value_or(""), e.inferred_last.value_or("")});
  }
  return out;
}

namespace {

std::vector<int> GenderedIndices(const DocumentTemplate& tpl) {
  std::vector<int> out;
  for (size_t i = 0; i < tpl.entities.size(); ++i) {
    if (tpl.entities[i].is_gendered) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::set<std::string> OriginalNames(const DocumentTemplate& tpl, bool first) {
  std::set<std::string> out;
  for (const auto& e : tpl.entities) {
    const auto& name = first ? e.inferred_first : e.inferred_last;
    if (name) out.insert(ToLower(*name));
  }
  return out;
}

size_t CountEligible(const std::vector<std::string>& names, const std::set<std::string>& exclude) {
  return std::count_if(names.begin(), names.end(),
                       [&](const std::string& n) { return !exclude.count(ToLower(n)); });
}

std::vector<std::string> RaceGroups(const NameInventory& inv) {
  std::vector<std::string> out;
  for (const auto& [group, names] : inv.race.groups) out.push_back(group);
  return out;
}

// Splits `order` into two halves labelled 0 and 1; an odd leftover gets a
// coin flip.
std::vector<int> BalancedLabels(const std::vector<int>& gendered, Rng& rng) {
  std::vector<int> order(gendered.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  const size_t half = order.size() / 2;
  std::vector<int> label(order.size(), 0);
  for (size_t k = half; k < 2 * half; ++k) label[order[k]] = 1;
  if (order.size() % 2 == 1) label[order.back()] = rng.Bernoulli(0.5) ? 1 : 0;
  return label;
}

}  // namespace

std::optional<std::string> CheckCapacity(const DocumentTemplate& tpl,
                                         const AssignmentScheme& scheme,
                                         const NameInventory& inv) {
  const size_t n = GenderedIndices(tpl).size();
  if (n == 0) return "no gendered entity";
  const size_t half_up = (n + 1) / 2;
  const auto ex_first = OriginalNames(tpl, true);
  const auto ex_last = OriginalNames(tpl, false);
  switch (scheme.kind) {
    case SchemeKind::kGenderLocal:
    case SchemeKind::kGenderGlobal: {
      const size_t need = scheme.kind == SchemeKind::kGenderLocal ? half_up : n;
      for (Gender g : {Gender::kMale, Gender::kFemale}) {
        if (CountEligible(inv.census.Names(g), ex_first) < need) {
          return "too few " + std::string(GenderName(g)) + " first names for " +
                 std::to_string(n) + " entities";
        }
      }
      if (scheme.alter_last_names && CountEligible(inv.last_names, ex_last) < n) {
        return "too few last names for " + std::to_string(n) + " entities";
      }
      return std::nullopt;
    }
    case SchemeKind::kRaceRandomGender:
    case SchemeKind::kRaceIntersectional: {
      const auto groups = RaceGroups(inv);
      if (groups.size() != 2) return "race schemes need exactly two name groups";
      for (const auto& r : groups) {
        const GroupNames& names = inv.race.groups.at(r);
        std::vector<Gender> genders = {Gender::kMale, Gender::kFemale};
        if (scheme.kind == SchemeKind::kRaceIntersectional) {
          auto it = scheme.intersection.find(r);
          if (it == scheme.intersection.end()) return "no gender mapped for group " + r;
          genders = {it->second};
        }
        for (Gender g : genders) {
          if (CountEligible(names.First(g), ex_first) < half_up) {
            return "too few " + r + " " + std::string(GenderName(g)) + " first names for " +
                   std::to_string(n) + " entities";
          }
        }
        if (CountEligible(names.last, ex_last) < half_up) {
          return "too few " + r + " last names for " + std::to_string(n) + " entities";
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<EntityAssignment> AssignGroups(const DocumentTemplate& tpl,
                                           const AssignmentScheme& scheme, int variant,
                                           Rng& rng, const NameInventory& inv) {
  const std::vector<int> gendered = GenderedIndices(tpl);
  const size_t n = gendered.size();
  const bool inverted = variant % 2 == 1;
  const auto ex_first = OriginalNames(tpl, true);
  const auto ex_last = OriginalNames(tpl, false);
  std::vector<EntityAssignment> out;
  if (n == 0) return out;

  try {
    if (!scheme.IsRace()) {
      std::vector<Gender> genders(n);
      size_t need_male = n, need_female = n;
      if (scheme.kind == SchemeKind::kGenderLocal) {
        const std::vector<int> label = BalancedLabels(gendered, rng);
        const size_t base_male = std::count(label.begin(), label.end(), 0);
        need_male = need_female = std::max(base_male, n - base_male);
        for (size_t k = 0; k < n; ++k) {
          const Gender g = label[k] == 0 ? Gender::kMale : Gender::kFemale;
          genders[k] = inverted ? Opposite(g) : g;
        }
      } else {
        std::fill(genders.begin(), genders.end(), inverted ? Gender::kFemale : Gender::kMale);
      }
      const auto male_names =
          SampleDistinctNames(inv.census.Names(Gender::kMale), need_male, rng, ex_first,
                              scheme.sampling, inv.census.Frequencies(Gender::kMale));
      const auto female_names =
          SampleDistinctNames(inv.census.Names(Gender::kFemale), need_female, rng, ex_first,
                              scheme.sampling, inv.census.Frequencies(Gender::kFemale));
      std::vector<std::string> lasts;
      if (scheme.alter_last_names) lasts = SampleDistinctNames(inv.last_names, n, rng, ex_last);
      size_t next_male = 0, next_female = 0;
      for (size_t k = 0; k < n; ++k) {
        const EntityTemplate& e = tpl.entities[gendered[k]];
        const Gender g = genders[k];
        const std::string& first =
            g == Gender::kMale ? male_names[next_male++] : female_names[next_female++];
        out.push_back({e.id, std::string(GenderName(g)), g, TitleCase(first),
                       scheme.alter_last_names ? TitleCase(lasts[k]) : e.inferred_last.value_or("")});
      }
      return out;
    }

    const std::vector<std::string> groups = RaceGroups(inv);
    if (groups.size() != 2) throw GenerationError("race schemes need exactly two name groups");
    const std::vector<int> label = BalancedLabels(gendered, rng);
    std::vector<Gender> base_gender(n);
    for (size_t k = 0; k < n; ++k) {
      if (scheme.kind == SchemeKind::kRaceRandomGender) {
        base_gender[k] = rng.Bernoulli(0.5) ? Gender::kFemale : Gender::kMale;
      }
    }
    // Races and genders for both members of the pair, to size the name lists.
    auto race_of = [&](size_t k, bool inv_flag) { return groups[label[k] ^ (inv_flag ? 1 : 0)]; };
    auto gender_of = [&](size_t k, bool inv_flag) {
      if (scheme.kind == SchemeKind::kRaceIntersectional) {
        return scheme.intersection.at(race_of(k, inv_flag));
      }
      return base_gender[k];
    };
    std::map<std::pair<std::string, Gender>, size_t> need_first;
    std::map<std::string, size_t> need_last;
    for (bool flag : {false, true}) {
      std::map<std::pair<std::string, Gender>, size_t> first_count;
      std::map<std::string, size_t> last_count;
      for (size_t k = 0; k < n; ++k) {
        ++first_count[{race_of(k, flag), gender_of(k, flag)}];
        ++last_count[race_of(k, flag)];
      }
      for (auto& [key, c] : first_count) need_first[key] = std::max(need_first[key], c);
      for (auto& [key, c] : last_count) need_last[key] = std::max(need_last[key], c);
    }
    std::map<std::pair<std::string, Gender>, std::vector<std::string>> firsts;
    std::map<std::string, std::vector<std::string>> lasts;
    for (const std::string& r : groups) {
      const GroupNames& names = inv.race.groups.at(r);
      for (Gender g : {Gender::kMale, Gender::kFemale}) {
        auto it = need_first.find({r, g});
        if (it != need_first.end()) {
          firsts[{r, g}] = SampleDistinctNames(names.First(g), it->second, rng, ex_first);
        }
      }
      if (auto it = need_last.find(r); it != need_last.end()) {
        lasts[r] = SampleDistinctNames(names.last, it->second, rng, ex_last);
      }
    }
    std::map<std::pair<std::string, Gender>, size_t> next_first;
    std::map<std::string, size_t> next_last;
    for (size_t k = 0; k < n; ++k) {
      const EntityTemplate& e = tpl.entities[gendered[k]];
      const std::string r = race_of(k, inverted);
      const Gender g = gender_of(k, inverted);
      out.push_back({e.id, r, g, TitleCase(firsts[{r, g}][next_first[{r, g}]++]),
                     TitleCase(lasts[r][next_last[r]++])});
    }
    return out;
  } catch (const SamplingError& err) {
    throw GenerationError(tpl.doc_id + ": " + err.what());
  }
}

GeneratedInput GenerateInput(const DocumentTemplate& tpl, const AssignmentScheme& scheme,
                             int variant, uint64_t master_seed, const NameInventory& inventory) {
  const uint64_t pair_seed = DeriveSeed(master_seed, "generate", tpl.doc_id, variant / 2);
  Rng rng(pair_seed);
  GeneratedInput in;
  in.original_id = tpl.doc_id;
  in.variant = variant;
  in.id = tpl.doc_id + "#" + std::to_string(variant);
  in.pair_id = tpl.doc_id + "#p" + std::to_string(variant / 2);
  in.scheme = scheme.Name();
  in.seed = pair_seed;
  in.assignments = AssignGroups(tpl, scheme, variant, rng, inventory);
  RenderedDocument r = Render(tpl, in.assignments);
  in.tokens = std::move(r.tokens);
  in.sentence = std::move(r.sentence);
  std::map<std::string, const EntityAssignment*> by_entity;
  for (const auto& a : in.assignments) by_entity[a.entity] = &a;
  for (const EntityTemplate& e : tpl.entities) {
    InputEntity ie;
    ie.id = e.id;
    if (auto it = by_entity.find(e.id); it != by_entity.end()) {
      ie.group = it->second->group;
      ie.gender = it->second->gender;
      ie.first = it->second->first;
    } else {
      ie.first = e.inferred_first.value_or("");
    }
    for (const MentionSpan& m : e.mentions) {
      ie.mentions.push_back({r.begin[m.start], r.end[m.end], m.chain});
    }
    in.entities.push_back(std::move(ie));
  }
  return in;
}

namespace {

struct Task {
  size_t tpl;
  int variant;
};

GenerationResult Assemble(const std::vector<DocumentTemplate>& templates,
                          const std::vector<size_t>& order, const std::vector<Task>& tasks,
                          std::vector<std::optional<GeneratedInput>>& results,
                          const std::vector<std::string>& errors,
                          std::vector<Diagnostic> dropped) {
  GenerationResult out;
  std::map<size_t, std::string> failed;
  for (size_t t = 0; t < tasks.size(); ++t) {
    if (!errors[t].empty() && !failed.count(tasks[t].tpl)) failed[tasks[t].tpl] = errors[t];
  }
  for (size_t t = 0; t < tasks.size(); ++t) {
    if (failed.count(tasks[t].tpl)) continue;
    out.inputs.push_back(std::move(*results[t]));
  }
  for (size_t idx : order) {
    if (auto it = failed.find(idx); it != failed.end()) {
      dropped.push_back({"generation_failed", templates[idx].doc_id + ": " + it->second});
    }
  }
  out.dropped = std::move(dropped);
  return out;
}

std::vector<Task> PlanTasks(const std::vector<DocumentTemplate>& templates,
                            const AssignmentScheme& scheme, const NameInventory& inv,
                            std::vector<size_t>& order, std::vector<Diagnostic>& dropped) {
  order.resize(templates.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return templates[a].doc_id < templates[b].doc_id; });
  std::vector<Task> tasks;
  for (size_t idx : order) {
    const DocumentTemplate& tpl = templates[idx];
    if (!tpl.eligible) continue;
    if (auto reason = CheckCapacity(tpl, scheme, inv)) {
      dropped.push_back({"insufficient_names", tpl.doc_id + ": " + *reason});
      continue;
    }
    for (int v = 0; v < scheme.variants_per_original; ++v) tasks.push_back({idx, v});
  }
  return tasks;
}

void RunTask(const std::vector<DocumentTemplate>& templates, const AssignmentScheme& scheme,
             uint64_t seed, const NameInventory& inv, const Task& task,
             std::optional<GeneratedInput>& result, std::string& error) {
  try {
    result = GenerateInput(templates[task.tpl], scheme, task.variant, seed, inv);
  } catch (const Error& e) {
    error = e.what();
    if (error.empty()) error = "generation failed";
  }
}

}  // namespace

GenerationResult GenerateCorpus(const std::vector<DocumentTemplate>& templates,
                                const AssignmentScheme& scheme, uint64_t master_seed,
                                const NameInventory& inventory) {
  std::vector<size_t> order;
  std::vector<Diagnostic> dropped;
  const std::vector<Task> tasks = PlanTasks(templates, scheme, inventory, order, dropped);
  std::vector<std::optional<GeneratedInput>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  const long count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long t = 0; t < count; ++t) {
    RunTask(templates, scheme, master_seed, inventory, tasks[t], results[t], errors[t]);
  }
  return Assemble(templates, order, tasks, results, errors, std::move(dropped));
}

GenerationResult GenerateCorpusSerial(const std::vector<DocumentTemplate>& templates,
                                      const AssignmentScheme& scheme, uint64_t master_seed,
                                      const NameInventory& inventory) {
  std::vector<size_t> order;
  std::vector<Diagnostic> dropped;
  const std::vector<Task> tasks = PlanTasks(templates, scheme, inventory, order, dropped);
  std::vector<std::optional<GeneratedInput>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    RunTask(templates, scheme, master_seed, inventory, tasks[t], results[t], errors[t]);
  }
  return Assemble(templates, order, tasks, results, errors, std::move(dropped));
}

nlohmann::json ToJson(const GeneratedInput& in) {
  nlohmann::json j;
  j["id"] = in.id;
  j["original_id"] = in.original_id;
  j["variant"] = in.variant;
  j["pair_id"] = in.pair_id;
  j["scheme"] = in.scheme;
  j["seed"] = in.seed;
  auto& as = j["assignments"] = nlohmann::json::array();
  for (const auto& a : in.assignments) {
    as.push_back({{"entity", a.entity},
                  {"group", a.group},
                  {"gender", GenderName(a.gender)},
                  {"first", a.first},
                  {"last", a.last}});
  }
  j["text"] = in.Text();
  j["tokens"] = in.tokens;
  j["sentence"] = in.sentence;
  auto& es = j["entities"] = nlohmann::json::array();
  for (const auto& e : in.entities) {
    nlohmann::json je{{"id", e.id}, {"first", e.first}};
    je["group"] = e.group ? nlohmann::json(*e.group) : nlohmann::json();
    je["gender"] = e.gender ? nlohmann::json(GenderName(*e.gender)) : nlohmann::json();
    auto& ms = je["mentions"] = nlohmann::json::array();
    for (const auto& m : e.mentions) {
      nlohmann::json jm{m.start, m.end};
      if (m.chain) jm.push_back(*m.chain);
      ms.push_back(std::move(jm));
    }
    es.push_back(std::move(je));
  }
  return j;
}

GeneratedInput GeneratedInputFromJson(const nlohmann::json& j) {
  GeneratedInput in;
  in.id = j.at("id").get<std::string>();
  in.original_id = j.at("original_id").get<std::string>();
  in.variant = j.at("variant").get<int>();
  in.pair_id = j.value("pair_id", "");
  in.scheme = j.value("scheme", "");
  in.seed = j.value("seed", uint64_t{0});
  for (const auto& a : j.at("assignments")) {
    in.assignments.push_back({a.at("entity").get<std::string>(), a.at("group").get<std::string>(),
                              *ParseGender(a.at("gender").get<std::string>()),
                              a.at("first").get<std::string>(), a.at("last").get<std::string>()});
  }
  in.tokens = j.at("tokens").get<std::vector<std::string>>();
  in.sentence = j.value("sentence", std::vector<int>(in.tokens.size(), 0));
  for (const auto& je : j.at("entities")) {
    InputEntity e;
    e.id = je.at("id").get<std::string>();
    e.first = je.value("first", "");
    if (je.contains("group") && !je["group"].is_null()) e.group = je["group"].get<std::string>();
    if (je.contains("gender") && !je["gender"].is_null()) {
      e.gender = ParseGender(je["gender"].get<std::string>());
    }
    for (const auto& m : je.at("mentions")) {
      std::optional<std::string> chain;
      if (m.size() > 2) chain = m.at(2).get<std::string>();
      e.mentions.push_back({m.at(0).get<int>(), m.at(1).get<int>(), chain});
    }
    in.entities.push_back(std::move(e));
  }
  return in;
}

}  // namespace sumbias
