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

#include "sumbias/template_builder.h"

#include <algorithm>
#include <set>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"

namespace sumbias {

std::string_view SlotCategoryName(SlotCategory c) {
  switch (c) {
    case SlotCategory::kFullName: return "full_name";
    case SlotCategory::kFirstName: return "first_name";
    case SlotCategory::kLastName: return "last_name";
    case SlotCategory::kPronoun: return "pronoun";
    case SlotCategory::kTitle: return "title";
  }
  return "";
}

SlotCategory ParseSlotCategory(std::string_view name) {
  for (SlotCategory c : {SlotCategory::kFullName, SlotCategory::kFirstName,
                         SlotCategory::kLastName, SlotCategory::kPronoun, SlotCategory::kTitle}) {
    if (SlotCategoryName(c) == name) return c;
  }
  throw DataError("unknown slot category '" + std::string(name) + "'");
}

std::string_view HoleKindName(HoleKind k) {
  switch (k) {
    case HoleKind::kFirst: return "first";
    case HoleKind::kLast: return "last";
    case HoleKind::kFull: return "full";
    case HoleKind::kPronoun: return "pronoun";
    case HoleKind::kTitle: return "title";
  }
  return "";
}

HoleKind ParseHoleKind(std::string_view name) {
  for (HoleKind k : {HoleKind::kFirst, HoleKind::kLast, HoleKind::kFull, HoleKind::kPronoun,
                     HoleKind::kTitle}) {
    if (HoleKindName(k) == name) return k;
  }
  throw DataError("unknown hole kind '" + std::string(name) + "'");
}

const EntityTemplate* DocumentTemplate::FindEntity(const std::string& id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

int DocumentTemplate::GenderedEntityCount() const {
  return static_cast<int>(std::count_if(entities.begin(), entities.end(),
                                        [](const EntityTemplate& e) { return e.is_gendered; }));
}

namespace {

bool IsPronounPos(const std::string& pos) { return pos == "PRP" || pos == "PRP$"; }

bool SameSentence(const AnnotatedDocument& doc, int a, int b) {
  return doc.tokens[a].sentence == doc.tokens[b].sentence;
}

// Counts candidates and remembers where each was first seen.
class CandidateCounter {
 public:
  void Add(const std::string& text, int position) {
    auto [it, inserted] = entries_.try_emplace(text, Entry{0, position});
    ++it->second.count;
    it->second.first_position = std::min(it->second.first_position, position);
  }

  bool empty() const { return entries_.empty(); }

  // Most frequent; ties go to the earliest position, then lexicographic.
  std::optional<std::string> Best(const std::optional<std::string>& exclude = {}) const {
    std::optional<std::string> best;
    Entry best_entry{0, 0};
    for (const auto& [text, entry] : entries_) {
      if (exclude && text == *exclude) continue;
      if (!best || entry.count > best_entry.count ||
          (entry.count == best_entry.count && entry.first_position < best_entry.first_position)) {
        best = text;
        best_entry = entry;
      }
    }
    return best;
  }

 private:
  struct Entry {
    int count;
    int first_position;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace

std::vector<PersonEntity> SelectPersonEntities(const AnnotatedDocument& doc) {
  std::map<std::string, PersonEntity> by_chain;
  std::vector<PersonEntity> singletons;
  for (const NamedEntitySpan& ne : doc.entities) {
    if (ne.label != "PERSON") continue;
    const MentionSpan* deepest = nullptr;
    for (const MentionSpan& m : doc.mentions) {
      if (!m.chain || !m.Contains(ne.start, ne.end)) continue;
      if (!deepest || m.length() < deepest->length() ||
          (m.length() == deepest->length() && m.start < deepest->start)) {
        deepest = &m;
      }
    }
    if (deepest) {
      PersonEntity& e = by_chain[*deepest->chain];
      e.id = *deepest->chain;
      e.person_spans.push_back(ne);
      continue;
    }
    PersonEntity single;
    single.id = "ne:" + std::to_string(ne.start) + "-" + std::to_string(ne.end);
    single.person_spans.push_back(ne);
    MentionSpan span{ne.start, ne.end, std::nullopt};
    // A title directly in front of an unlinked name belongs to it.
    if (span.start > 0 && IsTitle(doc.tokens[span.start - 1].text) &&
        SameSentence(doc, span.start - 1, span.start)) {
      --span.start;
    }
    single.mentions.push_back(span);
    singletons.push_back(std::move(single));
  }
  std::vector<PersonEntity> out;
  for (auto& [chain, entity] : by_chain) {
    for (int idx : doc.chains.at(chain)) entity.mentions.push_back(doc.mentions[idx]);
    out.push_back(std::move(entity));
  }
  for (auto& s : singletons) out.push_back(std::move(s));
  return out;
}

std::vector<std::string> SelectPersonChains(const AnnotatedDocument& doc) {
  std::vector<std::string> ids;
  for (const auto& e : SelectPersonEntities(doc)) ids.push_back(e.id);
  return ids;
}

InferredNames InferNames(const AnnotatedDocument& doc, const PersonEntity& entity) {
  CandidateCounter titled_last, last, first;
  bool multi_token_last = false;
  for (const NamedEntitySpan& ne : entity.person_spans) {
    std::vector<int> positions;
    for (int i = ne.start; i <= ne.end; ++i) {
      if (positions.empty() && IsTitle(doc.tokens[i].text)) continue;  // leading title
      positions.push_back(i);
    }
    if (positions.empty()) continue;
    if (positions.size() == 1) {
      const int p = positions[0];
      if (p > 0) {
        const std::string prev = ToLower(doc.tokens[p - 1].text);
        if (prev == "mr." || prev == "mrs." || prev == "ms.") {
          titled_last.Add(doc.tokens[p].text, p);
          continue;
        }
      }
    }
    last.Add(doc.tokens[positions.back()].text, positions.back());
    if (positions.size() > 1) multi_token_last = true;
    for (size_t k = 0; k + 1 < positions.size(); ++k) {
      first.Add(doc.tokens[positions[k]].text, positions[k]);
    }
  }
  InferredNames names;
  names.last = titled_last.empty() ? last.Best() : titled_last.Best();
  names.first = first.Best(names.last);
  names.single_token_only =
      names.last && titled_last.empty() && !multi_token_last && !names.first;
  return names;
}

namespace {

struct Claim {
  int entity;
  size_t slot;
  SlotHole hole;
  int mention_length;
};

// Builds the slot for one mention, looking only at `own` positions (the
// mention minus nested mentions of other entities).
std::optional<EntitySlot> CategorizeMention(const AnnotatedDocument& doc,
                                            const EntityTemplate& entity,
                                            const MentionSpan& mention,
                                            const std::vector<bool>& foreign) {
  EntitySlot slot;
  slot.entity = entity.id;
  slot.mention = mention;
  if (mention.length() == 1 && IsPronounPos(doc.tokens[mention.start].pos)) {
    if (!IsGenderedPronoun(doc.tokens[mention.start].text)) return std::nullopt;
    slot.category = SlotCategory::kPronoun;
    slot.holes.push_back(
        {mention.start, mention.start, HoleKind::kPronoun, doc.tokens[mention.start].pos});
    return slot;
  }
  std::vector<int> titles, firsts, lasts;
  for (int i = mention.start; i <= mention.end; ++i) {
    if (foreign[i - mention.start]) continue;
    const std::string& text = doc.tokens[i].text;
    if (IsTitle(text)) {
      titles.push_back(i);
    } else if (entity.inferred_first && text == *entity.inferred_first) {
      firsts.push_back(i);
    } else if (entity.inferred_last && text == *entity.inferred_last) {
      lasts.push_back(i);
    }
  }
  if (titles.empty() && firsts.empty() && lasts.empty()) return std::nullopt;
  if (!titles.empty()) {
    slot.category = SlotCategory::kTitle;
    slot.title_text = doc.tokens[titles.front()].text;
  } else if (!firsts.empty() && !lasts.empty()) {
    slot.category = SlotCategory::kFullName;
  } else if (!firsts.empty()) {
    slot.category = SlotCategory::kFirstName;
  } else {
    slot.category = SlotCategory::kLastName;
  }
  for (int t : titles) slot.holes.push_back({t, t, HoleKind::kTitle, ""});
  std::set<int> paired_last;
  for (int f : firsts) {
    if (std::find(lasts.begin(), lasts.end(), f + 1) != lasts.end()) {
      slot.holes.push_back({f, f + 1, HoleKind::kFull, ""});
      paired_last.insert(f + 1);
    } else {
      slot.holes.push_back({f, f, HoleKind::kFirst, ""});
    }
  }
  for (int l : lasts) {
    if (!paired_last.count(l)) slot.holes.push_back({l, l, HoleKind::kLast, ""});
  }
  std::sort(slot.holes.begin(), slot.holes.end(),
            [](const SlotHole& a, const SlotHole& b) { return a.start < b.start; });
  return slot;
}

}  // namespace

DocumentTemplate BuildTemplate(const AnnotatedDocument& doc,
                               const std::vector<ContentWordSpan>& content_spans) {
  DocumentTemplate tpl;
  tpl.doc_id = doc.id();
  for (const Token& t : doc.tokens) {
    tpl.tokens.push_back(t.text);
    tpl.pos.push_back(t.pos);
    tpl.sentence.push_back(t.sentence);
  }

  const std::vector<PersonEntity> persons = SelectPersonEntities(doc);
  for (const PersonEntity& p : persons) {
    EntityTemplate e;
    e.id = p.id;
    const InferredNames names = InferNames(doc, p);
    e.inferred_first = names.first;
    e.inferred_last = names.last;
    e.mentions = p.mentions;
    if (names.single_token_only) {
      tpl.diagnostics.push_back(
          {"single_token_name", "entity " + p.id + ": single-token name '" + *names.last +
                                    "' treated as last name"});
    }
    tpl.entities.push_back(std::move(e));
  }

  // Holes are claimed innermost-mention first; a position claimed by one
  // entity is never rewritten for another.
  std::vector<Claim> claims;
  for (size_t ei = 0; ei < tpl.entities.size(); ++ei) {
    EntityTemplate& e = tpl.entities[ei];
    for (const MentionSpan& m : e.mentions) {
      std::vector<bool> foreign(m.length(), false);
      for (size_t fj = 0; fj < tpl.entities.size(); ++fj) {
        if (fj == ei) continue;
        for (const MentionSpan& other : tpl.entities[fj].mentions) {
          if (m.Contains(other.start, other.end) && !(other.start == m.start && other.end == m.end)) {
            for (int i = other.start; i <= other.end; ++i) foreign[i - m.start] = true;
          }
        }
      }
      auto slot = CategorizeMention(doc, e, m, foreign);
      if (!slot) continue;
      e.slots.push_back(std::move(*slot));
    }
    for (size_t si = 0; si < e.slots.size(); ++si) {
      for (const SlotHole& h : e.slots[si].holes) {
        claims.push_back({static_cast<int>(ei), si, h, e.slots[si].mention.length()});
      }
    }
  }
  std::stable_sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
    if (a.mention_length != b.mention_length) return a.mention_length < b.mention_length;
    return a.hole.start < b.hole.start;
  });
  std::vector<int> owner(doc.tokens.size(), -1);
  std::map<std::pair<int, size_t>, std::vector<SlotHole>> kept;
  for (const Claim& c : claims) {
    bool free = true;
    int clash = -1;
    for (int i = c.hole.start; i <= c.hole.end; ++i) {
      if (owner[i] != -1) {
        free = false;
        clash = owner[i];
      }
    }
    if (!free) {
      if (clash != c.entity) {
        tpl.diagnostics.push_back({"hole_conflict", "token " + std::to_string(c.hole.start) +
                                                        " claimed by entities " +
                                                        tpl.entities[clash].id + " and " +
                                                        tpl.entities[c.entity].id});
      }
      continue;
    }
    for (int i = c.hole.start; i <= c.hole.end; ++i) owner[i] = c.entity;
    kept[{c.entity, c.slot}].push_back(c.hole);
  }

  for (size_t ei = 0; ei < tpl.entities.size(); ++ei) {
    EntityTemplate& e = tpl.entities[ei];
    std::vector<EntitySlot> slots;
    for (size_t si = 0; si < e.slots.size(); ++si) {
      auto it = kept.find({static_cast<int>(ei), si});
      if (it == kept.end()) continue;
      EntitySlot s = e.slots[si];
      s.holes = it->second;
      std::sort(s.holes.begin(), s.holes.end(),
                [](const SlotHole& a, const SlotHole& b) { return a.start < b.start; });
      slots.push_back(std::move(s));
    }
    std::sort(slots.begin(), slots.end(), [](const EntitySlot& a, const EntitySlot& b) {
      if (a.mention.start != b.mention.start) return a.mention.start < b.mention.start;
      return a.mention.end < b.mention.end;
    });
    e.slots = std::move(slots);

    int male = 0, female = 0;
    std::vector<std::pair<std::string, int>> female_titles;
    bool gendered = false;
    for (const EntitySlot& s : e.slots) {
      for (const SlotHole& h : s.holes) {
        const std::string& text = doc.tokens[h.start].text;
        if (h.kind == HoleKind::kPronoun) {
          gendered = true;
          (PronounGender(text) == Gender::kMale ? male : female)++;
        } else if (h.kind == HoleKind::kTitle) {
          gendered = true;
          const Gender g = *TitleGender(text);
          (g == Gender::kMale ? male : female)++;
          const std::string low = ToLower(text);
          if (low == "mrs." || low == "ms.") female_titles.push_back({text, h.start});
        } else if (h.kind == HoleKind::kFirst || h.kind == HoleKind::kFull) {
          gendered = true;
        }
      }
    }
    e.is_gendered = gendered;
    if (male != female) e.original_gender = male > female ? Gender::kMale : Gender::kFemale;
    if (!female_titles.empty()) {
      CandidateCounter counter;
      for (const auto& [text, pos] : female_titles) counter.Add(text, pos);
      e.female_title = counter.Best();
    }
  }
  tpl.eligible = tpl.GenderedEntityCount() > 0;

  for (const ContentWordSpan& span : content_spans) {
    const std::string where = "content span [" + std::to_string(span.start) + "," +
                              std::to_string(span.end) + "]";
    if (span.start < 0 || span.end < span.start ||
        span.end >= static_cast<int>(doc.tokens.size())) {
      tpl.diagnostics.push_back({"content_span_bounds", where + " out of range"});
      continue;
    }
    if (span.entities.empty()) {
      tpl.diagnostics.push_back({"content_span_entities", where + " has no governing entity"});
      continue;
    }
    if (span.entities.size() > 1 && span.neutral_variant.empty()) {
      tpl.diagnostics.push_back({"content_span_neutral", where + " lacks a neutral variant"});
      continue;
    }
    bool known = std::all_of(span.entities.begin(), span.entities.end(),
                             [&](const std::string& id) { return tpl.FindEntity(id) != nullptr; });
    if (!known) {
      tpl.diagnostics.push_back({"content_span_entities", where + " names an unknown entity"});
      continue;
    }
    bool overlaps = false;
    for (int i = span.start; i <= span.end; ++i) overlaps |= owner[i] != -1;
    for (const auto& other : tpl.content_spans) {
      overlaps |= !(span.end < other.start || other.end < span.start);
    }
    if (overlaps) {
      tpl.diagnostics.push_back({"content_span_overlap", where + " overlaps a slot"});
      continue;
    }
    tpl.content_spans.push_back(span);
  }
  std::sort(tpl.content_spans.begin(), tpl.content_spans.end(),
            [](const ContentWordSpan& a, const ContentWordSpan& b) { return a.start < b.start; });
  return tpl;
}

std::map<std::string, std::vector<ContentWordSpan>> LoadContentWordSpans(
    const std::string& path) {
  std::map<std::string, std::vector<ContentWordSpan>> out;
  for (const auto& row : ReadJsonl(path)) {
    ContentWordSpan span = ContentWordSpanFromJson(row);
    out[span.doc_id].push_back(std::move(span));
  }
  return out;
}

nlohmann::json ToJson(const ContentWordSpan& s) {
  return {{"doc_id", s.doc_id},   {"start", s.start},         {"end", s.end},
          {"entities", s.entities}, {"male", s.male_variant}, {"female", s.female_variant},
          {"neutral", s.neutral_variant}};
}

ContentWordSpan ContentWordSpanFromJson(const nlohmann::json& j) {
  ContentWordSpan s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.start = j.at("start").get<int>();
  s.end = j.at("end").get<int>();
  s.entities = j.at("entities").get<std::vector<std::string>>();
  s.male_variant = j.at("male").get<std::string>();
  s.female_variant = j.at("female").get<std::string>();
  s.neutral_variant = j.value("neutral", "");
  return s;
}

namespace {

nlohmann::json SpanJson(const MentionSpan& m) {
  return {m.start, m.end, m.chain ? nlohmann::json(*m.chain) : nlohmann::json()};
}

MentionSpan SpanFromJson(const nlohmann::json& j) {
  MentionSpan m{j.at(0).get<int>(), j.at(1).get<int>(), std::nullopt};
  if (!j.at(2).is_null()) m.chain = j.at(2).get<std::string>();
  return m;
}

nlohmann::json OptString(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json();
}

std::optional<std::string> OptStringFromJson(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

}  // namespace

nlohmann::json ToJson(const DocumentTemplate& t) {
  nlohmann::json j;
  j["doc_id"] = t.doc_id;
  j["eligible"] = t.eligible;
  j["tokens"] = t.tokens;
  j["pos"] = t.pos;
  j["sentence"] = t.sentence;
  auto& ents = j["entities"] = nlohmann::json::array();
  for (const EntityTemplate& e : t.entities) {
    nlohmann::json je;
    je["id"] = e.id;
    je["first"] = OptString(e.inferred_first);
    je["last"] = OptString(e.inferred_last);
    je["is_gendered"] = e.is_gendered;
    je["original_gender"] =
        e.original_gender ? nlohmann::json(GenderName(*e.original_gender)) : nlohmann::json();
    je["female_title"] = OptString(e.female_title);
    auto& ms = je["mentions"] = nlohmann::json::array();
    for (const MentionSpan& m : e.mentions) ms.push_back(SpanJson(m));
    auto& slots = je["slots"] = nlohmann::json::array();
    for (const EntitySlot& s : e.slots) {
      nlohmann::json js;
      js["mention"] = SpanJson(s.mention);
      js["category"] = SlotCategoryName(s.category);
      if (!s.title_text.empty()) js["title"] = s.title_text;
      auto& holes = js["holes"] = nlohmann::json::array();
      for (const SlotHole& h : s.holes) {
        holes.push_back({h.start, h.end, HoleKindName(h.kind), h.pos});
      }
      slots.push_back(std::move(js));
    }
    ents.push_back(std::move(je));
  }
  auto& spans = j["content_spans"] = nlohmann::json::array();
  for (const auto& s : t.content_spans) spans.push_back(ToJson(s));
  auto& diags = j["diagnostics"] = nlohmann::json::array();
  for (const auto& d : t.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});
  return j;
}

DocumentTemplate TemplateFromJson(const nlohmann::json& j) {
  DocumentTemplate t;
  t.doc_id = j.at("doc_id").get<std::string>();
  t.eligible = j.at("eligible").get<bool>();
  t.tokens = j.at("tokens").get<std::vector<std::string>>();
  t.pos = j.at("pos").get<std::vector<std::string>>();
  t.sentence = j.at("sentence").get<std::vector<int>>();
  for (const auto& je : j.at("entities")) {
    EntityTemplate e;
    e.id = je.at("id").get<std::string>();
    e.inferred_first = OptStringFromJson(je, "first");
    e.inferred_last = OptStringFromJson(je, "last");
    e.is_gendered = je.at("is_gendered").get<bool>();
    if (auto g = OptStringFromJson(je, "original_gender")) e.original_gender = ParseGender(*g);
    e.female_title = OptStringFromJson(je, "female_title");
    for (const auto& m : je.at("mentions")) e.mentions.push_back(SpanFromJson(m));
    for (const auto& js : je.at("slots")) {
      EntitySlot s;
      s.entity = e.id;
      s.mention = SpanFromJson(js.at("mention"));
      s.category = ParseSlotCategory(js.at("category").get<std::string>());
      s.title_text = js.value("title", "");
      for (const auto& h : js.at("holes")) {
        s.holes.push_back({h.at(0).get<int>(), h.at(1).get<int>(),
                           ParseHoleKind(h.at(2).get<std::string>()), h.at(3).get<std::string>()});
      }
      e.slots.push_back(std::move(s));
    }
    t.entities.push_back(std::move(e));
  }
  for (const auto& s : j.at("content_spans")) t.content_spans.push_back(ContentWordSpanFromJson(s));
  if (j.contains("diagnostics")) {
    for (const auto& d : j["diagnostics"]) {
      t.diagnostics.push_back({d.at("code").get<std::string>(), d.at("message").get<std::string>()});
    }
  }
  return t;
}

}  // namespace sumbias
