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

#include "sumbias/pipeline.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"
#include "sumbias/rng.h"

namespace sumbias {

namespace fs = std::filesystem;

namespace {

std::string Resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

std::string Hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

void RequireFile(const std::string& path, const std::string& field) {
  if (!path.empty() && !fs::is_regular_file(path)) {
    throw LoadError("config field '" + field + "': file not found: " + path);
  }
}

}  // namespace

std::string FileDigest(const std::string& path) {
  if (path.empty()) return "-";
  return Hex(Fnv1a64(ReadTextFile(path)));
}

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& j, const std::string& base_dir) {
  PipelineConfig c;
  try {
    auto path = [&](const char* key) { return Resolve(base_dir, j.value(key, std::string())); };
    c.corpus = path("corpus");
    c.content_spans = path("content_spans");
    c.scheme = j.value("scheme", c.scheme);
    c.variants = j.value("variants", c.variants);
    c.alter_last_names = j.value("alter_last_names", c.alter_last_names);
    c.sampling = j.value("sampling", c.sampling);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<uint64_t>();
    c.word_lists = path("word_lists");
    c.census_male = path("census_male");
    c.census_female = path("census_female");
    c.race_names = path("race_names");
    c.last_names = path("last_names");
    if (j.contains("summaries")) {
      for (const auto& [sys, p] : j["summaries"].items()) {
        c.summaries[sys] = Resolve(base_dir, p.get<std::string>());
      }
    }
    if (j.contains("synthetic")) {
      for (const auto& [sys, entry] : j["synthetic"].items()) {
        c.synthetic[sys] = SyntheticSummarizerFromJson(entry);
      }
    }
    c.ner_side_file = path("ner_side_file");
    c.cache = path("cache");
    c.similarity = j.value("similarity", c.similarity);
    if (j.contains("vectors")) {
      for (const auto& [sys, p] : j["vectors"].items()) {
        c.vectors[sys] = Resolve(base_dir, p.get<std::string>());
      }
    }
    c.output_dir = path("output_dir");
    c.replicates = j.value("replicates", c.replicates);
    c.smoothing = j.value("smoothing", c.smoothing);
    c.top_k = j.value("top_k", c.top_k);
    c.measures = j.value("measures", c.measures);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::FromFile(const std::string& path) {
  return FromJson(ReadJsonFile(path), fs::path(path).parent_path().string());
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json j{{"corpus", corpus},
                   {"content_spans", content_spans},
                   {"scheme", scheme},
                   {"variants", variants},
                   {"alter_last_names", alter_last_names},
                   {"sampling", sampling},
                   {"word_lists", word_lists},
                   {"census_male", census_male},
                   {"census_female", census_female},
                   {"race_names", race_names},
                   {"last_names", last_names},
                   {"summaries", summaries},
                   {"ner_side_file", ner_side_file},
                   {"cache", cache},
                   {"similarity", similarity},
                   {"vectors", vectors},
                   {"output_dir", output_dir},
                   {"replicates", replicates},
                   {"smoothing", smoothing},
                   {"top_k", top_k},
                   {"measures", measures}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json();
  auto& syn = j["synthetic"] = nlohmann::json::object();
  for (const auto& [sys, s] : synthetic) syn[sys] = sumbias::ToJson(s);
  return j;
}

AssignmentScheme PipelineConfig::Scheme() const {
  AssignmentScheme s = ParseScheme(scheme);
  s.variants_per_original = variants;
  s.alter_last_names = alter_last_names;
  if (sampling == "uniform") {
    s.sampling = SamplingMode::kUniform;
  } else if (sampling == "weighted") {
    s.sampling = SamplingMode::kFrequencyWeighted;
  } else {
    throw UsageError("sampling must be 'uniform' or 'weighted', got '" + sampling + "'");
  }
  return s;
}

std::vector<std::string> PipelineConfig::EffectiveMeasures() const {
  if (!measures.empty()) return measures;
  const AssignmentScheme s = Scheme();
  if (s.IsRace()) return {kMeasureEntityInclusion};
  std::vector<std::string> out = {kMeasureWordListUniform, kMeasureWordListAdjusted,
                                  kMeasureEntityInclusion, kMeasureHallucination};
  if (s.kind == SchemeKind::kGenderGlobal) out.push_back(kMeasureDistinguishability);
  return out;
}

void PipelineConfig::Validate() const {
  if (!seed) throw UsageError("config needs an explicit seed");
  if (corpus.empty()) throw UsageError("config needs a corpus");
  if (output_dir.empty()) throw UsageError("config needs an output_dir");
  if (variants < 2 || variants % 2 != 0) {
    throw UsageError("variants must be a positive even number, got " + std::to_string(variants));
  }
  if (replicates < 2) throw UsageError("replicates must be at least 2");
  if (smoothing < 0) throw UsageError("smoothing must be non-negative");
  if (similarity != "bow" && similarity != "dense") {
    throw UsageError("similarity must be 'bow' or 'dense'");
  }
  const AssignmentScheme s = Scheme();
  for (const auto& m : EffectiveMeasures()) {
    if (m != kMeasureWordListUniform && m != kMeasureWordListAdjusted &&
        m != kMeasureEntityInclusion && m != kMeasureHallucination &&
        m != kMeasureDistinguishability) {
      throw UsageError("unknown measure '" + m + "'");
    }
  }
  RequireFile(corpus, "corpus");
  RequireFile(content_spans, "content_spans");
  RequireFile(word_lists, "word_lists");
  if (!s.IsRace()) {
    if (census_male.empty() || census_female.empty()) {
      throw UsageError("gender schemes need census_male and census_female");
    }
  } else if (race_names.empty()) {
    throw UsageError("race schemes need race_names");
  }
  RequireFile(census_male, "census_male");
  RequireFile(census_female, "census_female");
  RequireFile(race_names, "race_names");
  if (alter_last_names && last_names.empty()) {
    throw UsageError("alter_last_names needs a last_names file");
  }
  RequireFile(last_names, "last_names");
  RequireFile(ner_side_file, "ner_side_file");
  RequireFile(cache, "cache");
  if (summaries.empty() && synthetic.empty()) throw UsageError("config lists no systems");
  for (const auto& [sys, path] : summaries) {
    if (synthetic.count(sys)) throw UsageError("system '" + sys + "' is listed twice");
    if (!fs::is_regular_file(path)) {
      throw StageError("summaries", sys, "summary file not found: " + path);
    }
  }
  if (similarity == "dense") {
    for (const auto& [sys, path] : summaries) {
      if (!vectors.count(sys)) throw UsageError("dense similarity needs vectors for " + sys);
    }
    for (const auto& [sys, s2] : synthetic) {
      if (!vectors.count(sys)) throw UsageError("dense similarity needs vectors for " + sys);
    }
  }
  for (const auto& [sys, path] : vectors) RequireFile(path, "vectors." + sys);
}

NameInventory LoadInventory(const PipelineConfig& config) {
  NameInventory inv;
  if (!config.census_male.empty() && !config.census_female.empty()) {
    inv.census = ResolveAmbiguous(LoadCensus(config.census_male, config.census_female));
  }
  if (!config.race_names.empty()) inv.race = LoadRaceNames(config.race_names);
  if (!config.last_names.empty()) {
    std::istringstream in(ReadTextFile(config.last_names));
    std::string line;
    while (std::getline(in, line)) {
      const auto cols = SplitWhitespace(line);
      if (!cols.empty() && cols[0][0] != '#') inv.last_names.push_back(TitleCase(cols[0]));
    }
  }
  return inv;
}

WordLists LoadIdentifierLists(const PipelineConfig& config) {
  return config.word_lists.empty() ? HelmWordLists() : LoadWordLists(config.word_lists);
}

nlohmann::json ToJson(const HallucinationRecord& h) {
  nlohmann::json j{{"input_id", h.input_id},
                   {"system", h.system},
                   {"entity_tokens", h.tokens},
                   {"source", VerdictSourceName(h.verdict.source)},
                   {"note", h.verdict.note}};
  j["gender"] = h.verdict.gender ? nlohmann::json(GenderName(*h.verdict.gender)) : nlohmann::json();
  return j;
}

HallucinationRecord HallucinationFromJson(const nlohmann::json& j) {
  HallucinationRecord h;
  h.input_id = j.at("input_id").get<std::string>();
  h.system = j.at("system").get<std::string>();
  h.tokens = j.at("entity_tokens").get<std::vector<std::string>>();
  if (!j.at("gender").is_null()) h.verdict.gender = ParseGender(j["gender"].get<std::string>());
  const std::string source = j.value("source", "none");
  h.verdict.source = source == "encyclopedia" ? VerdictSource::kEncyclopedia
                     : source == "census"     ? VerdictSource::kCensus
                                              : VerdictSource::kNone;
  h.verdict.note = j.value("note", "");
  return h;
}

std::vector<HallucinationRecord> ClassifyHallucinations(const std::vector<AlignmentResult>& results,
                                                        LookupClient* client,
                                                        const GenderNameTable& names) {
  std::vector<const AlignmentResult*> todo;
  for (const auto& r : results) {
    if (r.status == AlignStatus::kHallucinated) todo.push_back(&r);
  }
  std::vector<HallucinationRecord> out(todo.size());
  const long n = static_cast<long>(todo.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    out[i] = {todo[i]->input_id, todo[i]->system, todo[i]->entity.tokens,
              Classify(todo[i]->entity.tokens, client, names)};
  }
  return out;
}

std::map<std::string, std::vector<double>> LoadVectors(const std::string& path) {
  std::map<std::string, std::vector<double>> out;
  const auto rows = ReadJsonl(path);
  for (size_t i = 0; i < rows.size(); ++i) {
    try {
      out[rows[i].at("input_id").get<std::string>()] =
          rows[i].at("vector").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw DataError(path + ": row " + std::to_string(i + 1) + " is not {input_id, vector}");
    }
  }
  return out;
}

namespace {

std::vector<std::string> InclusionGroups(const std::vector<GeneratedInput>& inputs) {
  std::set<std::string> groups;
  for (const auto& in : inputs) {
    for (const auto& e : in.entities) {
      if (e.group) groups.insert(*e.group);
    }
  }
  return {groups.begin(), groups.end()};
}

std::map<std::string, double> Slice(const std::vector<double>& v,
                                    const std::vector<std::string>& groups, size_t offset,
                                    size_t stride = 1) {
  std::map<std::string, double> out;
  for (size_t k = 0; k < groups.size(); ++k) out[groups[k]] = v[offset + k * stride];
  return out;
}

}  // namespace

std::vector<ScoreWithCI> ScoreSystem(const std::string& system, const ScoringInputs& in,
                                     const std::vector<std::string>& measures,
                                     const AssignmentScheme& scheme, int replicates,
                                     double smoothing, uint64_t seed) {
  std::map<std::string, const GeneratedInput*> by_id;
  for (const auto& g : *in.inputs) by_id[g.id] = &g;
  std::vector<GeneratedInput> system_inputs;
  std::vector<const GeneratedInput*> joined;
  for (const auto& r : *in.records) {
    auto it = by_id.find(r.input_id);
    if (it == by_id.end()) throw StageError("score", r.input_id, "summary has no input");
    joined.push_back(it->second);
  }
  std::vector<ScoreWithCI> out;
  for (const std::string& measure : measures) {
    std::vector<BootstrapUnit> units;
    CountScore score;
    long n = 0;
    std::vector<std::string> extra;
    if (measure == kMeasureWordListUniform || measure == kMeasureWordListAdjusted) {
      const IdentifierCounter counter(*in.identifiers);
      const auto& groups = counter.groups();
      for (size_t i = 0; i < in.records->size(); ++i) {
        const auto obs = counter.Count((*in.records)[i].tokens);
        const auto ref = counter.Count(joined[i]->tokens);
        BootstrapUnit u{joined[i]->original_id, joined[i]->variant, {}};
        for (const auto& g : groups) u.counts.push_back(obs.at(g));
        for (const auto& g : groups) u.counts.push_back(ref.at(g));
        units.push_back(std::move(u));
      }
      n = static_cast<long>(units.size());
      if (measure == kMeasureWordListUniform) {
        const GroupDistribution uniform = GroupDistribution::Uniform(groups);
        score = [groups, uniform](const std::vector<double>& c) -> std::optional<double> {
          return WordListInclusion(Slice(c, groups, 0), uniform);
        };
      } else {
        score = [groups](const std::vector<double>& c) -> std::optional<double> {
          auto ref = GroupDistribution::FromCounts(Slice(c, groups, groups.size()));
          if (!ref) return std::nullopt;
          return WordListInclusion(Slice(c, groups, 0), *ref);
        };
      }
    } else if (measure == kMeasureEntityInclusion) {
      const std::vector<std::string> groups = InclusionGroups(*in.inputs);
      for (size_t i = 0; i < in.records->size(); ++i) {
        const auto& rec = (*in.records)[i];
        auto inc_it = in.alignment->included.find({rec.input_id, rec.system});
        BootstrapUnit u{joined[i]->original_id, joined[i]->variant,
                        std::vector<double>(2 * groups.size(), 0.0)};
        for (const auto& e : joined[i]->entities) {
          if (!e.group) continue;
          const size_t k = std::find(groups.begin(), groups.end(), *e.group) - groups.begin();
          u.counts[2 * k + 1] += 1;
          ++n;
          if (inc_it != in.alignment->included.end() && inc_it->second.count(e.id)) {
            u.counts[2 * k] += 1;
          }
        }
        units.push_back(std::move(u));
      }
      score = [groups, smoothing](const std::vector<double>& c) -> std::optional<double> {
        InclusionTable t;
        for (size_t k = 0; k < groups.size(); ++k) t[groups[k]] = {c[2 * k], c[2 * k + 1]};
        return EntityInclusion(t, smoothing);
      };
    } else if (measure == kMeasureHallucination) {
      std::map<std::string, std::pair<double, double>> per_input;
      for (const auto& h : *in.hallucinations) {
        if (!h.verdict.gender) continue;
        auto& c = per_input[h.input_id];
        (*h.verdict.gender == Gender::kMale ? c.first : c.second) += 1;
        ++n;
      }
      for (size_t i = 0; i < in.records->size(); ++i) {
        auto it = per_input.find((*in.records)[i].input_id);
        std::pair<double, double> c = it == per_input.end() ? std::pair{0.0, 0.0} : it->second;
        units.push_back({joined[i]->original_id, joined[i]->variant, {c.first, c.second}});
      }
      score = [](const std::vector<double>& c) -> std::optional<double> {
        return HallucinationBias({{"male", c[0]}, {"female", c[1]}});
      };
    } else if (measure == kMeasureDistinguishability) {
      if (scheme.kind != SchemeKind::kGenderGlobal) {
        ScoreWithCI s;
        s.system = system;
        s.measure = measure;
        s.replicates = replicates;
        s.diagnostics.push_back("needs single-gender inputs (gender_global scheme)");
        out.push_back(std::move(s));
        continue;
      }
      std::vector<DistinguishItem> items;
      BagOfWords bow;
      for (size_t i = 0; i < in.records->size(); ++i) {
        const GeneratedInput& input = *joined[i];
        if (input.assignments.empty()) continue;
        DistinguishItem item;
        item.original = input.original_id;
        item.variant = input.variant;
        item.group = std::string(GenderName(input.assignments.front().gender));
        if (in.vectors) {
          auto it = in.vectors->find(input.id);
          if (it == in.vectors->end()) {
            throw StageError("score", input.id, "no dense vector for " + system);
          }
          item.rep = DenseRepresentation(it->second);
        } else {
          std::set<std::string> firsts, lasts;
          for (const auto& a : input.assignments) {
            for (const auto& t : SplitWhitespace(a.first)) firsts.insert(ToLower(t));
            for (const auto& t : SplitWhitespace(a.last)) lasts.insert(ToLower(t));
          }
          for (const auto& e : input.entities) {
            for (const auto& t : SplitWhitespace(e.first)) firsts.insert(ToLower(t));
            const std::string last = ChainLastName(e, input.tokens);
            if (!last.empty()) lasts.insert(ToLower(last));
          }
          item.rep = bow.Encode(NeutralizeTokens((*in.records)[i].tokens, firsts, lasts));
        }
        items.push_back(std::move(item));
      }
      const DistinguishabilityResult d = Distinguishability(items);
      for (const auto& [idx, hit] : d.indicators) {
        units.push_back({items[idx].original, items[idx].variant,
                         {static_cast<double>(hit), 1.0}});
      }
      n = d.n;
      extra = d.diagnostics;
      score = [](const std::vector<double>& c) -> std::optional<double> {
        if (c.size() < 2 || c[1] <= 0) return std::nullopt;
        return 2.0 * c[0] / c[1] - 1.0;
      };
    } else {
      throw UsageError("unknown measure '" + measure + "'");
    }
    ScoreWithCI s = ScoreUnits(system, measure, units, score, replicates, seed, n);
    if (measure == kMeasureDistinguishability) {
      s.ci_s.reset();
      s.diagnostics.push_back("s-interval not computed: variants of one original are scored jointly");
    }
    if (extra.size() > 5) {
      s.diagnostics.push_back(std::to_string(extra.size()) + " originals skipped, e.g. " + extra[0]);
    } else {
      s.diagnostics.insert(s.diagnostics.end(), extra.begin(), extra.end());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::map<std::string, std::vector<HallucinationCount>> TopHallucinations(
    const std::vector<HallucinationRecord>& records, int top_k) {
  std::map<std::string, std::map<std::string, HallucinationCount>> counts;
  for (const auto& h : records) {
    const std::string name = ToLower(Join(h.tokens, " "));
    auto& c = counts[h.system][name];
    c.entity = name;
    ++c.count;
    c.gender = !h.verdict.gender ? "u" : *h.verdict.gender == Gender::kMale ? "m" : "f";
  }
  std::map<std::string, std::vector<HallucinationCount>> out;
  for (auto& [sys, by_name] : counts) {
    auto& list = out[sys];
    for (auto& [name, c] : by_name) list.push_back(c);
    std::stable_sort(list.begin(), list.end(),
                     [](const HallucinationCount& a, const HallucinationCount& b) {
                       return a.count > b.count;
                     });
    if (static_cast<int>(list.size()) > top_k) list.resize(top_k);
  }
  return out;
}

namespace {

nlohmann::json CountsJson(const AlignmentCounts& c) {
  return {{"input_entities", c.input_entities},
          {"summary_entities", c.summary_entities},
          {"input_entities_aligned", c.input_entities_aligned},
          {"aligned", c.aligned},
          {"hallucinated", c.hallucinated},
          {"hallucinated_gender_classified", c.hallucinated_gender_classified},
          {"hallucinated_unguarded", c.hallucinated_unguarded},
          {"unresolved", c.unresolved}};
}

AlignmentCounts CountsFromJson(const nlohmann::json& j) {
  AlignmentCounts c;
  c.input_entities = j.value("input_entities", 0L);
  c.summary_entities = j.value("summary_entities", 0L);
  c.input_entities_aligned = j.value("input_entities_aligned", 0L);
  c.aligned = j.value("aligned", 0L);
  c.hallucinated = j.value("hallucinated", 0L);
  c.hallucinated_gender_classified = j.value("hallucinated_gender_classified", 0L);
  c.hallucinated_unguarded = j.value("hallucinated_unguarded", 0L);
  c.unresolved = j.value("unresolved", 0L);
  return c;
}

}  // namespace

nlohmann::json ToJson(const BiasReport& r) {
  nlohmann::json j;
  j["config"] = r.config;
  j["systems"] = r.systems;
  j["measures"] = r.measures;
  auto& scores = j["scores"] = nlohmann::json::array();
  for (const auto& s : r.scores) scores.push_back(ToJson(s));
  auto& align = j["alignment"] = nlohmann::json::object();
  for (const auto& [sys, c] : r.alignment) align[sys] = CountsJson(c);
  auto& hall = j["hallucinations"] = nlohmann::json::object();
  for (const auto& [sys, list] : r.hallucinations) {
    auto& arr = hall[sys] = nlohmann::json::array();
    for (const auto& h : list) {
      arr.push_back({{"entity", h.entity}, {"count", h.count}, {"gender", h.gender}});
    }
  }
  j["diagnostics"] = r.diagnostics;
  return j;
}

BiasReport ReportFromJson(const nlohmann::json& j) {
  BiasReport r;
  r.config = j.value("config", nlohmann::json::object());
  r.systems = j.value("systems", std::vector<std::string>{});
  r.measures = j.value("measures", std::vector<std::string>{});
  for (const auto& s : j.value("scores", nlohmann::json::array())) r.scores.push_back(ScoreFromJson(s));
  const nlohmann::json alignment = j.value("alignment", nlohmann::json::object());
  for (const auto& [sys, c] : alignment.items()) r.alignment[sys] = CountsFromJson(c);
  const nlohmann::json hallucinations = j.value("hallucinations", nlohmann::json::object());
  for (const auto& [sys, list] : hallucinations.items()) {
    for (const auto& h : list) {
      r.hallucinations[sys].push_back({h.at("entity").get<std::string>(), h.at("count").get<long>(),
                                       h.at("gender").get<std::string>()});
    }
  }
  r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return r;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  return std::nullopt;
}

namespace {

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string MeasureLabel(const std::string& m) {
  if (m == kMeasureWordListUniform) return "Word list inclusion (uniform)";
  if (m == kMeasureWordListAdjusted) return "Word list inclusion (adjusted)";
  if (m == kMeasureEntityInclusion) return "Entity inclusion";
  if (m == kMeasureHallucination) return "Hallucination";
  if (m == kMeasureDistinguishability) return "Distinguishability";
  return m;
}

std::string Cell(const ScoreWithCI* s) {
  if (!s || !s->point) return "n/a";
  std::string out = Fixed(*s->point);
  if (s->ci_s) out += "<br>s: " + Fixed(s->ci_s->lo) + "," + Fixed(s->ci_s->hi);
  if (s->ci_d) out += "<br>d: " + Fixed(s->ci_d->lo) + "," + Fixed(s->ci_d->hi);
  return out;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string RenderMarkdown(const BiasReport& r) {
  std::ostringstream md;
  md << "# Bias report\n\n## Scores\n\n| Measure |";
  for (const auto& sys : r.systems) md << " " << sys << " |";
  md << "\n|---|";
  for (size_t i = 0; i < r.systems.size(); ++i) md << "---|";
  md << "\n";
  for (const auto& m : r.measures) {
    md << "| " << MeasureLabel(m) << " |";
    for (const auto& sys : r.systems) {
      const ScoreWithCI* found = nullptr;
      for (const auto& s : r.scores) {
        if (s.system == sys && s.measure == m) found = &s;
      }
      md << " " << Cell(found) << " |";
    }
    md << "\n";
  }
  md << "\n## Alignment\n\n"
     << "| System | Input entities | Summary entities | Input entities aligned | Aligned | "
        "Hallucinated | With gender | Unresolved |\n"
     << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& [sys, c] : r.alignment) {
    md << "| " << sys << " | " << c.input_entities << " | " << c.summary_entities << " | "
       << c.input_entities_aligned << " | " << c.aligned << " | " << c.hallucinated << " | "
       << c.hallucinated_gender_classified << " | " << c.unresolved << " |\n";
  }
  md << "\n## Most frequent hallucinations\n\n| System | Entity | Count | Gender |\n|---|---|---|---|\n";
  for (const auto& [sys, list] : r.hallucinations) {
    for (const auto& h : list) {
      md << "| " << sys << " | " << h.entity << " | " << h.count << " | " << h.gender << " |\n";
    }
  }
  if (!r.diagnostics.empty()) {
    md << "\n## Diagnostics\n\n";
    for (const auto& d : r.diagnostics) md << "- " << d << "\n";
  }
  return md.str();
}

std::string RenderCsv(const BiasReport& r) {
  std::ostringstream csv;
  csv << "system,measure,point,ci_s_lo,ci_s_hi,ci_d_lo,ci_d_hi,n,replicates\n";
  auto opt = [](const std::optional<Interval>& ci, bool lo) {
    return ci ? Fixed(lo ? ci->lo : ci->hi) : std::string();
  };
  for (const auto& s : r.scores) {
    csv << CsvField(s.system) << "," << s.measure << "," << (s.point ? Fixed(*s.point) : "")
        << "," << opt(s.ci_s, true) << "," << opt(s.ci_s, false) << "," << opt(s.ci_d, true)
        << "," << opt(s.ci_d, false) << "," << s.n << "," << s.replicates << "\n";
  }
  return csv.str();
}

}  // namespace

std::string RenderReport(const BiasReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown: return RenderMarkdown(r);
    case ReportFormat::kCsv: return RenderCsv(r);
    case ReportFormat::kJson: return ToJson(r).dump(2) + "\n";
  }
  return "";
}

namespace {

class ArtifactStore {
 public:
  explicit ArtifactStore(const std::string& output_dir)
      : dir_(fs::path(output_dir) / "artifacts") {
    fs::create_directories(dir_);
  }

  std::string Path(const std::string& stage, const std::string& key) const {
    return (dir_ / (stage + "-" + key + ".jsonl")).string();
  }

  template <typename T, typename FromJson, typename ToJsonFn, typename Compute>
  std::vector<T> GetOrCompute(const std::string& stage, const std::string& key,
                              FromJson from_json, ToJsonFn to_json, Compute compute) {
    const std::string path = Path(stage, key);
    if (fs::is_regular_file(path)) {
      std::vector<T> out;
      try {
        for (const auto& row : ReadJsonl(path)) out.push_back(from_json(row));
        return out;
      } catch (const std::exception& e) {
        std::cerr << "warning: ignoring unreadable artifact " << path << ": " << e.what() << "\n";
      }
    }
    std::vector<T> out = compute();
    std::vector<nlohmann::json> rows;
    rows.reserve(out.size());
    for (const auto& item : out) rows.push_back(to_json(item));
    const std::string tmp = path + ".tmp";
    WriteJsonl(tmp, rows);
    fs::rename(tmp, path);
    return out;
  }

  void Write(const std::string& stage, const std::string& key,
             const std::vector<nlohmann::json>& rows) {
    WriteJsonl(Path(stage, key), rows);
  }

 private:
  fs::path dir_;
};

std::string Key(std::initializer_list<std::string> parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined += '\x1f';
  }
  return Hex(Fnv1a64(joined));
}

template <typename F>
auto InStage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, "", e.what());
  }
}

}  // namespace

BiasReport RunPipeline(const PipelineConfig& config) {
  config.Validate();
  const uint64_t seed = *config.seed;
  const AssignmentScheme scheme = config.Scheme();
  ArtifactStore store(config.output_dir);

  const std::string ingest_key = Key({"ingest", FileDigest(config.corpus)});
  const auto docs = InStage("ingest", [&] {
    return store.GetOrCompute<AnnotatedDocument>(
        "ingest", ingest_key, DocumentFromJson,
        [](const AnnotatedDocument& d) { return ToJson(d); },
        [&] { return LoadCorpus(config.corpus); });
  });

  const std::string tpl_key = Key({"templates", ingest_key, FileDigest(config.content_spans)});
  const auto templates = InStage("build-templates", [&] {
    return store.GetOrCompute<DocumentTemplate>(
        "templates", tpl_key, TemplateFromJson,
        [](const DocumentTemplate& t) { return ToJson(t); },
        [&] {
          std::map<std::string, std::vector<ContentWordSpan>> spans;
          if (!config.content_spans.empty()) spans = LoadContentWordSpans(config.content_spans);
          std::vector<DocumentTemplate> out(docs.size());
          const long n = static_cast<long>(docs.size());
          std::vector<std::string> errors(docs.size());
#pragma omp parallel for schedule(dynamic, 4)
          for (long i = 0; i < n; ++i) {
            try {
              auto it = spans.find(docs[i].id());
              out[i] = BuildTemplate(docs[i], it == spans.end() ? std::vector<ContentWordSpan>{}
                                                                : it->second);
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          }
          for (size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i].empty()) throw StageError("build-templates", docs[i].id(), errors[i]);
          }
          return out;
        });
  });

  const NameInventory inventory = InStage("generate", [&] { return LoadInventory(config); });
  const std::string gen_key =
      Key({"generate", tpl_key, scheme.Name(), std::to_string(config.variants),
           config.alter_last_names ? "alter" : "keep", config.sampling, std::to_string(seed),
           FileDigest(config.census_male), FileDigest(config.census_female),
           FileDigest(config.race_names), FileDigest(config.last_names)});
  std::vector<Diagnostic> dropped;
  const auto inputs = InStage("generate", [&] {
    return store.GetOrCompute<GeneratedInput>(
        "inputs", gen_key, GeneratedInputFromJson,
        [](const GeneratedInput& g) { return ToJson(g); },
        [&] {
          GenerationResult r = GenerateCorpus(templates, scheme, seed, inventory);
          dropped = r.dropped;
          return r.inputs;
        });
  });
  dropped = store.GetOrCompute<Diagnostic>(
      "dropped", gen_key,
      [](const nlohmann::json& j) {
        return Diagnostic{j.at("code").get<std::string>(), j.at("message").get<std::string>()};
      },
      [](const Diagnostic& d) { return nlohmann::json{{"code", d.code}, {"message", d.message}}; },
      [&] { return dropped; });
  std::set<std::string> input_ids;
  for (const auto& in : inputs) input_ids.insert(in.id);

  std::optional<FixtureLookupClient> client;
  if (!config.cache.empty()) client.emplace(FixtureLookupClient::FromFile(config.cache));
  std::vector<std::string> extra_names;
  if (client) extra_names = client->PersonTitles();
  const EntityLexicon lexicon = BuildLexicon(inputs, inventory.census, inventory.race, extra_names);
  std::optional<NerSideFile> side;
  if (!config.ner_side_file.empty()) side = LoadNerSideFile(config.ner_side_file);
  const WordLists identifiers = LoadIdentifierLists(config);

  BiasReport report;
  report.config = config.ToJson();
  report.config.erase("output_dir");  // where a run writes does not change what it computes
  report.measures = config.EffectiveMeasures();
  for (const auto& [sys, p] : config.summaries) report.systems.push_back(sys);
  for (const auto& [sys, s] : config.synthetic) report.systems.push_back(sys);
  std::sort(report.systems.begin(), report.systems.end());
  report.diagnostics.push_back(std::to_string(docs.size()) + " documents, " +
                               std::to_string(inputs.size()) + " generated inputs");
  size_t ineligible = 0;
  for (const auto& t : templates) ineligible += t.eligible ? 0 : 1;
  if (ineligible) {
    report.diagnostics.push_back(std::to_string(ineligible) + " originals without gendered entities");
  }
  for (const auto& d : dropped) report.diagnostics.push_back(d.code + ": " + d.message);

  const std::string lexicon_key = Key({FileDigest(config.census_male), FileDigest(config.census_female),
                                       FileDigest(config.race_names), FileDigest(config.cache),
                                       FileDigest(config.ner_side_file)});
  std::vector<HallucinationRecord> all_hallucinations;
  for (const std::string& sys : report.systems) {
    std::string source_key;
    if (auto it = config.summaries.find(sys); it != config.summaries.end()) {
      source_key = FileDigest(it->second);
    } else {
      source_key = Hex(Fnv1a64(ToJson(config.synthetic.at(sys)).dump()));
    }
    const std::string sum_key = Key({"summaries", gen_key, sys, source_key, lexicon_key});
    const auto records = InStage("summaries", [&] {
      return store.GetOrCompute<SummaryRecord>(
          "summaries", sum_key, SummaryRecordFromJson,
          [](const SummaryRecord& r) { return ToJson(r); },
          [&] {
            std::vector<SummaryRecord> recs;
            try {
              if (auto it = config.summaries.find(sys); it != config.summaries.end()) {
                recs = LoadSummaries(it->second, input_ids);
              } else {
                recs = SummariesFromJson(
                    SynthesizeSummaries(inputs, sys, config.synthetic.at(sys), seed), input_ids);
              }
            } catch (const DataError& e) {
              throw StageError("summaries", sys, e.what());
            }
            for (auto& r : recs) {
              if (r.system != sys) {
                throw StageError("summaries", r.input_id,
                                 "system '" + r.system + "' in the file for '" + sys + "'");
              }
            }
            AttachEntities(recs, lexicon, side ? &*side : nullptr);
            return recs;
          });
    });

    const AlignmentTable table = InStage("align", [&] { return AlignCorpus(records, inputs); });
    {
      std::vector<nlohmann::json> rows;
      for (const auto& r : table.results) rows.push_back(ToJson(r));
      store.Write("alignments", Key({"align", sum_key}), rows);
    }

    const std::string cls_key = Key({"classify", sum_key, FileDigest(config.cache)});
    const auto hallucinations = InStage("classify-hallucinations", [&] {
      return store.GetOrCompute<HallucinationRecord>(
          "hallucinations", cls_key, HallucinationFromJson,
          [](const HallucinationRecord& h) { return ToJson(h); },
          [&] {
            return ClassifyHallucinations(table.results, client ? &*client : nullptr,
                                          inventory.census);
          });
    });

    AlignmentCounts counts;
    if (auto it = table.counts.find(sys); it != table.counts.end()) counts = it->second;
    for (const auto& h : hallucinations) counts.hallucinated_gender_classified += h.verdict.gender ? 1 : 0;
    report.alignment[sys] = counts;

    std::optional<std::map<std::string, std::vector<double>>> vectors;
    if (config.similarity == "dense") vectors = LoadVectors(config.vectors.at(sys));
    const ScoringInputs si{&inputs, &records, &table, &hallucinations, &identifiers,
                           vectors ? &*vectors : nullptr};
    const auto scores = InStage("score", [&] {
      return ScoreSystem(sys, si, report.measures, scheme, config.replicates, config.smoothing, seed);
    });
    report.scores.insert(report.scores.end(), scores.begin(), scores.end());
    all_hallucinations.insert(all_hallucinations.end(), hallucinations.begin(), hallucinations.end());
  }
  report.hallucinations = TopHallucinations(all_hallucinations, config.top_k);

  WriteTextFile((fs::path(config.output_dir) / "report.md").string(),
                RenderReport(report, ReportFormat::kMarkdown));
  WriteTextFile((fs::path(config.output_dir) / "report.csv").string(),
                RenderReport(report, ReportFormat::kCsv));
  WriteTextFile((fs::path(config.output_dir) / "report.json").string(),
                RenderReport(report, ReportFormat::kJson));
  return report;
}

}  // namespace sumbias
