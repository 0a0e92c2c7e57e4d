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


// Command-line front end. Each stage can run on its own over JSONL files, or
// `run` executes the whole chain from one config file.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sumbias/alignment.h"
#include "sumbias/classifier.h"
#include "sumbias/corpus.h"
#include "sumbias/errors.h"
#include "sumbias/input_bias.h"
#include "sumbias/jsonl.h"
#include "sumbias/measures.h"
#include "sumbias/perturbation.h"
#include "sumbias/pipeline.h"
#include "sumbias/summary_io.h"
#include "sumbias/synthetic.h"
#include "sumbias/template_builder.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sumbias;

namespace {

// Settings shared by several subcommands. Values given on the command line
// win over the config file.
struct Common {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string scheme;
  std::optional<int> variants;
  std::optional<int> replicates;
  bool alter_last_names = false;
  std::string sampling;
  std::string census_male;
  std::string census_female;
  std::string race_names;
  std::string last_names;
  std::string word_lists;
  std::string cache;
  std::string output_dir;

  PipelineConfig Resolve() const {
    PipelineConfig c;
    if (!config_path.empty()) c = PipelineConfig::FromFile(config_path);
    if (seed) c.seed = seed;
    if (!scheme.empty()) c.scheme = scheme;
    if (variants) c.variants = *variants;
    if (replicates) c.replicates = *replicates;
    if (alter_last_names) c.alter_last_names = true;
    if (!sampling.empty()) c.sampling = sampling;
    if (!census_male.empty()) c.census_male = census_male;
    if (!census_female.empty()) c.census_female = census_female;
    if (!race_names.empty()) c.race_names = race_names;
    if (!last_names.empty()) c.last_names = last_names;
    if (!word_lists.empty()) c.word_lists = word_lists;
    if (!cache.empty()) c.cache = cache;
    if (!output_dir.empty()) c.output_dir = output_dir;
    return c;
  }
};

void AddConfig(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON config; flags override its values")
      ->check(CLI::ExistingFile);
}
void AddSeed(CLI::App* app, Common& c) { app->add_option("--seed", c.seed, "Master seed"); }
void AddNames(CLI::App* app, Common& c) {
  app->add_option("--census-male", c.census_male, "Male first-name table");
  app->add_option("--census-female", c.census_female, "Female first-name table");
  app->add_option("--race-names", c.race_names, "Race-coded name file (JSON)");
  app->add_option("--last-names", c.last_names, "Last-name list for --alter-last-names");
}

uint64_t RequireSeed(const PipelineConfig& c) {
  if (!c.seed) throw UsageError("a seed is required (--seed or \"seed\" in the config)");
  return *c.seed;
}

void RequireNames(const PipelineConfig& c) {
  if (c.census_male.empty() || c.census_female.empty()) {
    throw UsageError("census name tables are required (--census-male/--census-female)");
  }
}

template <typename T, typename F>
std::vector<T> ReadRows(const std::string& path, F from_json) {
  std::vector<T> out;
  for (const auto& row : ReadJsonl(path)) out.push_back(from_json(row));
  return out;
}

template <typename T>
void WriteRows(const std::string& path, const std::vector<T>& items) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(ToJson(item));
  WriteJsonl(path, rows);
}

std::string SiblingCsv(const std::string& json_path) {
  fs::path p(json_path);
  p.replace_extension(".csv");
  return p.string();
}

std::string Num(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

std::string SimulationCsv(const SimulationResult& r) {
  std::ostringstream os;
  os << "algorithm,uniform,adjusted,male,female\n";
  for (const auto& row : r.rows) {
    auto count = [&](const char* g) {
      auto it = row.identifier_counts.find(g);
      return it == row.identifier_counts.end() ? 0.0 : it->second;
    };
    os << row.algorithm << ',' << Num(row.uniform) << ',' << Num(row.adjusted) << ','
       << count("male") << ',' << count("female") << '\n';
  }
  return os.str();
}

std::string FightinWordsCsv(const FightinWordsResult& r, size_t top_k) {
  std::ostringstream os;
  os << "side,token,count_" << r.group_a << ",count_" << r.group_b << ",delta,z\n";
  auto emit = [&](const std::string& side, const FightinWordsEntry& e) {
    os << side << ',' << e.token << ',' << e.count_a << ',' << e.count_b << ',' << e.delta << ','
       << e.z << '\n';
  };
  const size_t n = r.entries.size();
  for (size_t i = 0; i < std::min(top_k, n); ++i) emit(r.group_a, r.entries[i]);
  for (size_t i = 0; i < std::min(top_k, n); ++i) emit(r.group_b, r.entries[n - 1 - i]);
  return os.str();
}

std::vector<DocumentTemplate> BuildTemplates(const std::string& corpus,
                                             const std::string& content_words) {
  std::map<std::string, std::vector<ContentWordSpan>> spans;
  if (!content_words.empty()) spans = LoadContentWordSpans(content_words);
  std::vector<DocumentTemplate> out;
  for (const auto& doc : LoadCorpus(corpus)) {
    auto it = spans.find(doc.id());
    out.push_back(BuildTemplate(doc, it == spans.end() ? std::vector<ContentWordSpan>{} : it->second));
  }
  return out;
}

std::set<std::string> InputIds(const std::vector<GeneratedInput>& inputs) {
  std::set<std::string> ids;
  for (const auto& in : inputs) ids.insert(in.id);
  return ids;
}

int Fail(int code, const std::string& kind, const std::string& what) {
  std::cerr << "sumbias: " << kind << ": " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure demographic bias in summarization systems"};
  app.require_subcommand(1);
  Common common;

  // ingest
  std::string corpus_path, out_path;
  auto* ingest = app.add_subcommand("ingest", "Parse a CoNLL corpus into JSONL documents");
  ingest->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out_path)->required();

  // build-templates
  std::string content_words;
  auto* build = app.add_subcommand("build-templates", "Turn documents into entity templates");
  build->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  build->add_option("--content-words", content_words)->check(CLI::ExistingFile);
  build->add_option("--out", out_path)->required();

  // generate
  std::string templates_path, dropped_path;
  auto* generate = app.add_subcommand("generate", "Generate perturbed inputs from templates");
  auto* tpl_opt = generate->add_option("--templates", templates_path)->check(CLI::ExistingFile);
  auto* gen_corpus = generate->add_option("--corpus", corpus_path, "Build templates on the fly")
                         ->check(CLI::ExistingFile);
  tpl_opt->excludes(gen_corpus);
  generate->add_option("--content-words", content_words, "With --corpus")
      ->check(CLI::ExistingFile);
  generate->add_option("--scheme", common.scheme);
  generate->add_option("--variants", common.variants);
  generate->add_flag("--alter-last-names", common.alter_last_names);
  generate->add_option("--sampling", common.sampling)->check(CLI::IsMember({"uniform", "weighted"}));
  generate->add_option("--dropped", dropped_path, "Write dropped-original diagnostics here");
  generate->add_option("--out", out_path)->required();
  AddConfig(generate, common);
  AddSeed(generate, common);
  AddNames(generate, common);

  // align
  std::string inputs_path, summaries_path, ner_path, records_out;
  auto* align = app.add_subcommand("align", "Detect and align summary entities");
  align->add_option("--inputs", inputs_path)->required()->check(CLI::ExistingFile);
  align->add_option("--summaries", summaries_path)->required()->check(CLI::ExistingFile);
  align->add_option("--ner", ner_path, "Optional NER side file")->check(CLI::ExistingFile);
  align->add_option("--cache", common.cache, "Encyclopedia cache; titles extend the lexicon");
  align->add_option("--records-out", records_out, "Write summaries with detected entities");
  align->add_option("--out", out_path)->required();
  AddConfig(align, common);
  AddNames(align, common);

  // classify-hallucinations
  std::string alignments_path;
  auto* classify =
      app.add_subcommand("classify-hallucinations", "Assign a gender to hallucinated entities");
  classify->add_option("--alignments", alignments_path)->required()->check(CLI::ExistingFile);
  classify->add_option("--cache", common.cache)->check(CLI::ExistingFile);
  classify->add_option("--out", out_path)->required();
  AddConfig(classify, common);
  AddNames(classify, common);

  // score
  std::string records_path, hallucinations_path, vectors_path;
  std::vector<std::string> measures;
  double smoothing = 0.5;
  auto* score = app.add_subcommand("score", "Score systems with bootstrap intervals");
  score->add_option("--inputs", inputs_path)->required()->check(CLI::ExistingFile);
  score->add_option("--records", records_path, "Summaries with entities (align --records-out)")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--alignments", alignments_path)->required()->check(CLI::ExistingFile);
  score->add_option("--hallucinations", hallucinations_path)->check(CLI::ExistingFile);
  score->add_option("--vectors", vectors_path, "Dense vectors for distinguishability")
      ->check(CLI::ExistingFile);
  score->add_option("--measure", measures, "Repeatable; defaults depend on the scheme");
  score->add_option("--smoothing", smoothing);
  score->add_option("--scheme", common.scheme);
  score->add_option("--replicates", common.replicates);
  score->add_option("--word-lists", common.word_lists)->check(CLI::ExistingFile);
  score->add_option("--out", out_path)->required();
  AddConfig(score, common);
  AddSeed(score, common);

  // analyze-input-bias
  size_t top_k = 10;
  auto* analyze = app.add_subcommand("analyze-input-bias", "Fightin' Words over identifier splits");
  analyze->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  analyze->add_option("--word-lists", common.word_lists)->check(CLI::ExistingFile);
  analyze->add_option("--top-k", top_k);
  analyze->add_option("--out", out_path, "JSON; a CSV is written next to it")->required();

  // simulate-baselines
  std::string topic_words;
  auto* simulate = app.add_subcommand("simulate-baselines", "Score extractive baselines");
  simulate->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("--word-lists", common.word_lists)->check(CLI::ExistingFile);
  simulate->add_option("--topic-words", topic_words)->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "JSON; a CSV is written next to it")->required();
  AddSeed(simulate, common);

  // report
  std::string report_in, format = "markdown";
  auto* report = app.add_subcommand("report", "Render a stored report");
  report->add_option("--in", report_in, "report.json from `run`")->required()->check(CLI::ExistingFile);
  report->add_option("--format", format)->check(CLI::IsMember({"markdown", "csv", "json"}));
  report->add_option("--out", out_path, "Defaults to stdout");

  // run
  auto* run = app.add_subcommand("run", "Run every stage from a config file");
  run->add_option("--config", common.config_path)->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", common.output_dir);
  run->add_option("--scheme", common.scheme);
  run->add_option("--variants", common.variants);
  run->add_option("--replicates", common.replicates);
  AddSeed(run, common);

  // synth-corpus: the topic-correlated corpus used by the simulation.
  std::string synth_config;
  std::optional<size_t> synth_documents;
  auto* synth_corpus = app.add_subcommand("synth-corpus", "Write a synthetic topic corpus");
  synth_corpus->add_option("--config", synth_config, "Generator parameters (JSON)")
      ->check(CLI::ExistingFile);
  synth_corpus->add_option("--documents", synth_documents);
  synth_corpus->add_option("--seed", common.seed);
  synth_corpus->add_option("--out", out_path)->required();

  // synth-summaries: stand-in summaries for testing the measures.
  std::string system_name, summarizer_json;
  auto* synth_sum = app.add_subcommand("synth-summaries", "Write stand-in summaries");
  synth_sum->add_option("--inputs", inputs_path)->required()->check(CLI::ExistingFile);
  synth_sum->add_option("--system", system_name)->required();
  synth_sum->add_option("--summarizer", summarizer_json,
                        R"(JSON, e.g. {"kind":"keep_rate","keep_rate":{"male":0.8}})")
      ->required();
  synth_sum->add_option("--out", out_path)->required();
  AddSeed(synth_sum, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      const auto docs = ParseConllCorpus(corpus_path);
      size_t warnings = 0;
      for (const auto& d : docs) {
        for (const auto& diag : ValidateDocument(d)) {
          std::cerr << d.id() << ": " << diag.code << ": " << diag.message << '\n';
          ++warnings;
        }
      }
      WriteRows(out_path, docs);
      std::cerr << docs.size() << " documents, " << warnings << " warnings\n";
    } else if (*build) {
      const auto templates = BuildTemplates(corpus_path, content_words);
      size_t eligible = 0;
      for (const auto& t : templates) eligible += t.eligible ? 1 : 0;
      WriteRows(out_path, templates);
      std::cerr << templates.size() << " templates, " << eligible << " eligible\n";
    } else if (*generate) {
      PipelineConfig cfg = common.Resolve();
      const uint64_t seed = RequireSeed(cfg);
      RequireNames(cfg);
      std::vector<DocumentTemplate> templates;
      if (!templates_path.empty()) {
        templates = ReadRows<DocumentTemplate>(templates_path, TemplateFromJson);
      } else if (!corpus_path.empty()) {
        templates = BuildTemplates(corpus_path, content_words);
      } else if (!cfg.corpus.empty()) {
        templates = BuildTemplates(cfg.corpus, cfg.content_spans);
      } else {
        throw UsageError("generate needs --templates or --corpus");
      }
      if (cfg.variants < 2 || cfg.variants % 2 != 0) {
        throw UsageError("--variants must be even and at least 2");
      }
      const auto result = GenerateCorpus(templates, cfg.Scheme(), seed, LoadInventory(cfg));
      WriteRows(out_path, result.inputs);
      for (const auto& d : result.dropped) std::cerr << d.code << ": " << d.message << '\n';
      if (!dropped_path.empty()) {
        std::vector<json> rows;
        for (const auto& d : result.dropped) rows.push_back({{"code", d.code}, {"message", d.message}});
        WriteJsonl(dropped_path, rows);
      }
      std::cerr << result.inputs.size() << " inputs, " << result.dropped.size()
                << " originals dropped\n";
    } else if (*align) {
      PipelineConfig cfg = common.Resolve();
      RequireNames(cfg);
      const auto inputs = ReadRows<GeneratedInput>(inputs_path, GeneratedInputFromJson);
      auto records = LoadSummaries(summaries_path, InputIds(inputs));
      std::vector<std::string> extra;
      if (!cfg.cache.empty()) extra = FixtureLookupClient::FromFile(cfg.cache).PersonTitles();
      const NameInventory inventory = LoadInventory(cfg);
      const EntityLexicon lexicon = BuildLexicon(inputs, inventory.census, inventory.race, extra);
      std::optional<NerSideFile> side;
      if (!ner_path.empty()) side = LoadNerSideFile(ner_path);
      AttachEntities(records, lexicon, side ? &*side : nullptr);
      const AlignmentTable table = AlignCorpus(records, inputs);
      WriteRows(out_path, table.results);
      if (!records_out.empty()) WriteRows(records_out, records);
      for (const auto& [sys, c] : table.counts) {
        std::cerr << sys << ": " << c.summary_entities << " summary entities, " << c.aligned
                  << " aligned, " << c.hallucinated << " hallucinated, " << c.unresolved
                  << " unresolved\n";
      }
    } else if (*classify) {
      PipelineConfig cfg = common.Resolve();
      RequireNames(cfg);
      const auto results = ReadRows<AlignmentResult>(alignments_path, AlignmentResultFromJson);
      std::optional<FixtureLookupClient> client;
      if (!cfg.cache.empty()) client.emplace(FixtureLookupClient::FromFile(cfg.cache));
      const auto census = ResolveAmbiguous(LoadCensus(cfg.census_male, cfg.census_female));
      WriteRows(out_path, ClassifyHallucinations(results, client ? &*client : nullptr, census));
    } else if (*score) {
      PipelineConfig cfg = common.Resolve();
      const uint64_t seed = RequireSeed(cfg);
      if (!measures.empty()) cfg.measures = measures;
      cfg.smoothing = smoothing;
      if (cfg.replicates < 2) throw UsageError("--replicates must be at least 2");
      const auto inputs = ReadRows<GeneratedInput>(inputs_path, GeneratedInputFromJson);
      const auto records = ReadRows<SummaryRecord>(records_path, SummaryRecordFromJson);
      auto results = ReadRows<AlignmentResult>(alignments_path, AlignmentResultFromJson);
      std::vector<HallucinationRecord> hallucinations;
      if (!hallucinations_path.empty()) {
        hallucinations = ReadRows<HallucinationRecord>(hallucinations_path, HallucinationFromJson);
      }
      const AlignmentTable table = TableFromResults(records, inputs, std::move(results));
      const WordLists identifiers = LoadIdentifierLists(cfg);
      std::optional<std::map<std::string, std::vector<double>>> vectors;
      if (!vectors_path.empty()) vectors = LoadVectors(vectors_path);

      std::map<std::string, std::vector<SummaryRecord>> by_system;
      for (const auto& r : records) by_system[r.system].push_back(r);
      std::map<std::string, std::vector<HallucinationRecord>> hall_by_system;
      for (const auto& h : hallucinations) hall_by_system[h.system].push_back(h);
      json out = json::array();
      for (const auto& [sys, recs] : by_system) {
        const ScoringInputs si{&inputs, &recs, &table, &hall_by_system[sys], &identifiers,
                               vectors ? &*vectors : nullptr};
        for (const auto& s : ScoreSystem(sys, si, cfg.EffectiveMeasures(), cfg.Scheme(),
                                         cfg.replicates, cfg.smoothing, seed)) {
          out.push_back(ToJson(s));
        }
      }
      WriteTextFile(out_path, out.dump(2) + "\n");
    } else if (*analyze) {
      const auto docs = LoadSentenceDocuments(corpus_path);
      const WordLists lists =
          common.word_lists.empty() ? HelmWordLists() : LoadWordLists(common.word_lists);
      const auto result = AnalyzeInputBias(docs, lists);
      WriteTextFile(out_path, ToJson(result, top_k).dump(2) + "\n");
      WriteTextFile(SiblingCsv(out_path), FightinWordsCsv(result, top_k));
    } else if (*simulate) {
      if (!common.seed) throw UsageError("simulate-baselines needs --seed");
      const auto docs = LoadSentenceDocuments(corpus_path);
      const WordLists lists =
          common.word_lists.empty() ? HelmWordLists() : LoadWordLists(common.word_lists);
      const WordLists topics = topic_words.empty() ? TopicWordLists() : LoadWordLists(topic_words);
      const auto result = SimulationExperiment(docs, lists, topics, *common.seed);
      WriteTextFile(out_path, ToJson(result).dump(2) + "\n");
      WriteTextFile(SiblingCsv(out_path), SimulationCsv(result));
    } else if (*report) {
      const auto fmt = ParseReportFormat(format);
      const std::string text = RenderReport(ReportFromJson(ReadJsonFile(report_in)), *fmt);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        WriteTextFile(out_path, text);
      }
    } else if (*run) {
      const PipelineConfig cfg = common.Resolve();
      const BiasReport r = RunPipeline(cfg);
      std::cerr << "wrote " << (fs::path(cfg.output_dir) / "report.md").string() << " ("
                << r.scores.size() << " scores)\n";
    } else if (*synth_corpus) {
      SyntheticCorpusConfig synth;
      if (!synth_config.empty()) synth = SyntheticCorpusConfigFromJson(ReadJsonFile(synth_config));
      if (synth_documents) synth.documents = *synth_documents;
      if (common.seed) synth.seed = *common.seed;
      WriteRows(out_path, GenerateSyntheticCorpus(synth));
    } else if (*synth_sum) {
      if (!common.seed) throw UsageError("synth-summaries needs --seed");
      json summarizer;
      try {
        summarizer = json::parse(summarizer_json);
      } catch (const json::exception& e) {
        throw UsageError(std::string("--summarizer is not valid JSON: ") + e.what());
      }
      const auto inputs = ReadRows<GeneratedInput>(inputs_path, GeneratedInputFromJson);
      WriteJsonl(out_path, SynthesizeSummaries(inputs, system_name,
                                               SyntheticSummarizerFromJson(summarizer), *common.seed));
    }
  } catch (const UsageError& e) {
    return Fail(1, "usage error", e.what());
  } catch (const DataError& e) {
    return Fail(2, "data error", e.what());
  } catch (const StageError& e) {
    return Fail(3, "stage '" + e.stage() + "' failed", e.what());
  } catch (const Error& e) {
    return Fail(3, "error", e.what());
  } catch (const json::exception& e) {
    return Fail(2, "data error", e.what());
  } catch (const std::exception& e) {
    return Fail(3, "error", e.what());
  }
  return 0;
}
