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

#ifndef SUMBIAS_PIPELINE_H_
#define SUMBIAS_PIPELINE_H_

// End-to-end evaluation: corpus -> templates -> perturbed inputs ->
// summaries -> alignment -> hallucination classification -> scores ->
// report. Each stage is callable on its own; `RunPipeline` chains them and
// reuses intermediate artifacts addressed by (stage, configuration hash).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumbias/alignment.h"
#include "sumbias/classifier.h"
#include "sumbias/corpus.h"
#include "sumbias/measures.h"
#include "sumbias/name_inventory.h"
#include "sumbias/perturbation.h"
#include "sumbias/summary_io.h"
#include "sumbias/synthetic.h"
#include "sumbias/template_builder.h"

namespace sumbias {

struct PipelineConfig {
  std::string corpus;
  std::string content_spans;  // optional
  std::string scheme = "gender_local";
  int variants = 20;
  bool alter_last_names = false;
  std::string sampling = "uniform";  // or "weighted"
  std::optional<uint64_t> seed;
  std::string word_lists;  // empty: built-in gender identifier lists
  std::string census_male;
  std::string census_female;
  std::string race_names;
  std::string last_names;
  std::map<std::string, std::string> summaries;  // system -> JSONL path
  std::map<std::string, SyntheticSummarizer> synthetic;  // system -> stand-in
  std::string ner_side_file;
  std::string cache;  // encyclopedia fixture cache
  std::string similarity = "bow";  // or "dense"
  std::map<std::string, std::string> vectors;  // system -> dense vector JSONL
  std::string output_dir;
  int replicates = 1000;
  double smoothing = 0.5;
  int top_k = 10;
  std::vector<std::string> measures;  // empty: defaults for the scheme

  // Relative paths are resolved against `base_dir`.
  static PipelineConfig FromJson(const nlohmann::json& j, const std::string& base_dir = "");
  static PipelineConfig FromFile(const std::string& path);
  nlohmann::json ToJson() const;
  // Seed present, numbers in range, referenced files exist. Throws
  // UsageError, LoadError, or StageError("summaries", system, ...) for a
  // missing summary file.
  void Validate() const;
  std::vector<std::string> EffectiveMeasures() const;
  AssignmentScheme Scheme() const;
};

inline constexpr const char* kMeasureWordListUniform = "word_list_uniform";
inline constexpr const char* kMeasureWordListAdjusted = "word_list_adjusted";
inline constexpr const char* kMeasureEntityInclusion = "entity_inclusion";
inline constexpr const char* kMeasureHallucination = "hallucination";
inline constexpr const char* kMeasureDistinguishability = "distinguishability";

NameInventory LoadInventory(const PipelineConfig& config);
WordLists LoadIdentifierLists(const PipelineConfig& config);

struct HallucinationRecord {
  std::string input_id;
  std::string system;
  std::vector<std::string> tokens;
  GenderVerdict verdict;
};
nlohmann::json ToJson(const HallucinationRecord& h);
HallucinationRecord HallucinationFromJson(const nlohmann::json& j);

// Classifies every hallucinated alignment result. Parallel over results.
std::vector<HallucinationRecord> ClassifyHallucinations(const std::vector<AlignmentResult>& results,
                                                        LookupClient* client,
                                                        const GenderNameTable& names);

struct ScoringInputs {
  const std::vector<GeneratedInput>* inputs;
  const std::vector<SummaryRecord>* records;  // one system
  const AlignmentTable* alignment;
  const std::vector<HallucinationRecord>* hallucinations;  // one system
  const WordLists* identifiers;
  // input id -> dense vector, when similarity is "dense".
  const std::map<std::string, std::vector<double>>* vectors = nullptr;
};

// Scores of one system for the requested measures.
std::vector<ScoreWithCI> ScoreSystem(const std::string& system, const ScoringInputs& in,
                                     const std::vector<std::string>& measures,
                                     const AssignmentScheme& scheme, int replicates,
                                     double smoothing, uint64_t seed);

std::map<std::string, std::vector<double>> LoadVectors(const std::string& path);

struct HallucinationCount {
  std::string entity;  // lowercased
  long count = 0;
  std::string gender;  // "m", "f" or "u"
};

struct BiasReport {
  nlohmann::json config;
  std::vector<std::string> systems;
  std::vector<std::string> measures;
  std::vector<ScoreWithCI> scores;
  std::map<std::string, AlignmentCounts> alignment;
  std::map<std::string, std::vector<HallucinationCount>> hallucinations;
  std::vector<std::string> diagnostics;
};

// Most frequent hallucinated entities per system, count descending.
std::map<std::string, std::vector<HallucinationCount>> TopHallucinations(
    const std::vector<HallucinationRecord>& records, int top_k);

nlohmann::json ToJson(const BiasReport& r);
BiasReport ReportFromJson(const nlohmann::json& j);

enum class ReportFormat { kMarkdown, kCsv, kJson };
std::optional<ReportFormat> ParseReportFormat(std::string_view s);
std::string RenderReport(const BiasReport& r, ReportFormat format);

// Runs every stage, writing artifacts under output_dir/artifacts and
// report.{md,csv,json} under output_dir.
BiasReport RunPipeline(const PipelineConfig& config);

// Digest of a file's bytes (FNV-1a, hex); "-" for an empty path.
std::string FileDigest(const std::string& path);

}  // namespace sumbias

#endif  // SUMBIAS_PIPELINE_H_
