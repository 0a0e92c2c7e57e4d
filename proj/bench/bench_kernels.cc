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


// Parallel kernels against their serial references. Set OMP_NUM_THREADS
// to compare thread counts.

#include <benchmark/benchmark.h>

#include <set>

#include "sumbias/alignment.h"
#include "sumbias/input_bias.h"
#include "sumbias/measures.h"
#include "sumbias/pipeline.h"

namespace sumbias {
namespace {

const std::string kData = SUMBIAS_DATA_DIR;

struct Fixture {
  std::vector<DocumentTemplate> templates;
  NameInventory inventory;
  std::vector<GeneratedInput> inputs;
  std::vector<SummaryRecord> records;
  std::vector<DistinguishItem> items;
  std::vector<BootstrapUnit> units;
  std::vector<SentenceDocument> docs;

  Fixture() {
    const auto config = PipelineConfig::FromFile(kData + "/fixtures/toy_config.json");
    inventory = LoadInventory(config);
    const auto spans = LoadContentWordSpans(config.content_spans);
    for (const auto& d : LoadCorpus(config.corpus)) {
      auto it = spans.find(d.id());
      templates.push_back(BuildTemplate(d, it == spans.end() ? std::vector<ContentWordSpan>{} : it->second));
    }
    inputs = GenerateCorpus(templates, AssignmentScheme{}, 1, inventory).inputs;
    SyntheticSummarizer s;
    s.kind = SyntheticKind::kKeepRate;
    s.keep_rate = {{"male", 0.8}, {"female", 0.4}};
    std::set<std::string> ids;
    for (const auto& in : inputs) ids.insert(in.id);
    records = SummariesFromJson(SynthesizeSummaries(inputs, "s", s, 2), ids);
    AttachEntities(records, BuildLexicon(inputs, inventory.census, inventory.race));

    AssignmentScheme global;
    global.kind = SchemeKind::kGenderGlobal;
    BagOfWords bow;
    for (const auto& in : GenerateCorpus(templates, global, 1, inventory).inputs) {
      items.push_back({in.original_id, in.assignments.front().group, in.variant, bow.Encode(in.tokens)});
    }
    for (const auto& in : inputs) {
      units.push_back({in.original_id, in.variant,
                       {static_cast<double>(in.assignments.size() % 3), 1.0, 2.0, 1.0}});
    }
    SyntheticCorpusConfig c;
    c.documents = 2000;
    docs = GenerateSyntheticCorpus(c);
  }
};

const Fixture& F() {
  static const Fixture* f = new Fixture;
  return *f;
}

std::optional<double> RatioScore(const std::vector<double>& c) {
  return EntityInclusion({{"a", {c[0], c[1] * 3}}, {"b", {c[2], c[3] * 3}}});
}

void BM_Generate(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(GenerateCorpus(F().templates, AssignmentScheme{}, 3, F().inventory));
}
void BM_GenerateSerial(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(GenerateCorpusSerial(F().templates, AssignmentScheme{}, 3, F().inventory));
  }
}
void BM_Align(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(AlignCorpus(F().records, F().inputs));
}
void BM_AlignSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(AlignCorpusSerial(F().records, F().inputs));
}
void BM_Distinguishability(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(Distinguishability(F().items));
}
void BM_DistinguishabilitySerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(DistinguishabilitySerial(F().items));
}
void BM_Bootstrap(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(Bootstrap(F().units, RatioScore, BootstrapAxis::kDocuments, 1000, 1));
}
void BM_BootstrapSerial(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(BootstrapSerial(F().units, RatioScore, BootstrapAxis::kDocuments, 1000, 1));
  }
}
void BM_Simulation(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(SimulationExperiment(F().docs, HelmWordLists(), TopicWordLists(), 1));
}
void BM_SimulationSerial(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(SimulationExperimentSerial(F().docs, HelmWordLists(), TopicWordLists(), 1));
  }
}

BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Align)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlignSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Distinguishability)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistinguishabilitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulation)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulationSerial)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sumbias

BENCHMARK_MAIN();
