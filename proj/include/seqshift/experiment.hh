// Copyright 2026  The seqshift authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQSHIFT_EXPERIMENT_HH
#define SEQSHIFT_EXPERIMENT_HH

#include <string>
#include <vector>

#include "seqshift/emitter.hh"
#include "seqshift/report.hh"
#include "seqshift/search.hh"
#include "seqshift/wer.hh"

namespace seqshift {

enum class ModelKind { kCtc, kFhDiphone, kFhTriphone, kTransducer, kAed };

// Scorer artifacts of one model on one dataset, one entry per utterance.
struct ModelData {
    std::vector<Posteriorgram> pg;                        // ctc / transducer
    std::vector<FactoredScores> factors;                  // fh kinds
    std::vector<std::vector<std::vector<double>>> aed_rows;  // label-sync tables
};

struct ExperimentModel {
    std::string name;
    ModelKind kind = ModelKind::kCtc;
    std::string unit_label = "Phon";   // report column
    std::string context_label = "0";   // report column
    VocabMode vocab_mode = VocabMode::kClosed;
    double bias_weight = 0.0;  // baked internal-LM weight of the synthetic scorer
    IlmModel ilm;              // subtracted during decoding (alpha-scaled)
    ContextPrior prior;        // ctc/fh kinds
    LabelSet units;            // transducer/aed output units
    PrefixTree tree;           // closed-vocabulary tree (unit or phoneme ids)
    BpeModel bpe;              // subword models
    std::vector<ModelData> data;  // one per dataset
};

struct ExperimentLm {
    std::string name;
    NGramModel word;               // word-level model
    bool has_subword = false;
    NGramModel subword;            // required by open-vocabulary/label-sync models
};

struct ExperimentDataset {
    std::string name;
    std::string role;  // "dev" or "test"
    std::vector<std::vector<std::string>> references;
};

struct DecodeGrid {
    std::vector<double> lm_scales = {0.4, 0.6, 0.8, 1.0, 1.2};
    std::vector<double> prior_scales = {0.0, 0.2, 0.4, 0.6};
    std::vector<double> length_norms = {0.0, 0.5, 1.0};
};

struct ExperimentSpec {
    Lexicon lexicon;
    std::vector<ExperimentLm> lms;
    std::vector<ExperimentDataset> datasets;
    std::vector<ExperimentModel> models;
    DecodeGrid grid;
    size_t beam_size = 16;
    double transition_loop = 0.5;  // HMM transition model
};

// Decodes one utterance of one dataset under one model and LM.
DecodeResult decode_utterance(const ExperimentSpec& spec, const ExperimentModel& model,
                              const ExperimentLm& lm, size_t dataset, size_t utterance,
                              const DecodeConfig& cfg);

// Aggregate WER of a model over a dataset. The parallel version fans out
// over utterances with OpenMP; the serial one is the reference kept for
// testing and benchmarking. Both accumulate per-utterance reports in
// utterance order, so results are identical.
WerReport decode_dataset(const ExperimentSpec& spec, const ExperimentModel& model,
                         const ExperimentLm& lm, size_t dataset,
                         const DecodeConfig& cfg);
WerReport decode_dataset_serial(const ExperimentSpec& spec,
                                const ExperimentModel& model, const ExperimentLm& lm,
                                size_t dataset, const DecodeConfig& cfg);

struct CellResult {
    WerReport report;
    DecodeConfig config;  // the dev-selected configuration
};

struct ExperimentResults {
    // cells[model][lm][dataset]
    std::vector<std::vector<std::vector<CellResult>>> cells;
};

// For each (model, LM): pick the grid configuration minimizing aggregate
// dev WER (ties toward the smaller lm scale, then prior scale, then
// length norm), then decode every dataset with it. Test sets never
// influence the selection: it sees dev aggregates only.
ExperimentResults run_experiment(const ExperimentSpec& spec);

// The grid-selection rule, exposed for tests: dev WER argmin with ties to
// the earliest grid entry.
DecodeConfig select_config(const DecodeGrid& grid,
                           const std::vector<std::pair<DecodeConfig, double>>& dev_wer);

// Result tables in the comparative layout, one per LM.
std::vector<WerTable> results_to_tables(const ExperimentSpec& spec,
                                        const ExperimentResults& results);
std::string emit_report(const std::vector<WerTable>& tables, ReportFormat format);

// --- spec assembly -------------------------------------------------------

// Synthesizes all scorer artifacts in memory: per-utterance noise streams
// derive from (seed, dataset, utterance) and are shared across models, so
// every model faces the same synthetic acoustic conditions. The model
// list must be fully configured (kind, ilm, prior, units, tree, bpe).
void synthesize_experiment_data(ExperimentSpec& spec, const EmitterConfig& emitter);

// Loads the JSON experiment description (schema "seqshift-exp/1"),
// resolving and validating every referenced file before any decoding.
ExperimentSpec load_experiment_spec(const std::string& json_path);

}  // namespace seqshift

#endif  // SEQSHIFT_EXPERIMENT_HH
