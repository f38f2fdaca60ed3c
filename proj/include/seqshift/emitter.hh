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

#ifndef SEQSHIFT_EMITTER_HH
#define SEQSHIFT_EMITTER_HH

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seqshift/acoustic.hh"
#include "seqshift/lexicon.hh"
#include "seqshift/search.hh"

namespace seqshift {

struct DurationModel {
    int32_t fixed = 2;                         // frames per label
    std::map<std::string, int32_t> table;      // per-label overrides

    int32_t frames_for(const std::string& label) const {
        auto it = table.find(label);
        return it == table.end() ? fixed : it->second;
    }
};

struct EmitterConfig {
    double temperature = 0.0;  // noise scale
    double gain = 50.0;        // logit gain on the reference label
    DurationModel durations;
    uint64_t seed = 1;
};

// Deterministic per-label frame counts; total frames is their sum.
std::vector<int32_t> sample_durations(const LabelSet& labels,
                                      const std::vector<LabelId>& sequence,
                                      const EmitterConfig& cfg);

// Per-frame reference labels after duration expansion.
std::vector<LabelId> expand_durations(const std::vector<LabelId>& sequence,
                                      const std::vector<int32_t>& durations);

// Synthetic posteriorgram over the given label set: each frame's logits
// are gain * onehot(reference) + temperature * noise, row-normalized.
// Identical config (including seed) gives bit-identical output.
Posteriorgram synth_posteriorgram(const LabelSet& labels,
                                  const std::vector<LabelId>& label_sequence,
                                  const EmitterConfig& cfg);

// Spiky variant for strictly monotonic transducers: each unit is the
// target of the first frame of its duration, the remaining frames target
// blank. The label set must contain the blank symbol.
Posteriorgram synth_transducer_posteriorgram(const LabelSet& labels,
                                             const std::vector<LabelId>& units,
                                             const EmitterConfig& cfg);

// All scorers of one utterance derived from a single noise draw, so every
// model kind faces the same synthetic acoustics: a phoneme posteriorgram
// (with blank) and factor tables expanded from the reference contexts.
struct UtteranceScores {
    Posteriorgram phones;            // inventory + blank
    FactoredScores factors;
    std::vector<LabelId> frame_centers;  // reference alignment, inventory ids
    std::vector<LabelId> frame_lefts;    // context-space ids
    std::vector<LabelId> frame_rights;
};

// Words are spelled with their first pronunciation; contexts are
// word-internal with the boundary symbol at word edges.
UtteranceScores synth_word_scores(const Lexicon& lexicon,
                                  const std::vector<TokenId>& words,
                                  const EmitterConfig& cfg);

// Transducer step posteriors synthesized from a posteriorgram with an
// internal-LM bias baked in: the blank mass of each frame is kept, the
// label mass is reweighted by P_bias(y|history)^weight. With a null bias
// (or weight 0) the scorer is context-independent.
class BiasedTransducerScorer : public TransducerScorer {
public:
    BiasedTransducerScorer(const Posteriorgram* pg, const IlmModel* bias,
                           double weight);

    int32_t num_frames() const override { return pg_->num_frames; }
    const LabelSet& output_labels() const override { return units_; }
    int context_order() const override;
    TransducerStep step(int32_t t, const std::vector<LabelId>& history) const override;

private:
    const Posteriorgram* pg_;
    const IlmModel* bias_;
    double weight_;
    LabelSet units_;
    LabelId blank_;
    std::vector<LabelId> unit_to_pg_;
};

// Label-synchronous step tables: row m is peaked on the m-th reference
// unit (the final row on the end symbol), optionally reweighted by a
// baked internal LM over the hypothesis prefix.
class PositionalLabelSyncScorer : public LabelSyncScorer {
public:
    // rows: max_steps rows of size units+1, the last entry being the end
    // symbol's log-probability.
    PositionalLabelSyncScorer(LabelSet units, std::vector<std::vector<double>> rows,
                              const IlmModel* bias, double weight);

    const LabelSet& output_labels() const override { return units_; }
    size_t max_steps() const override { return rows_.size(); }
    void step(const std::vector<LabelId>& prefix, std::vector<double>& label_log_probs,
              double& eos_log_prob) const override;

private:
    LabelSet units_;
    std::vector<std::vector<double>> rows_;
    const IlmModel* bias_;
    double weight_;
};

// Step tables for one utterance: one row per reference unit plus the
// closing end-symbol row.
std::vector<std::vector<double>> synth_label_sync_rows(
        const LabelSet& units, const std::vector<LabelId>& reference,
        const EmitterConfig& cfg);

// --- synthetic test sets ----------------------------------------------

struct SynthUtterance {
    std::string id;
    std::string pgm_path;
    std::vector<std::string> reference;
};

struct SynthSet {
    std::vector<SynthUtterance> utterances;
    double tau = 0.0;
    uint64_t seed = 0;
};

void write_synth_manifest(const SynthSet& set, const std::string& path);
SynthSet read_synth_manifest(const std::string& path);

// Generates posteriorgram files (one per reference line) plus a manifest.
// Utterances draw independent substreams of cfg.seed, so generation order
// and threading do not change the artifacts. Parallel across utterances.
SynthSet generate_synth_set(const Lexicon& lexicon,
                            const std::vector<std::vector<std::string>>& references,
                            const EmitterConfig& cfg, const std::string& out_dir,
                            const std::string& manifest_path);

// --- calibration --------------------------------------------------------

struct CalibrationResult {
    double tau = 0.0;
    double mean_wer = 0.0;
    double spread = 0.0;  // max - min across seeds at the returned tau
    std::vector<double> per_seed_wer;
};

// Mean word error rate of a decoding run for one (tau, seed) pair.
using WerProbe = std::function<double(double tau, uint64_t seed)>;

// Bisection on tau in [0, tau_max] against the mean WER over the given
// seeds. Accepts as soon as the mean is within tolerance of the target;
// throws when the target is outside the reachable bracket.
CalibrationResult calibrate_tau(const WerProbe& probe, double target_wer,
                                double tolerance, double tau_max,
                                const std::vector<uint64_t>& seeds,
                                int max_iterations = 40);

}  // namespace seqshift

#endif  // SEQSHIFT_EMITTER_HH
