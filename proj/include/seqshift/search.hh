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

#ifndef SEQSHIFT_SEARCH_HH
#define SEQSHIFT_SEARCH_HH

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqshift/acoustic.hh"
#include "seqshift/lexicon.hh"
#include "seqshift/ngram.hh"
#include "seqshift/text.hh"
#include "seqshift/topology.hh"

namespace seqshift {

enum class VocabMode { kClosed, kOpen };

struct DecodeConfig {
    double lm_scale = 0.0;         // lambda
    double prior_scale = 0.0;      // alpha, prior or internal-LM scale
    double transition_scale = 1.0; // beta
    double length_norm = 0.0;      // delta, label-synchronous only
    size_t beam_size = 16;
    std::optional<double> score_margin;  // natural-log pruning margin
    VocabMode vocab_mode = VocabMode::kClosed;
    bool allow_silence = false;  // optional silence loop at the tree root
    size_t max_steps = 0;        // label-synchronous cap; 0 = scorer default
};

struct DecodeResult {
    std::vector<std::string> words;
    double log_score = kLogZero;
    bool found = false;
};

enum class TimeSyncModelKind { kFhTriphone, kFhDiphone, kCtc };

// Everything the time-synchronous tree decoder needs to score one frame.
// CTC uses the posteriorgram and a monophone prior (both including blank);
// the factored-hybrid kinds use the factor tables with a diphone or
// triphone prior over the context label space.
struct TimeSyncModel {
    TimeSyncModelKind kind = TimeSyncModelKind::kCtc;
    const Posteriorgram* pg = nullptr;
    const FactoredScores* factors = nullptr;
    const ContextPrior* prior = nullptr;
    TransitionModel transitions;

    int32_t num_frames() const;
};

// Prefix-tree Viterbi beam search realizing the hybrid-HMM and CTC
// decision rules: acoustic/prior scores per frame, beta-scaled loop and
// forward transitions for the HMM kinds, the word LM applied at word ends
// with scale lambda.
DecodeResult decode_time_sync(const TimeSyncModel& model, const PrefixTree& tree,
                              const Lexicon& lexicon, const NGramModel& lm,
                              const DecodeConfig& cfg);

// Step posteriors of a transducer: a distribution over output units plus
// blank per frame, conditioned on the emitted unit history truncated to
// the scorer's context order.
class TransducerScorer {
public:
    virtual ~TransducerScorer() = default;
    virtual int32_t num_frames() const = 0;
    virtual const LabelSet& output_labels() const = 0;  // units, no blank
    virtual int context_order() const = 0;
    virtual TransducerStep step(int32_t t,
                                const std::vector<LabelId>& history) const = 0;
};

// Context-independent scorer backed by a posteriorgram whose label set
// includes blank (table-driven artifact).
class PosteriorgramTransducerScorer : public TransducerScorer {
public:
    explicit PosteriorgramTransducerScorer(const Posteriorgram* pg);
    int32_t num_frames() const override { return pg_->num_frames; }
    const LabelSet& output_labels() const override { return units_; }
    int context_order() const override { return 0; }
    TransducerStep step(int32_t t, const std::vector<LabelId>& history) const override;

private:
    const Posteriorgram* pg_;
    LabelSet units_;
    LabelId blank_;
};

// Closed mode: prefix tree over unit-id sequences plus a word-level LM at
// word ends; `words` names the word ids stored in the tree. Open mode:
// free unit search with a subword-level LM per emitted token; hypotheses
// must end on a word-final unit. The internal LM is divided out of every
// non-blank emission with scale alpha.
DecodeResult decode_transducer(const TransducerScorer& scorer, const IlmModel& ilm,
                               const NGramModel& lm, const PrefixTree* tree,
                               const Vocabulary* words, const DecodeConfig& cfg);

// Prefix tree for closed-vocabulary transducer decoding: pronunciations
// mapped into the scorer's unit-id space.
PrefixTree build_transducer_tree(const Lexicon& lexicon, const LabelSet& units);

// Likewise for subword units: every vocabulary word segmented by the BPE
// model, arcs labeled with unit ids.
PrefixTree build_subword_tree(const Vocabulary& words, const BpeModel& bpe,
                              const LabelSet& units);

// Step posteriors of a label-synchronous model: P(y | prefix) over output
// units plus an explicit end-of-sequence event.
class LabelSyncScorer {
public:
    virtual ~LabelSyncScorer() = default;
    virtual const LabelSet& output_labels() const = 0;
    virtual size_t max_steps() const = 0;
    virtual void step(const std::vector<LabelId>& prefix,
                      std::vector<double>& label_log_probs,
                      double& eos_log_prob) const = 0;
};

// Label-synchronous beam search with length normalization: per step adds
// log P_AM - alpha log P_ILM + lambda log P_LM; terminated hypotheses
// compare by score - delta * log(length).
DecodeResult decode_label_sync(const LabelSyncScorer& scorer, const IlmModel& ilm,
                               const NGramModel& lm, const DecodeConfig& cfg);

}  // namespace seqshift

#endif  // SEQSHIFT_SEARCH_HH
