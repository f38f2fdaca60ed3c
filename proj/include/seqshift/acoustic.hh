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

#ifndef SEQSHIFT_ACOUSTIC_HH
#define SEQSHIFT_ACOUSTIC_HH

#include <string>
#include <unordered_map>
#include <vector>

#include "seqshift/common.hh"
#include "seqshift/lexicon.hh"
#include "seqshift/ngram.hh"

namespace seqshift {

using LabelId = int32_t;

// Ordered label alphabet shared by scorers and search.
class LabelSet {
public:
    static const char* blank_symbol() { return "<blank>"; }
    static const char* boundary_symbol() { return "<wb>"; }

    LabelSet() = default;
    explicit LabelSet(const std::vector<std::string>& labels);

    LabelId add(const std::string& label);
    LabelId id(const std::string& label) const;  // throws on unknown label
    bool contains(const std::string& label) const;
    const std::string& label(LabelId id) const { return labels_.at(static_cast<size_t>(id)); }
    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const LabelSet& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, LabelId> index_;
};

LabelSet inventory_labels(const PhonemeInventory& inventory, bool with_blank);
LabelSet context_labels(const PhonemeInventory& inventory);  // inventory + <wb>

// T x V matrix of per-frame natural-log label probabilities; every row's
// exponentials sum to one. Stored as f32, which is also the file precision,
// so save/load is an identity.
struct Posteriorgram {
    LabelSet labels;
    int32_t num_frames = 0;
    std::vector<float> log_probs;  // row-major, num_frames * labels.size()

    double at(int32_t t, LabelId v) const {
        return log_probs[static_cast<size_t>(t) * labels.size() + static_cast<size_t>(v)];
    }
};

// Validates row normalization (1e-5) and T >= 1.
Posteriorgram make_posteriorgram(LabelSet labels,
                                 const std::vector<std::vector<double>>& rows);

void save_posteriorgram(const Posteriorgram& pg, const std::string& path);
Posteriorgram load_posteriorgram(const std::string& path);

// Per-frame factor tables of the factored-hybrid decision rule. Contexts
// (left/right) range over the inventory plus the word-boundary symbol;
// centers over the inventory.
struct FactoredScores {
    LabelSet centers;
    LabelSet contexts;
    int32_t num_frames = 0;
    std::vector<float> left;    // [t][l]
    std::vector<float> center;  // [t][l][c]
    std::vector<float> right;   // [t][l][c][r]

    double log_left(int32_t t, LabelId l) const {
        return left[static_cast<size_t>(t) * contexts.size() + static_cast<size_t>(l)];
    }
    double log_center(int32_t t, LabelId l, LabelId c) const {
        size_t row = (static_cast<size_t>(t) * contexts.size() + static_cast<size_t>(l)) *
                     centers.size();
        return center[row + static_cast<size_t>(c)];
    }
    double log_right(int32_t t, LabelId l, LabelId c, LabelId r) const {
        size_t row = ((static_cast<size_t>(t) * contexts.size() + static_cast<size_t>(l)) *
                              centers.size() +
                      static_cast<size_t>(c)) *
                     contexts.size();
        return right[row + static_cast<size_t>(r)];
    }
};

// Stored as three files in the posteriorgram container with composite
// labels: <base>.l.pgm, <base>.cl.pgm ("c|l") and <base>.rcl.pgm
// ("r|c,l"). Rows of the conditional files normalize per conditioning
// block rather than as a whole.
void save_factored_scores(const FactoredScores& fs, const std::string& base_path);
FactoredScores load_factored_scores(const std::string& base_path);

using ContextTuple = std::vector<LabelId>;

// Smoothed relative frequencies over context tuples: monophone (c),
// diphone (l,c) or triphone (l,c,r).
class ContextPrior {
public:
    ContextPrior() = default;
    ContextPrior(LabelSet labels, int order, std::vector<double> probs, double floor);

    int order() const { return order_; }
    const LabelSet& labels() const { return labels_; }
    double floor() const { return floor_; }

    double prob(const ContextTuple& tuple) const;
    double log_prob(const ContextTuple& tuple) const;  // natural log
    double total_mass() const;
    size_t table_size() const { return probs_.size(); }

private:
    size_t index(const ContextTuple& tuple) const;

    LabelSet labels_;
    int order_ = 1;
    std::vector<double> probs_;
    double floor_ = 0.0;
};

// Relative frequency of context tuples over all aligned frames, floored
// (default 1e-8) and renormalized.
ContextPrior estimate_context_prior(
        const std::vector<std::vector<ContextTuple>>& alignments, LabelSet labels,
        int order, double floor = 1e-8);

// Internal language model over output labels: context order 0 (unigram),
// 1 (bigram) or k >= 2 (the "unbounded" case realized as an n-gram of
// configurable order). Backed by the n-gram estimator; transcripts are
// counted without sentence boundary symbols unless with_boundaries is set
// (label-synchronous models score an explicit end symbol).
class IlmModel {
public:
    IlmModel() = default;

    int context_order() const { return context_order_; }
    bool with_boundaries() const { return with_boundaries_; }
    const LabelSet& labels() const { return labels_; }

    // Natural-log probability of a label given the (full) history; the
    // history is truncated to the context order here. Label ids index the
    // output LabelSet; kEndOfSequence addresses the end symbol.
    static constexpr LabelId kEndOfSequence = -2;
    double score(const std::vector<LabelId>& history, LabelId label) const;

    const NGramModel& lm() const { return lm_; }

    friend IlmModel estimate_ilm(const std::vector<std::vector<LabelId>>& transcripts,
                                 const LabelSet& labels, int context_order,
                                 Smoothing smoothing, double discount,
                                 bool with_boundaries);

private:
    int context_order_ = 0;
    bool with_boundaries_ = false;
    LabelSet labels_;
    NGramModel lm_;
    std::vector<TokenId> label_to_token_;
};

IlmModel estimate_ilm(const std::vector<std::vector<LabelId>>& transcripts,
                      const LabelSet& labels, int context_order,
                      Smoothing smoothing = Smoothing::kAbsoluteDiscount,
                      double discount = 0.7, bool with_boundaries = false);

// --- step scores (natural log) ---------------------------------------

// Factored-hybrid step score: triphone when right >= 0, diphone when
// right is kNoContext.
constexpr LabelId kNoContext = -1;
double fh_score(const FactoredScores& factors, const ContextPrior& prior, int32_t t,
                LabelId left, LabelId center, LabelId right, double alpha);

// log p(label|t) - alpha * log prior(label); the prior is monophone over
// the posteriorgram's label set including blank.
double ctc_score(const Posteriorgram& pg, const ContextPrior& prior, int32_t t,
                 LabelId label, double alpha);

// One transducer emission step: a distribution over output labels plus
// blank, already conditioned on the (truncated) history and frame.
struct TransducerStep {
    std::vector<double> label_log_probs;
    double blank_log_prob = kLogZero;
};

constexpr LabelId kBlankLabel = -1;

// Non-blank labels are divided by the internal LM; blank is exempt.
double transducer_score(const TransducerStep& step, const IlmModel& ilm,
                        LabelId label, const std::vector<LabelId>& history,
                        double alpha);

}  // namespace seqshift

#endif  // SEQSHIFT_ACOUSTIC_HH
