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

#include "seqshift/search.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace seqshift {

namespace {

constexpr double kLn10 = std::numbers::ln10;

struct WordTrace {
    std::shared_ptr<const WordTrace> prev;
    TokenId word;
};
using TracePtr = std::shared_ptr<const WordTrace>;

TracePtr extend(const TracePtr& prev, TokenId word) {
    return std::make_shared<const WordTrace>(WordTrace{prev, word});
}

std::vector<TokenId> trace_to_words(const TracePtr& trace) {
    std::vector<TokenId> words;
    for (const WordTrace* t = trace.get(); t != nullptr; t = t->prev.get())
        words.push_back(t->word);
    std::reverse(words.begin(), words.end());
    return words;
}

// Generic beam bookkeeping: hypotheses recombine by key keeping the best
// score (first arrival wins ties), then the beam keeps the top-k with a
// deterministic order.
template <typename Key, typename Hyp>
class Beam {
public:
    void offer(const Key& key, double score, Hyp hyp) {
        auto it = hyps_.find(key);
        if (it == hyps_.end()) {
            hyps_.emplace(key, Entry{score, std::move(hyp)});
        }
        else if (score > it->second.score) {
            it->second.score = score;
            it->second.hyp = std::move(hyp);
        }
    }

    void prune(size_t beam_size, std::optional<double> margin) {
        if (hyps_.empty())
            return;
        std::vector<const typename Map::value_type*> order;
        order.reserve(hyps_.size());
        for (const auto& kv : hyps_)
            order.push_back(&kv);
        std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
            if (a->second.score != b->second.score)
                return a->second.score > b->second.score;
            return a->first < b->first;
        });
        double best = order.front()->second.score;
        size_t keep = std::min(beam_size, order.size());
        while (keep > 0 && margin.has_value() &&
               order[keep - 1]->second.score < best - *margin)
            --keep;
        Map kept;
        for (size_t i = 0; i < keep; ++i)
            kept.emplace(order[i]->first, order[i]->second);
        hyps_ = std::move(kept);
    }

    struct Entry {
        double score;
        Hyp hyp;
    };
    using Map = std::map<Key, Entry>;
    Map& entries() { return hyps_; }
    const Map& entries() const { return hyps_; }
    bool empty() const { return hyps_.empty(); }

private:
    Map hyps_;
};

// ---------------------------------------------------------------------
// Time-synchronous prefix-tree search (factored hybrid and CTC)
// ---------------------------------------------------------------------

constexpr int32_t kBoundary = -1;
constexpr int32_t kSilencePos = -2;
constexpr LabelId kNone = -1;

struct TsKey {
    int32_t pos = kBoundary;     // tree node, boundary or silence
    LabelId committed = kNone;   // triphone: anticipated next context
    LabelId last = kNone;        // ctc: last emitted unit
    TokenSeq lm_ctx;

    auto operator<=>(const TsKey&) const = default;
};

struct TsHyp {
    TracePtr trace;
};

struct TreeInfo {
    std::vector<LabelId> parent_label;  // context id of the parent phoneme
    LabelId wb = kNone;                 // word-boundary context id
};

}  // namespace

int32_t TimeSyncModel::num_frames() const {
    if (kind == TimeSyncModelKind::kCtc)
        return pg ? pg->num_frames : 0;
    return factors ? factors->num_frames : 0;
}

namespace {

class TimeSyncDecoder {
public:
    TimeSyncDecoder(const TimeSyncModel& model, const PrefixTree& tree,
                    const Lexicon& lexicon, const NGramModel& lm,
                    const DecodeConfig& cfg)
            : model_(model), tree_(tree), lexicon_(lexicon), lm_(lm), cfg_(cfg) {
        if (model.kind == TimeSyncModelKind::kCtc) {
            if (model.pg == nullptr || model.prior == nullptr)
                throw ValidationError("CTC decoding needs posteriorgram and prior");
            if (model.pg->num_frames < 1)
                throw ValidationError("empty posteriorgram");
            blank_ = model.pg->labels.id(LabelSet::blank_symbol());
        }
        else {
            if (model.factors == nullptr || model.prior == nullptr)
                throw ValidationError("factored decoding needs factors and prior");
            if (model.factors->num_frames < 1)
                throw ValidationError("empty factor tables");
            wb_ = model.factors->contexts.id(LabelSet::boundary_symbol());
            silence_center_ = model.factors->centers.contains(
                                      PhonemeInventory::silence_symbol())
                                      ? model.factors->centers.id(
                                                PhonemeInventory::silence_symbol())
                                      : kNone;
        }

        // Parent phoneme of every tree node, as a left context.
        info_.wb = wb_;
        info_.parent_label.assign(tree.nodes.size(), wb_);
        for (size_t n = 0; n < tree.nodes.size(); ++n)
            for (const auto& [label, child] : tree.nodes[n].children)
                info_.parent_label[static_cast<size_t>(child)] =
                        n == 0 ? wb_ : tree.nodes[n].label;

        // Lexicon word ids resolved against the LM vocabulary once; words
        // with several pronunciations spread uniform pronunciation mass.
        lm_token_.resize(lexicon.words().size(), Vocabulary::kUnk);
        pron_log_.resize(lexicon.words().size(), 0.0);
        for (TokenId w : lexicon.word_ids()) {
            const std::string& s = lexicon.words().word(w);
            lm_token_[static_cast<size_t>(w)] = lm.vocab().lookup(s);
            pron_log_[static_cast<size_t>(w)] =
                    -std::log(static_cast<double>(lexicon.pronunciations(w).size()));
            for (const auto& pron : lexicon.pronunciations(w))
                for (PhonemeId p : pron)
                    check_unit(p);
        }
        use_lm_ = cfg.lm_scale != 0.0;
    }

    DecodeResult run() {
        Beam<TsKey, TsHyp> beam;
        TsKey start;
        start.lm_ctx = initial_lm_context();
        beam.offer(start, 0.0, TsHyp{nullptr});

        int32_t frames = model_.num_frames();
        for (int32_t t = 0; t < frames; ++t) {
            Beam<TsKey, TsHyp> next;
            for (const auto& [key, entry] : beam.entries())
                expand(key, entry.score, entry.hyp, t, next);
            word_end_closure(next);
            next.prune(cfg_.beam_size, cfg_.score_margin);
            beam = std::move(next);
        }

        DecodeResult result;
        for (const auto& [key, entry] : beam.entries()) {
            if (key.pos != kBoundary && key.pos != kSilencePos)
                continue;
            double score = entry.score + exit_cost();
            if (use_lm_)
                score += cfg_.lm_scale * kLn10 *
                         lm_.score(LmState{key.lm_ctx}, Vocabulary::kEos);
            if (!result.found || score > result.log_score) {
                result.found = true;
                result.log_score = score;
                result.words.clear();
                for (TokenId w : trace_to_words(entry.hyp.trace))
                    result.words.push_back(lexicon_.words().word(w));
            }
        }
        return result;
    }

private:
    bool is_hmm() const { return model_.kind != TimeSyncModelKind::kCtc; }
    bool is_tri() const { return model_.kind == TimeSyncModelKind::kFhTriphone; }

    void check_unit(PhonemeId p) const {
        if (model_.kind == TimeSyncModelKind::kCtc) {
            const auto& sym = lexicon_.inventory().symbol(p);
            if (!model_.pg->labels.contains(sym))
                throw ValidationError("lexicon phoneme '" + sym +
                                      "' missing from posteriorgram");
        }
        else if (static_cast<size_t>(p) >= model_.factors->centers.size()) {
            throw ValidationError("lexicon phoneme outside factor tables");
        }
    }

    TokenSeq initial_lm_context() const {
        return use_lm_ ? TokenSeq{Vocabulary::kBos} : TokenSeq{};
    }

    double exit_cost() const {
        if (!is_hmm() || model_.transitions.beta == 0.0)
            return 0.0;
        return model_.transitions.beta * model_.transitions.forward_log;
    }

    double loop_cost() const {
        if (model_.transitions.beta == 0.0)
            return 0.0;
        return model_.transitions.beta * model_.transitions.loop_log;
    }

    double forward_cost() const {
        if (model_.transitions.beta == 0.0)
            return 0.0;
        return model_.transitions.beta * model_.transitions.forward_log;
    }

    double emit_fh(int32_t t, LabelId left, LabelId center, LabelId committed) const {
        return fh_score(*model_.factors, *model_.prior, t, left, center,
                        is_tri() ? committed : kNoContext, cfg_.prior_scale);
    }

    double emit_ctc(int32_t t, LabelId label) const {
        return ctc_score(*model_.pg, *model_.prior, t, label, cfg_.prior_scale);
    }

    LabelId ctc_unit(PhonemeId p) const {
        return model_.pg->labels.id(lexicon_.inventory().symbol(p));
    }

    // Anticipated right contexts on entering a node: its children labels
    // plus the boundary when a word can end there.
    void commitments(int32_t node, std::vector<LabelId>& out) const {
        out.clear();
        const auto& tn = tree_.nodes[static_cast<size_t>(node)];
        for (const auto& [label, child] : tn.children) {
            (void)child;
            out.push_back(label);
        }
        if (!tn.word_ends.empty())
            out.push_back(wb_);
    }

    void expand(const TsKey& key, double score, const TsHyp& hyp, int32_t t,
                Beam<TsKey, TsHyp>& next) {
        if (model_.kind == TimeSyncModelKind::kCtc)
            expand_ctc(key, score, hyp, t, next);
        else
            expand_fh(key, score, hyp, t, next);
    }

    void expand_fh(const TsKey& key, double score, const TsHyp& hyp, int32_t t,
                   Beam<TsKey, TsHyp>& next) {
        double entry = t == 0 ? 0.0 : forward_cost();
        if (key.pos == kBoundary || key.pos == kSilencePos) {
            double move = key.pos == kSilencePos ? forward_cost() : entry;
            for (const auto& [label, child] : tree_.root().children)
                enter_node(key, score + move, hyp, t, wb_, label, child, next);
            if (cfg_.allow_silence && silence_center_ != kNone) {
                TsKey sil = key;
                sil.pos = kSilencePos;
                sil.committed = kNone;
                double loop = key.pos == kSilencePos ? loop_cost() : entry;
                next.offer(sil, score + loop + emit_fh(t, wb_, silence_center_, wb_),
                           hyp);
            }
            return;
        }
        const auto& node = tree_.nodes[static_cast<size_t>(key.pos)];
        LabelId left = info_.parent_label[static_cast<size_t>(key.pos)];
        // Loop in place.
        next.offer(key, score + loop_cost() + emit_fh(t, left, node.label, key.committed),
                   hyp);
        // Advance along the committed (triphone) or any (diphone) arc.
        if (is_tri()) {
            if (key.committed != wb_) {
                auto it = node.children.find(key.committed);
                if (it != node.children.end())
                    enter_node(key, score + forward_cost(), hyp, t, node.label,
                               it->first, it->second, next);
            }
        }
        else {
            for (const auto& [label, child] : node.children)
                enter_node(key, score + forward_cost(), hyp, t, node.label, label,
                           child, next);
        }
    }

    void enter_node(const TsKey& from, double score, const TsHyp& hyp, int32_t t,
                    LabelId left, LabelId label, int32_t child,
                    Beam<TsKey, TsHyp>& next) {
        TsKey key = from;
        key.pos = child;
        key.last = kNone;
        if (is_tri()) {
            std::vector<LabelId> commits;
            commitments(child, commits);
            for (LabelId r : commits) {
                key.committed = r;
                next.offer(key, score + emit_fh(t, left, label, r), hyp);
            }
        }
        else {
            key.committed = kNone;
            next.offer(key, score + emit_fh(t, left, label, kNone), hyp);
        }
    }

    void expand_ctc(const TsKey& key, double score, const TsHyp& hyp, int32_t t,
                    Beam<TsKey, TsHyp>& next) {
        // Blank keeps the position.
        {
            TsKey blank = key;
            blank.last = blank_;
            next.offer(blank, score + emit_ctc(t, blank_), hyp);
        }
        if (key.pos == kBoundary) {
            for (const auto& [label, child] : tree_.root().children) {
                LabelId unit = ctc_unit(label);
                if (key.last != kNone && key.last != blank_ && key.last == unit)
                    continue;  // repeated unit needs a blank in between
                TsKey entered = key;
                entered.pos = child;
                entered.last = unit;
                next.offer(entered, score + emit_ctc(t, unit), hyp);
            }
            return;
        }
        const auto& node = tree_.nodes[static_cast<size_t>(key.pos)];
        LabelId here = ctc_unit(node.label);
        if (key.last == here) {
            TsKey loop = key;
            next.offer(loop, score + emit_ctc(t, here), hyp);
        }
        for (const auto& [label, child] : node.children) {
            LabelId unit = ctc_unit(label);
            if (key.last != blank_ && unit == here)
                continue;
            TsKey adv = key;
            adv.pos = child;
            adv.last = unit;
            next.offer(adv, score + emit_ctc(t, unit), hyp);
        }
    }

    // Word-end conversions: completing hypotheses re-enter at the root
    // within the same frame, paying the scaled LM.
    void word_end_closure(Beam<TsKey, TsHyp>& beam) {
        std::vector<std::tuple<TsKey, double, TsHyp>> born;
        for (const auto& [key, entry] : beam.entries()) {
            if (key.pos < 0)
                continue;
            if (is_tri() && key.committed != wb_)
                continue;
            const auto& node = tree_.nodes[static_cast<size_t>(key.pos)];
            if (node.word_ends.empty())
                continue;
            if (model_.kind == TimeSyncModelKind::kCtc && key.last == blank_)
                continue;  // label already closed when the blank was taken
            for (TokenId w : node.word_ends) {
                TsKey out;
                out.pos = kBoundary;
                out.committed = kNone;
                out.last = key.last;  // repeat rule crosses word boundaries
                double score = entry.score + pron_log_[static_cast<size_t>(w)];
                LmState state{key.lm_ctx};
                if (use_lm_) {
                    auto [lp, nxt] =
                            lm_.lm_logprob(state, lm_token_[static_cast<size_t>(w)]);
                    score += cfg_.lm_scale * kLn10 * lp;
                    state = nxt;
                }
                out.lm_ctx = state.context;
                born.emplace_back(std::move(out), score,
                                  TsHyp{extend(entry.hyp.trace, w)});
            }
        }
        for (auto& [key, score, hyp] : born)
            beam.offer(key, score, std::move(hyp));
    }

    const TimeSyncModel& model_;
    const PrefixTree& tree_;
    const Lexicon& lexicon_;
    const NGramModel& lm_;
    const DecodeConfig& cfg_;
    TreeInfo info_;
    std::vector<TokenId> lm_token_;
    std::vector<double> pron_log_;
    LabelId blank_ = kNone;
    LabelId wb_ = kNone;
    LabelId silence_center_ = kNone;
    bool use_lm_ = false;
};

}  // namespace

DecodeResult decode_time_sync(const TimeSyncModel& model, const PrefixTree& tree,
                              const Lexicon& lexicon, const NGramModel& lm,
                              const DecodeConfig& cfg) {
    TimeSyncDecoder decoder(model, tree, lexicon, lm, cfg);
    return decoder.run();
}

// ---------------------------------------------------------------------
// Transducer search (closed and open vocabulary)
// ---------------------------------------------------------------------

PosteriorgramTransducerScorer::PosteriorgramTransducerScorer(const Posteriorgram* pg)
        : pg_(pg) {
    blank_ = pg->labels.id(LabelSet::blank_symbol());
    for (size_t i = 0; i < pg->labels.size(); ++i)
        if (static_cast<LabelId>(i) != blank_)
            units_.add(pg->labels.label(static_cast<LabelId>(i)));
}

TransducerStep PosteriorgramTransducerScorer::step(
        int32_t t, const std::vector<LabelId>& history) const {
    (void)history;
    TransducerStep s;
    s.blank_log_prob = pg_->at(t, blank_);
    s.label_log_probs.reserve(units_.size());
    for (size_t i = 0; i < units_.size(); ++i) {
        LabelId raw = pg_->labels.id(units_.label(static_cast<LabelId>(i)));
        s.label_log_probs.push_back(pg_->at(t, raw));
    }
    return s;
}

namespace {

struct TdKey {
    int32_t pos = kBoundary;       // tree node (closed mode only)
    std::vector<LabelId> history;  // truncated output history
    LabelId last = kNone;          // most recent unit (open-mode word check)
    TokenSeq lm_ctx;

    auto operator<=>(const TdKey&) const = default;
};

struct TdHyp {
    TracePtr words;   // closed mode
    TracePtr units;   // open mode
};

class TransducerDecoder {
public:
    TransducerDecoder(const TransducerScorer& scorer, const IlmModel& ilm,
                      const NGramModel& lm, const PrefixTree* tree,
                      const Vocabulary* words, const DecodeConfig& cfg)
            : scorer_(scorer), ilm_(ilm), lm_(lm), tree_(tree), words_(words),
              cfg_(cfg) {
        closed_ = cfg.vocab_mode == VocabMode::kClosed;
        use_lm_ = cfg.lm_scale != 0.0;
        use_ilm_ = cfg.prior_scale != 0.0;
        history_len_ = static_cast<size_t>(
                std::max(scorer.context_order(), use_ilm_ ? ilm.context_order() : 0));
        const LabelSet& units = scorer_.output_labels();
        if (closed_) {
            if (tree_ == nullptr || words_ == nullptr)
                throw ValidationError("closed-vocabulary decoding needs a tree");
            for (const auto& node : tree_->nodes)
                if (node.label >= static_cast<LabelId>(units.size()))
                    throw ValidationError("tree unit outside the scorer's label set");
            lm_token_.resize(words_->size(), Vocabulary::kUnk);
            pron_log_.resize(words_->size(), 0.0);
            std::vector<size_t> spellings(words_->size(), 0);
            for (const auto& node : tree_->nodes)
                for (TokenId w : node.word_ends)
                    ++spellings[static_cast<size_t>(w)];
            for (TokenId w = Vocabulary::kNumReserved;
                 w < static_cast<TokenId>(words_->size()); ++w) {
                lm_token_[static_cast<size_t>(w)] =
                        lm_.vocab().lookup(words_->word(w));
                if (spellings[static_cast<size_t>(w)] > 1)
                    pron_log_[static_cast<size_t>(w)] = -std::log(
                            static_cast<double>(spellings[static_cast<size_t>(w)]));
            }
        }
        else {
            // Subword-level LM required: its vocabulary must know the
            // end-of-word-marked units the scorer emits.
            if (use_lm_) {
                bool any_marked = false;
                for (const auto& label : units.labels())
                    if (is_word_final_label(label) && lm_.vocab().contains(label))
                        any_marked = true;
                if (!any_marked)
                    throw ValidationError("LM granularity mismatch: open-vocabulary "
                                          "decoding needs a subword-level LM");
            }
            unit_lm_token_.resize(units.size(), Vocabulary::kUnk);
            for (size_t u = 0; u < units.size(); ++u)
                unit_lm_token_[u] = lm_.vocab().lookup(units.label(static_cast<LabelId>(u)));
            word_final_.resize(units.size(), false);
            for (size_t u = 0; u < units.size(); ++u)
                word_final_[u] = is_word_final_label(units.label(static_cast<LabelId>(u)));
        }
    }

    static bool is_word_final_label(const std::string& label) {
        const std::string marker = BpeModel::end_of_word_marker();
        return label.size() >= marker.size() &&
               label.compare(label.size() - marker.size(), marker.size(), marker) == 0;
    }

    DecodeResult run() {
        Beam<TdKey, TdHyp> beam;
        TdKey start;
        start.lm_ctx = use_lm_ ? TokenSeq{Vocabulary::kBos} : TokenSeq{};
        beam.offer(start, 0.0, TdHyp{});

        for (int32_t t = 0; t < scorer_.num_frames(); ++t) {
            Beam<TdKey, TdHyp> next;
            for (const auto& [key, entry] : beam.entries())
                expand(key, entry.score, entry.hyp, t, next);
            if (closed_)
                word_end_closure(next);
            next.prune(cfg_.beam_size, cfg_.score_margin);
            beam = std::move(next);
        }

        DecodeResult result;
        for (const auto& [key, entry] : beam.entries()) {
            if (closed_ && key.pos != kBoundary)
                continue;
            if (!closed_ && (key.last == kNone ||
                             !word_final_[static_cast<size_t>(key.last)]))
                continue;
            double score = entry.score;
            if (use_lm_)
                score += cfg_.lm_scale * kLn10 *
                         lm_.score(LmState{key.lm_ctx}, Vocabulary::kEos);
            if (!result.found || score > result.log_score) {
                result.found = true;
                result.log_score = score;
                result.words.clear();
                if (closed_) {
                    for (TokenId w : trace_to_words(entry.hyp.words))
                        result.words.push_back(words_->word(w));
                }
                else {
                    std::vector<std::string> tokens;
                    for (TokenId u : trace_to_words(entry.hyp.units))
                        tokens.push_back(
                                scorer_.output_labels().label(static_cast<LabelId>(u)));
                    result.words = bpe_join(tokens);
                }
            }
        }
        return result;
    }

private:
    double unit_score(const TransducerStep& step, const TdKey& key, LabelId unit) {
        return transducer_score(step, ilm_, unit, key.history,
                                use_ilm_ ? cfg_.prior_scale : 0.0);
    }

    void push_history(TdKey& key, LabelId unit) const {
        key.last = unit;
        if (history_len_ == 0)
            return;
        key.history.push_back(unit);
        if (key.history.size() > history_len_)
            key.history.erase(key.history.begin());
    }

    void expand(const TdKey& key, double score, const TdHyp& hyp, int32_t t,
                Beam<TdKey, TdHyp>& next) {
        TransducerStep step = scorer_.step(t, key.history);
        // Blank advances time only.
        next.offer(key, score + step.blank_log_prob, hyp);

        if (closed_) {
            const auto& node = key.pos == kBoundary
                                       ? tree_->root()
                                       : tree_->nodes[static_cast<size_t>(key.pos)];
            for (const auto& [unit, child] : node.children) {
                TdKey adv = key;
                adv.pos = child;
                push_history(adv, unit);
                next.offer(adv, score + unit_score(step, key, unit), hyp);
            }
        }
        else {
            size_t n = scorer_.output_labels().size();
            for (size_t u = 0; u < n; ++u) {
                LabelId unit = static_cast<LabelId>(u);
                TdKey adv = key;
                push_history(adv, unit);
                double s = score + unit_score(step, key, unit);
                if (use_lm_) {
                    auto [lp, nxt] = lm_.lm_logprob(LmState{key.lm_ctx},
                                                    unit_lm_token_[u]);
                    s += cfg_.lm_scale * kLn10 * lp;
                    adv.lm_ctx = nxt.context;
                }
                TdHyp extended = hyp;
                extended.units = extend(hyp.units, unit);
                next.offer(adv, s, std::move(extended));
            }
        }
    }

    void word_end_closure(Beam<TdKey, TdHyp>& beam) {
        std::vector<std::tuple<TdKey, double, TdHyp>> born;
        for (const auto& [key, entry] : beam.entries()) {
            if (key.pos < 0)
                continue;
            const auto& node = tree_->nodes[static_cast<size_t>(key.pos)];
            for (TokenId w : node.word_ends) {
                TdKey out = key;
                out.pos = kBoundary;
                double score = entry.score + pron_log_[static_cast<size_t>(w)];
                if (use_lm_) {
                    auto [lp, nxt] = lm_.lm_logprob(
                            LmState{key.lm_ctx}, lm_token_[static_cast<size_t>(w)]);
                    score += cfg_.lm_scale * kLn10 * lp;
                    out.lm_ctx = nxt.context;
                }
                born.emplace_back(std::move(out), score,
                                  TdHyp{extend(entry.hyp.words, w), nullptr});
            }
        }
        for (auto& [key, score, hyp] : born)
            beam.offer(key, score, std::move(hyp));
    }

    const TransducerScorer& scorer_;
    const IlmModel& ilm_;
    const NGramModel& lm_;
    const PrefixTree* tree_;
    const Vocabulary* words_;
    const DecodeConfig& cfg_;
    bool closed_ = true;
    bool use_lm_ = false;
    bool use_ilm_ = false;
    size_t history_len_ = 0;
    std::vector<TokenId> lm_token_;
    std::vector<double> pron_log_;
    std::vector<TokenId> unit_lm_token_;
    std::vector<bool> word_final_;
};

}  // namespace

DecodeResult decode_transducer(const TransducerScorer& scorer, const IlmModel& ilm,
                               const NGramModel& lm, const PrefixTree* tree,
                               const Vocabulary* words, const DecodeConfig& cfg) {
    TransducerDecoder decoder(scorer, ilm, lm, tree, words, cfg);
    return decoder.run();
}

PrefixTree build_transducer_tree(const Lexicon& lexicon, const LabelSet& units) {
    std::vector<std::pair<TokenId, std::vector<int32_t>>> entries;
    for (TokenId w : lexicon.word_ids())
        for (const auto& pron : lexicon.pronunciations(w)) {
            std::vector<int32_t> seq;
            for (PhonemeId p : pron)
                seq.push_back(units.id(lexicon.inventory().symbol(p)));
            entries.emplace_back(w, seq);
        }
    return build_unit_tree(entries);
}

PrefixTree build_subword_tree(const Vocabulary& words, const BpeModel& bpe,
                              const LabelSet& units) {
    std::vector<std::pair<TokenId, std::vector<int32_t>>> entries;
    for (TokenId w = Vocabulary::kNumReserved; w < static_cast<TokenId>(words.size());
         ++w) {
        std::vector<int32_t> seq;
        for (const auto& tok : bpe_apply_word(bpe, words.word(w)))
            seq.push_back(units.id(tok));
        entries.emplace_back(w, seq);
    }
    return build_unit_tree(entries);
}

// ---------------------------------------------------------------------
// Label-synchronous search
// ---------------------------------------------------------------------

namespace {

struct LsKey {
    std::vector<LabelId> prefix;
    auto operator<=>(const LsKey&) const = default;
};

struct LsHyp {
    TokenSeq lm_ctx;
};

}  // namespace

DecodeResult decode_label_sync(const LabelSyncScorer& scorer, const IlmModel& ilm,
                               const NGramModel& lm, const DecodeConfig& cfg) {
    const LabelSet& units = scorer.output_labels();
    bool use_lm = cfg.lm_scale != 0.0;
    bool use_ilm = cfg.prior_scale != 0.0;
    size_t max_steps = cfg.max_steps > 0 ? cfg.max_steps : scorer.max_steps();

    std::vector<TokenId> unit_tokens(units.size());
    for (size_t u = 0; u < units.size(); ++u)
        unit_tokens[u] = lm.vocab().lookup(units.label(static_cast<LabelId>(u)));

    Beam<LsKey, LsHyp> beam;
    beam.offer(LsKey{}, 0.0,
               LsHyp{use_lm ? TokenSeq{Vocabulary::kBos} : TokenSeq{}});

    struct Terminated {
        double raw_score;
        double normalized;
        std::vector<LabelId> prefix;
    };
    std::optional<Terminated> best;

    std::vector<double> label_scores;
    for (size_t step_index = 0; step_index < max_steps && !beam.empty();
         ++step_index) {
        Beam<LsKey, LsHyp> next;
        for (const auto& [key, entry] : beam.entries()) {
            double eos_score = kLogZero;
            label_scores.assign(units.size(), kLogZero);
            scorer.step(key.prefix, label_scores, eos_score);

            // Terminate on the end symbol.
            if (!log_is_zero(eos_score)) {
                double s = entry.score + eos_score;
                if (use_ilm)
                    s -= cfg.prior_scale *
                         ilm.score(key.prefix, IlmModel::kEndOfSequence);
                if (use_lm)
                    s += cfg.lm_scale * kLn10 *
                         lm.score(LmState{entry.hyp.lm_ctx}, Vocabulary::kEos);
                size_t len = std::max<size_t>(key.prefix.size(), 1);
                double normalized =
                        s - cfg.length_norm * std::log(static_cast<double>(len));
                if (!best.has_value() || normalized > best->normalized)
                    best = Terminated{s, normalized, key.prefix};
            }

            for (size_t u = 0; u < units.size(); ++u) {
                if (log_is_zero(label_scores[u]))
                    continue;
                LabelId unit = static_cast<LabelId>(u);
                double s = entry.score + label_scores[u];
                if (use_ilm)
                    s -= cfg.prior_scale * ilm.score(key.prefix, unit);
                LsHyp hyp = entry.hyp;
                if (use_lm) {
                    auto [lp, nxt] =
                            lm.lm_logprob(LmState{entry.hyp.lm_ctx}, unit_tokens[u]);
                    s += cfg.lm_scale * kLn10 * lp;
                    hyp.lm_ctx = nxt.context;
                }
                LsKey key2 = key;
                key2.prefix.push_back(unit);
                next.offer(key2, s, std::move(hyp));
            }
        }
        next.prune(cfg.beam_size, cfg.score_margin);
        beam = std::move(next);
    }

    if (!best.has_value())
        throw std::runtime_error("no terminated hypothesis");

    DecodeResult result;
    result.found = true;
    result.log_score = best->normalized;
    std::vector<std::string> tokens;
    for (LabelId u : best->prefix)
        tokens.push_back(units.label(u));
    result.words = bpe_join(tokens);
    return result;
}

}  // namespace seqshift
