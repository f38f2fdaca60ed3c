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

#ifndef SEQSHIFT_NGRAM_HH
#define SEQSHIFT_NGRAM_HH

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqshift/common.hh"
#include "seqshift/text.hh"

namespace seqshift {

// Log base 10 throughout this module (ARPA convention); decoding converts
// to natural log at the boundary.
constexpr double kLog10PseudoZero = -99.0;  // "effectively impossible"

// A probability at or below this is treated as zero (mle on unseen data).
constexpr double kLog10ZeroThreshold = -90.0;

// Incremental scoring state: the last order-1 tokens of the history.
struct LmState {
    TokenSeq context;

    bool operator==(const LmState& other) const { return context == other.context; }
};

struct TokenSeqHash {
    size_t operator()(const TokenSeq& seq) const {
        size_t h = 1469598103934665603ULL;
        for (TokenId t : seq) {
            h ^= static_cast<size_t>(t) + 0x9e3779b9ULL;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

// Raw n-gram counts for orders 1..order. Sentence begin/end symbols are
// added per line; <s> is context-only and never counted as a unigram.
struct NGramCounts {
    int order = 1;
    Vocabulary vocab;
    std::vector<std::map<TokenSeq, size_t>> tables;  // tables[k]: (k+1)-grams
    size_t running_tokens = 0;

    const std::map<TokenSeq, size_t>& level(int k) const { return tables.at(k - 1); }
};

NGramCounts count_ngrams(const Corpus& corpus, const Vocabulary& vocab, int order);

enum class Smoothing {
    kMle,               // zero backoff mass; only for oracle tests
    kAbsoluteDiscount,  // interpolated, single discount d
};

// Backoff n-gram model over a Vocabulary, ARPA-shaped: explicit probability
// and backoff tables per level, queried by the standard backoff recursion.
class NGramModel {
public:
    NGramModel() = default;
    NGramModel(int order, Vocabulary vocab);

    int order() const { return order_; }
    const Vocabulary& vocab() const { return vocab_; }

    // log10 P(token | state) and the successor state.
    std::pair<double, LmState> lm_logprob(const LmState& state, TokenId token) const;
    double score(const LmState& state, TokenId token) const {
        return lm_logprob(state, token).first;
    }

    LmState initial_state() const { return LmState{{Vocabulary::kBos}}; }
    LmState null_state() const { return LmState{}; }
    LmState advance_state(const LmState& state, TokenId token) const;

    void set_prob(const TokenSeq& ngram, double log10_prob);
    void set_backoff(const TokenSeq& context, double log10_bow);
    bool has_prob(const TokenSeq& ngram) const;
    double stored_prob(const TokenSeq& ngram) const;
    double stored_backoff_or_zero(const TokenSeq& context) const;

    size_t level_size(int k) const { return probs_.at(k - 1).size(); }

    // All stored n-grams of a level in token-id lexicographic order.
    std::vector<TokenSeq> sorted_level(int k) const;

    size_t train_running_words = 0;  // metadata for domain statistics

private:
    int order_ = 0;
    Vocabulary vocab_;
    std::vector<std::unordered_map<TokenSeq, double, TokenSeqHash>> probs_;
    std::vector<std::unordered_map<TokenSeq, double, TokenSeqHash>> bows_;
};

// d is the absolute discount in (0,1); ignored for mle.
NGramModel estimate_ngram(const NGramCounts& counts, Smoothing smoothing,
                          double discount = 0.7);

struct PerplexityResult {
    double ppl = 0.0;
    size_t scored_tokens = 0;
    size_t oov_tokens = 0;
};

// 10^(-sum/N) with N = running tokens plus one sentence end per line.
// OOV tokens are scored as <unk> and counted. Throws "zero probability"
// when any token scores as impossible (mle on unseen data).
PerplexityResult perplexity(const NGramModel& model, const Corpus& corpus);

// word_ppl = subword_ppl^(tokens/words)
double renormalize_subword_ppl(double subword_ppl, size_t token_count,
                               size_t word_count);

std::string write_arpa_string(const NGramModel& model);
void write_arpa(const NGramModel& model, const std::string& path);
NGramModel read_arpa_string(const std::string& text);
NGramModel read_arpa(const std::string& path);

}  // namespace seqshift

#endif  // SEQSHIFT_NGRAM_HH
