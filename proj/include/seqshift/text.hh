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

#ifndef SEQSHIFT_TEXT_HH
#define SEQSHIFT_TEXT_HH

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "seqshift/common.hh"

namespace seqshift {

// A tokenized text corpus. Tokenization is plain whitespace splitting on
// pre-normalized text; lines may be empty but tokens never are.
struct Corpus {
    std::string name;
    std::vector<std::vector<std::string>> lines;

    size_t running_words() const;
    bool empty() const { return lines.empty(); }
};

Corpus load_corpus(const std::string& path, const std::string& name);
Corpus make_corpus(const std::string& name, const std::vector<std::string>& sentences);

// Word list with dense ids. Ids 0/1/2 are reserved for sentence-begin,
// sentence-end and unknown; regular words start at id 3.
class Vocabulary {
public:
    static constexpr TokenId kBos = 0;
    static constexpr TokenId kEos = 1;
    static constexpr TokenId kUnk = 2;
    static constexpr TokenId kNumReserved = 3;

    static const char* bos_symbol() { return "<s>"; }
    static const char* eos_symbol() { return "</s>"; }
    static const char* unk_symbol() { return "<unk>"; }

    Vocabulary();

    // Appends a word; returns its id (existing id if already present).
    TokenId add(const std::string& word);

    // Id of a word, kUnk for out-of-vocabulary words.
    TokenId lookup(const std::string& word) const;
    bool contains(const std::string& word) const;
    const std::string& word(TokenId id) const;

    size_t size() const { return words_.size(); }
    size_t num_regular() const { return words_.size() - kNumReserved; }

    // Event space for language-model prediction: everything except <s>,
    // which only ever occurs as context.
    std::vector<TokenId> predictable_ids() const;

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, TokenId> index_;
};

// The max_size most frequent words (0 = unlimited), ties broken
// lexicographically; reserved symbols come on top.
Vocabulary build_vocabulary(const Corpus& corpus, size_t max_size);

// Fraction of running tokens not covered by the vocabulary. 0 for an
// empty corpus.
double oov_rate(const Corpus& corpus, const Vocabulary& vocab);

void write_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary read_vocabulary(const std::string& path);

// Byte-pair encoding model: an ordered merge list over character symbols,
// with the end-of-word marker attached to each word's final character.
struct BpeModel {
    static const char* end_of_word_marker() { return "</w>"; }

    std::vector<std::pair<std::string, std::string>> merges;
    std::unordered_set<std::string> vocab;

    bool known_symbol(const std::string& s) const { return vocab.count(s) > 0; }
};

// Greedy most-frequent-pair learning; pair-count ties broken by
// lexicographic pair order.
BpeModel bpe_learn(const Corpus& corpus, size_t num_merges);

// Deterministic segmentation by replaying merges in learned order.
// Characters unseen in training map to the unknown symbol.
std::vector<std::string> bpe_apply_word(const BpeModel& model, const std::string& word);
std::vector<std::string> bpe_apply(const BpeModel& model,
                                   const std::vector<std::string>& words);

// Subword tokens per word over a whole corpus (>= 1 by construction).
double token_word_ratio(const BpeModel& model, const Corpus& corpus);

// Joins subword tokens back into words by stripping end-of-word markers.
std::vector<std::string> bpe_join(const std::vector<std::string>& tokens);

void write_bpe_model(const BpeModel& model, const std::string& path);
BpeModel read_bpe_model(const std::string& path);

// Splits a UTF-8 string at code point boundaries.
std::vector<std::string> utf8_chars(const std::string& s);

}  // namespace seqshift

#endif  // SEQSHIFT_TEXT_HH
