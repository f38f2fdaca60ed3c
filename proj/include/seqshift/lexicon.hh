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

#ifndef SEQSHIFT_LEXICON_HH
#define SEQSHIFT_LEXICON_HH

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqshift/common.hh"
#include "seqshift/text.hh"

namespace seqshift {

using PhonemeId = int32_t;

// Phoneme set with an end-of-word twin per base symbol (marked by a
// trailing '#') and a twin-less silence symbol.
class PhonemeInventory {
public:
    static const char* silence_symbol() { return "sil"; }
    static const char* end_of_word_suffix() { return "#"; }

    PhonemeInventory() = default;
    explicit PhonemeInventory(const std::vector<std::string>& base_symbols);

    PhonemeId id(const std::string& symbol) const;
    bool contains(const std::string& symbol) const;
    const std::string& symbol(PhonemeId id) const;
    size_t size() const { return symbols_.size(); }

    bool is_end_of_word(PhonemeId id) const;
    bool is_silence(PhonemeId id) const { return id == silence_id_; }
    PhonemeId silence_id() const { return silence_id_; }

    // The '#' twin of a base phoneme (identity for silence).
    PhonemeId end_of_word_twin(PhonemeId base) const;
    // The base phoneme of a twin (identity for base symbols).
    PhonemeId base_of(PhonemeId id) const;

    const std::vector<std::string>& symbols() const { return symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, PhonemeId> index_;
    PhonemeId silence_id_ = -1;
};

// Strips trailing stress digits (0-2), merges the resulting duplicates and
// generates end-of-word twins; silence is appended last.
PhonemeInventory normalize_inventory(const std::vector<std::string>& raw_phonemes);

using Pronunciation = std::vector<PhonemeId>;

// Word-to-pronunciation mapping over an inventory. The final phoneme of
// every stored pronunciation carries the end-of-word twin.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(PhonemeInventory inventory)
            : inventory_(std::move(inventory)) {}

    // Adds a pronunciation given as base symbols (stress digits allowed);
    // the end-of-word flag is applied to the final phoneme here.
    void add_word(const std::string& word, const std::vector<std::string>& phonemes);

    const PhonemeInventory& inventory() const { return inventory_; }
    const Vocabulary& words() const { return words_; }
    size_t num_words() const { return words_.num_regular(); }

    const std::vector<Pronunciation>& pronunciations(TokenId word) const;
    bool has_word(const std::string& word) const { return words_.contains(word); }

    // Word ids in insertion order (excluding reserved symbols).
    std::vector<TokenId> word_ids() const;

private:
    PhonemeInventory inventory_;
    Vocabulary words_;
    std::map<TokenId, std::vector<Pronunciation>> prons_;
};

// File format: one entry per line, "WORD<tab>PH1 PH2 ... PHn".
Lexicon load_lexicon(const std::string& path, PhonemeInventory inventory);

// Trie over pronunciations; terminal nodes carry the ids of the words
// whose pronunciation ends there (homophones share one node).
struct PrefixTreeNode {
    PhonemeId label = -1;  // -1 at the root
    std::map<PhonemeId, int32_t> children;
    std::vector<TokenId> word_ends;
};

struct PrefixTree {
    std::vector<PrefixTreeNode> nodes;  // nodes[0] is the root

    const PrefixTreeNode& root() const { return nodes.front(); }
    size_t node_count() const { return nodes.size(); }

    // All root-to-word-end paths as (pronunciation, word id) pairs, in
    // depth-first label order. Used by tests and the search module.
    std::vector<std::pair<Pronunciation, TokenId>> enumerate_words() const;
};

PrefixTree build_prefix_tree(const Lexicon& lexicon);

// Same trie construction over arbitrary unit sequences (e.g. subword ids),
// for closed-vocabulary decoding of unit-based models.
PrefixTree build_unit_tree(
        const std::vector<std::pair<TokenId, std::vector<int32_t>>>& entries);

}  // namespace seqshift

#endif  // SEQSHIFT_LEXICON_HH
