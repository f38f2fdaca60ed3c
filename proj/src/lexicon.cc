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

#include "seqshift/lexicon.hh"

#include <algorithm>

namespace seqshift {

PhonemeInventory::PhonemeInventory(const std::vector<std::string>& base_symbols) {
    for (const auto& base : base_symbols) {
        if (index_.count(base) > 0)
            throw ValidationError("duplicate phoneme symbol: " + base);
        index_[base] = static_cast<PhonemeId>(symbols_.size());
        symbols_.push_back(base);
        std::string twin = base + end_of_word_suffix();
        index_[twin] = static_cast<PhonemeId>(symbols_.size());
        symbols_.push_back(twin);
    }
    silence_id_ = static_cast<PhonemeId>(symbols_.size());
    index_[silence_symbol()] = silence_id_;
    symbols_.push_back(silence_symbol());
}

PhonemeId PhonemeInventory::id(const std::string& symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end())
        throw ValidationError("unknown phoneme: " + symbol);
    return it->second;
}

bool PhonemeInventory::contains(const std::string& symbol) const {
    return index_.count(symbol) > 0;
}

const std::string& PhonemeInventory::symbol(PhonemeId id) const {
    return symbols_.at(static_cast<size_t>(id));
}

bool PhonemeInventory::is_end_of_word(PhonemeId id) const {
    if (id == silence_id_)
        return false;
    const std::string& s = symbol(id);
    return !s.empty() && s.back() == '#';
}

PhonemeId PhonemeInventory::end_of_word_twin(PhonemeId base) const {
    if (base == silence_id_ || is_end_of_word(base))
        return base;
    return base + 1;  // twins are interleaved with their bases
}

PhonemeId PhonemeInventory::base_of(PhonemeId id) const {
    if (id == silence_id_ || !is_end_of_word(id))
        return id;
    return id - 1;
}

namespace {

std::string strip_stress(const std::string& raw) {
    if (!raw.empty() && raw.back() >= '0' && raw.back() <= '2')
        return raw.substr(0, raw.size() - 1);
    return raw;
}

}  // namespace

PhonemeInventory normalize_inventory(const std::vector<std::string>& raw_phonemes) {
    std::vector<std::string> bases;
    for (const auto& raw : raw_phonemes) {
        std::string base = strip_stress(raw);
        if (std::find(bases.begin(), bases.end(), base) == bases.end())
            bases.push_back(base);
    }
    return PhonemeInventory(bases);
}

void Lexicon::add_word(const std::string& word,
                       const std::vector<std::string>& phonemes) {
    if (phonemes.empty())
        throw ValidationError("empty pronunciation for word '" + word + "'");
    Pronunciation pron;
    for (const auto& raw : phonemes) {
        std::string base = strip_stress(raw);
        if (!inventory_.contains(base))
            throw ValidationError("pronunciation of '" + word +
                                  "' uses unknown phoneme '" + raw + "'");
        pron.push_back(inventory_.id(base));
    }
    pron.back() = inventory_.end_of_word_twin(inventory_.base_of(pron.back()));
    TokenId id = words_.add(word);
    prons_[id].push_back(std::move(pron));
}

const std::vector<Pronunciation>& Lexicon::pronunciations(TokenId word) const {
    auto it = prons_.find(word);
    if (it == prons_.end())
        throw ValidationError("word id " + std::to_string(word) +
                              " has no pronunciation");
    return it->second;
}

std::vector<TokenId> Lexicon::word_ids() const {
    std::vector<TokenId> ids;
    for (const auto& [id, prons] : prons_) {
        (void)prons;
        ids.push_back(id);
    }
    return ids;
}

Lexicon load_lexicon(const std::string& path, PhonemeInventory inventory) {
    Lexicon lex(std::move(inventory));
    auto lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto fields = split_on(lines[i], '\t');
        if (fields.size() != 2)
            throw ValidationError("bad lexicon entry at " + path + ":" +
                                  std::to_string(i + 1));
        lex.add_word(fields[0], split_whitespace(fields[1]));
    }
    return lex;
}

namespace {

PrefixTree build_tree(
        const std::vector<std::pair<TokenId, std::vector<int32_t>>>& entries) {
    if (entries.empty())
        throw ValidationError("empty lexicon");
    PrefixTree tree;
    tree.nodes.emplace_back();  // root
    for (const auto& [word, units] : entries) {
        int32_t node = 0;
        for (int32_t unit : units) {
            auto& children = tree.nodes[static_cast<size_t>(node)].children;
            auto it = children.find(unit);
            if (it == children.end()) {
                int32_t next = static_cast<int32_t>(tree.nodes.size());
                children.emplace(unit, next);
                tree.nodes.emplace_back();
                tree.nodes.back().label = unit;
                node = next;
            }
            else {
                node = it->second;
            }
        }
        auto& ends = tree.nodes[static_cast<size_t>(node)].word_ends;
        if (std::find(ends.begin(), ends.end(), word) == ends.end())
            ends.push_back(word);
    }
    return tree;
}

}  // namespace

PrefixTree build_prefix_tree(const Lexicon& lexicon) {
    std::vector<std::pair<TokenId, std::vector<int32_t>>> entries;
    for (TokenId word : lexicon.word_ids())
        for (const auto& pron : lexicon.pronunciations(word))
            entries.emplace_back(word, pron);
    return build_tree(entries);
}

PrefixTree build_unit_tree(
        const std::vector<std::pair<TokenId, std::vector<int32_t>>>& entries) {
    return build_tree(entries);
}

std::vector<std::pair<Pronunciation, TokenId>> PrefixTree::enumerate_words() const {
    std::vector<std::pair<Pronunciation, TokenId>> out;
    Pronunciation path;
    // Iterative DFS in label order.
    struct Frame {
        int32_t node;
        std::map<PhonemeId, int32_t>::const_iterator next;
    };
    std::vector<Frame> stack;
    stack.push_back({0, nodes[0].children.begin()});
    for (TokenId w : nodes[0].word_ends)
        out.emplace_back(path, w);
    while (!stack.empty()) {
        Frame& top = stack.back();
        const auto& node = nodes[static_cast<size_t>(top.node)];
        if (top.next == node.children.end()) {
            stack.pop_back();
            if (!path.empty())
                path.pop_back();
            continue;
        }
        int32_t child = top.next->second;
        PhonemeId label = top.next->first;
        ++top.next;
        path.push_back(label);
        for (TokenId w : nodes[static_cast<size_t>(child)].word_ends)
            out.emplace_back(path, w);
        stack.push_back({child, nodes[static_cast<size_t>(child)].children.begin()});
    }
    return out;
}

}  // namespace seqshift
