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

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <set>

#include "seqshift/lexicon.hh"

using namespace seqshift;

TEST_CASE("normalize_inventory strips stress and builds twins") {
    PhonemeInventory inv = normalize_inventory({"AH0", "AH1", "AH2"});
    CHECK(inv.contains("AH"));
    CHECK(inv.contains("AH#"));
    CHECK(inv.size() == 3);  // AH, AH#, sil
    CHECK_FALSE(inv.contains("AH0"));
    CHECK(inv.is_end_of_word(inv.id("AH#")));
    CHECK_FALSE(inv.is_end_of_word(inv.id("AH")));
    CHECK_FALSE(inv.is_end_of_word(inv.silence_id()));
    CHECK(inv.end_of_word_twin(inv.id("AH")) == inv.id("AH#"));
    CHECK(inv.base_of(inv.id("AH#")) == inv.id("AH"));
}

TEST_CASE("normalize_inventory of a single plain phoneme") {
    PhonemeInventory inv = normalize_inventory({"T"});
    CHECK(inv.contains("T"));
    CHECK(inv.contains("T#"));
    CHECK(inv.size() == 3);
}

TEST_CASE("normalize_inventory symbol count is 2k plus silence") {
    // n stressed variants of k bases collapse to 2k symbols + silence.
    std::vector<std::string> raw;
    std::vector<std::string> bases = {"AA", "IY", "T", "S"};
    for (const auto& b : bases)
        for (char d : {'0', '1', '2'})
            raw.push_back(b + d);
    PhonemeInventory inv = normalize_inventory(raw);
    CHECK(inv.size() == 2 * bases.size() + 1);
}

TEST_CASE("lexicon applies end-of-word twin on add") {
    PhonemeInventory inv = normalize_inventory({"A", "B", "C"});
    Lexicon lex(inv);
    lex.add_word("w1", {"A", "B"});
    TokenId w1 = lex.words().lookup("w1");
    const auto& prons = lex.pronunciations(w1);
    REQUIRE(prons.size() == 1);
    REQUIRE(prons[0].size() == 2);
    CHECK(prons[0][0] == inv.id("A"));
    CHECK(prons[0][1] == inv.id("B#"));

    CHECK_THROWS_AS(lex.add_word("bad", {"Z"}), ValidationError);
    CHECK_THROWS_AS(lex.add_word("bad", {}), ValidationError);
}

TEST_CASE("prefix tree of two words with shared first phoneme") {
    PhonemeInventory inv = normalize_inventory({"a", "b", "c"});
    Lexicon lex(inv);
    lex.add_word("w1", {"a", "b"});
    lex.add_word("w2", {"a", "c"});
    PrefixTree tree = build_prefix_tree(lex);
    CHECK(tree.node_count() == 4);  // root, a, b#, c#
    auto words = tree.enumerate_words();
    CHECK(words.size() == 2);

    CHECK_THROWS_AS(build_prefix_tree(Lexicon(inv)), ValidationError);
}

TEST_CASE("homophones share a terminal node") {
    PhonemeInventory inv = normalize_inventory({"a"});
    Lexicon lex(inv);
    lex.add_word("w1", {"a"});
    lex.add_word("w2", {"a"});
    PrefixTree tree = build_prefix_tree(lex);
    CHECK(tree.node_count() == 2);
    const auto& ends = tree.nodes[1].word_ends;
    REQUIRE(ends.size() == 2);
    CHECK(ends[0] == lex.words().lookup("w1"));
    CHECK(ends[1] == lex.words().lookup("w2"));
}

TEST_CASE("node count equals distinct prefixes plus one") {
    PhonemeInventory inv = normalize_inventory({"a", "b", "c", "d"});
    Lexicon lex(inv);
    lex.add_word("w1", {"a", "b", "c"});
    lex.add_word("w2", {"a", "b", "d"});
    lex.add_word("w3", {"a", "b"});
    PrefixTree tree = build_prefix_tree(lex);

    // Brute-force oracle: enumerate all distinct non-empty prefixes of all
    // stored pronunciations.
    std::set<Pronunciation> prefixes;
    for (TokenId w : lex.word_ids())
        for (const auto& pron : lex.pronunciations(w))
            for (size_t len = 1; len <= pron.size(); ++len)
                prefixes.insert(Pronunciation(pron.begin(), pron.begin() + len));
    CHECK(tree.node_count() == prefixes.size() + 1);
}

TEST_CASE("tree paths reproduce the lexicon exactly") {
    PhonemeInventory inv = normalize_inventory({"a", "b", "c"});
    Lexicon lex(inv);
    lex.add_word("w1", {"a", "b"});
    lex.add_word("w2", {"a", "c"});
    lex.add_word("w3", {"b"});
    lex.add_word("w4", {"a", "b"});  // homophone of w1
    PrefixTree tree = build_prefix_tree(lex);

    std::set<std::pair<Pronunciation, TokenId>> from_tree;
    for (const auto& e : tree.enumerate_words())
        from_tree.insert(e);
    std::set<std::pair<Pronunciation, TokenId>> from_lex;
    for (TokenId w : lex.word_ids())
        for (const auto& pron : lex.pronunciations(w))
            from_lex.insert({pron, w});
    CHECK(from_tree == from_lex);

    // Internal path symbols lack the end-of-word flag; terminal ones
    // carry it.
    for (const auto& [pron, w] : from_tree) {
        (void)w;
        for (size_t i = 0; i + 1 < pron.size(); ++i)
            CHECK_FALSE(inv.is_end_of_word(pron[i]));
        CHECK(inv.is_end_of_word(pron.back()));
    }
}

TEST_CASE("lexicon file load") {
    std::string path = "/tmp/seqshift_test_lex.txt";
    write_text_file(path, "hello\tHH AH0 L OW1\nworld\tW ER1 L D\n");
    PhonemeInventory inv =
            normalize_inventory({"HH", "AH0", "L", "OW1", "W", "ER1", "D"});
    Lexicon lex = load_lexicon(path, inv);
    CHECK(lex.num_words() == 2);
    TokenId hello = lex.words().lookup("hello");
    const auto& pron = lex.pronunciations(hello)[0];
    CHECK(inv.symbol(pron.back()) == "OW#");
    std::remove(path.c_str());
}
