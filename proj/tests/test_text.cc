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

#include "seqshift/rng.hh"
#include "seqshift/text.hh"

using namespace seqshift;

namespace {

const char* kEow = BpeModel::end_of_word_marker();

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i)
            out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

TEST_CASE("vocabulary reserves fixed ids") {
    Vocabulary v;
    CHECK(v.lookup("<s>") == Vocabulary::kBos);
    CHECK(v.lookup("</s>") == Vocabulary::kEos);
    CHECK(v.lookup("<unk>") == Vocabulary::kUnk);
    CHECK(v.size() == 3);
    TokenId a = v.add("a");
    CHECK(a == 3);
    CHECK(v.add("a") == 3);
    CHECK(v.lookup("missing") == Vocabulary::kUnk);
}

TEST_CASE("build_vocabulary orders by frequency then lexicographically") {
    Corpus c = make_corpus("t", {"a b a"});
    Vocabulary v = build_vocabulary(c, 0);
    CHECK(v.size() == 5);
    CHECK(v.lookup("a") == 3);  // more frequent, comes first
    CHECK(v.lookup("b") == 4);

    Corpus tie = make_corpus("t", {"a b"});
    Vocabulary v1 = build_vocabulary(tie, 1);
    CHECK(v1.contains("a"));
    CHECK_FALSE(v1.contains("b"));

    CHECK_THROWS_AS(build_vocabulary(Corpus{}, 0), ValidationError);
}

TEST_CASE("build_vocabulary size cap keeps lexicographically smallest on full tie") {
    // Six distinct words, each once; cap 3 keeps the three smallest.
    Corpus c = make_corpus("t", {"f e d c b a"});
    Vocabulary v = build_vocabulary(c, 3);
    // Independent oracle: count, sort by (count desc, word asc), truncate.
    std::vector<std::string> expect = {"a", "b", "c"};
    for (const auto& w : expect)
        CHECK(v.contains(w));
    CHECK(v.num_regular() == 3);
    CHECK_FALSE(v.contains("d"));
}

TEST_CASE("oov_rate") {
    Corpus c = make_corpus("t", {"a b c"});
    Vocabulary v;
    v.add("a");
    v.add("b");
    CHECK(oov_rate(c, v) == doctest::Approx(1.0 / 3.0));

    Corpus c2 = make_corpus("t", {"a a"});
    CHECK(oov_rate(c2, v) == 0.0);

    CHECK(oov_rate(Corpus{}, v) == 0.0);
}

TEST_CASE("oov_rate is zero for unlimited self vocabulary") {
    RandomStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> sentences;
        int n = 1 + static_cast<int>(rng.next_index(5));
        for (int i = 0; i < n; ++i) {
            std::string line;
            int words = 1 + static_cast<int>(rng.next_index(6));
            for (int w = 0; w < words; ++w)
                line += std::string(1, static_cast<char>('a' + rng.next_index(4))) + " ";
            sentences.push_back(line);
        }
        Corpus c = make_corpus("t", sentences);
        CHECK(oov_rate(c, build_vocabulary(c, 0)) == 0.0);
    }
}

TEST_CASE("bpe_learn counts pairs over marked symbols") {
    // "ab" occurs three times: the only pair (a, b</w>) has count 3.
    Corpus c = make_corpus("t", {"ab ab ab"});
    BpeModel m = bpe_learn(c, 1);
    REQUIRE(m.merges.size() == 1);
    CHECK(m.merges[0].first == "a");
    CHECK(m.merges[0].second == std::string("b") + kEow);
}

TEST_CASE("bpe_learn with zero merges is character level") {
    Corpus c = make_corpus("t", {"ab"});
    BpeModel m = bpe_learn(c, 0);
    CHECK(m.merges.empty());
    CHECK(m.known_symbol("a"));
    CHECK(m.known_symbol(std::string("b") + kEow));
}

TEST_CASE("bpe_learn pair-count tie broken lexicographically") {
    // Pairs (a, b</w>) and (b, a</w>) both have count 1.
    Corpus c = make_corpus("t", {"ab ba"});
    BpeModel m = bpe_learn(c, 1);
    REQUIRE(m.merges.size() == 1);
    CHECK(m.merges[0].first == "a");
    CHECK(m.merges[0].second == std::string("b") + kEow);
    CHECK_THROWS_AS(bpe_learn(Corpus{}, 1), ValidationError);
}

TEST_CASE("bpe_apply replays merges in order") {
    BpeModel empty;
    empty.vocab = {"a", std::string("b") + kEow};
    auto toks = bpe_apply_word(empty, "ab");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0] == "a");
    CHECK(toks[1] == std::string("b") + kEow);

    BpeModel one;
    one.merges = {{"a", std::string("b") + kEow}};
    one.vocab = {"a", std::string("b") + kEow, std::string("ab") + kEow};
    auto merged = bpe_apply_word(one, "ab");
    REQUIRE(merged.size() == 1);
    CHECK(merged[0] == std::string("ab") + kEow);

    // Merges replayed left to right: "aab" -> [a, ab</w>].
    auto aab = bpe_apply_word(one, "aab");
    REQUIRE(aab.size() == 2);
    CHECK(aab[0] == "a");
    CHECK(aab[1] == std::string("ab") + kEow);
}

TEST_CASE("bpe_apply maps unseen characters to unknown") {
    Corpus c = make_corpus("t", {"ab"});
    BpeModel m = bpe_learn(c, 0);
    auto toks = bpe_apply_word(m, "az");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0] == "a");
    CHECK(toks[1] == Vocabulary::unk_symbol());
}

TEST_CASE("bpe segmentation is lossless and never unknown on training data") {
    RandomStream rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::string> sentences;
        for (int i = 0; i < 4; ++i) {
            std::string line;
            int words = 1 + static_cast<int>(rng.next_index(5));
            for (int w = 0; w < words; ++w) {
                int len = 1 + static_cast<int>(rng.next_index(4));
                std::string word;
                for (int k = 0; k < len; ++k)
                    word += static_cast<char>('a' + rng.next_index(3));
                line += word + " ";
            }
            sentences.push_back(line);
        }
        Corpus c = make_corpus("t", sentences);
        BpeModel m = bpe_learn(c, trial);  // vary merge count
        for (const auto& line : c.lines) {
            auto tokens = bpe_apply(m, line);
            for (const auto& t : tokens)
                CHECK(t != Vocabulary::unk_symbol());
            CHECK(join(bpe_join(tokens)) == join(line));
        }
    }
}

TEST_CASE("token_word_ratio") {
    Corpus c = make_corpus("t", {"ab cd"});
    BpeModel chars = bpe_learn(c, 0);
    CHECK(token_word_ratio(chars, c) == doctest::Approx(2.0));

    // Enough merges keep every word whole.
    BpeModel full = bpe_learn(c, 10);
    CHECK(token_word_ratio(full, c) == doctest::Approx(1.0));

    Corpus empty_lines;
    empty_lines.lines.push_back({});
    CHECK_THROWS_AS(token_word_ratio(chars, empty_lines), ValidationError);
}

TEST_CASE("token_word_ratio is at least one") {
    RandomStream rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::string> sentences;
        for (int i = 0; i < 3; ++i) {
            std::string line;
            for (int w = 0; w < 4; ++w) {
                int len = 1 + static_cast<int>(rng.next_index(5));
                std::string word;
                for (int k = 0; k < len; ++k)
                    word += static_cast<char>('a' + rng.next_index(3));
                line += word + " ";
            }
            sentences.push_back(line);
        }
        Corpus c = make_corpus("t", sentences);
        BpeModel m = bpe_learn(c, static_cast<size_t>(rng.next_index(8)));
        CHECK(token_word_ratio(m, c) >= 1.0);
    }
}

TEST_CASE("bpe model file round trip") {
    Corpus c = make_corpus("t", {"abc abd abc"});
    BpeModel m = bpe_learn(c, 3);
    std::string path = "/tmp/seqshift_test_bpe.model";
    write_bpe_model(m, path);
    BpeModel r = read_bpe_model(path);
    CHECK(r.merges == m.merges);
    CHECK(bpe_apply_word(r, "abc") == bpe_apply_word(m, "abc"));
    std::remove(path.c_str());
}

TEST_CASE("vocabulary file round trip") {
    Corpus c = make_corpus("t", {"b a a"});
    Vocabulary v = build_vocabulary(c, 0);
    std::string path = "/tmp/seqshift_test_vocab.txt";
    write_vocabulary(v, path);
    Vocabulary r = read_vocabulary(path);
    CHECK(r.size() == v.size());
    CHECK(r.lookup("a") == v.lookup("a"));
    CHECK(r.lookup("b") == v.lookup("b"));
    std::remove(path.c_str());
}

TEST_CASE("utf8 aware character split") {
    auto chars = utf8_chars("aßc");
    REQUIRE(chars.size() == 3);
    CHECK(chars[0] == "a");
    CHECK(chars[1] == "ß");
    CHECK(chars[2] == "c");
}
