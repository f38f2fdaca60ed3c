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

#include <cmath>

#include "seqshift/ngram.hh"

using namespace seqshift;

namespace {

NGramModel train(const std::vector<std::string>& sentences, int order,
                 Smoothing smoothing, double d = 0.7) {
    Corpus c = make_corpus("t", sentences);
    Vocabulary v = build_vocabulary(c, 0);
    return estimate_ngram(count_ngrams(c, v, order), smoothing, d);
}

// Sums 10^lm_logprob over the predictable vocabulary for one context.
double context_mass(const NGramModel& m, const TokenSeq& context) {
    double sum = 0.0;
    for (TokenId id : m.vocab().predictable_ids())
        sum += std::pow(10.0, m.score(LmState{context}, id));
    return sum;
}

}  // namespace

TEST_CASE("count_ngrams bigrams of a b a") {
    Corpus c = make_corpus("t", {"a b a"});
    Vocabulary v = build_vocabulary(c, 0);
    auto counts = count_ngrams(c, v, 2);
    TokenId a = v.lookup("a");
    TokenId b = v.lookup("b");
    const auto& bi = counts.level(2);
    CHECK(bi.size() == 4);
    CHECK(bi.at({Vocabulary::kBos, a}) == 1);
    CHECK(bi.at({a, b}) == 1);
    CHECK(bi.at({b, a}) == 1);
    CHECK(bi.at({a, Vocabulary::kEos}) == 1);
}

TEST_CASE("count_ngrams empty corpus and unigrams") {
    Vocabulary v;
    auto counts = count_ngrams(Corpus{}, v, 2);
    CHECK(counts.level(1).empty());
    CHECK(counts.level(2).empty());

    Corpus c = make_corpus("t", {"a a b"});
    Vocabulary v2 = build_vocabulary(c, 0);
    auto uni = count_ngrams(c, v2, 1);
    TokenId a = v2.lookup("a");
    TokenId b = v2.lookup("b");
    CHECK(uni.level(1).at({a}) == 2);
    CHECK(uni.level(1).at({b}) == 1);
    CHECK(uni.level(1).at({Vocabulary::kEos}) == 1);
    CHECK(uni.level(1).count({Vocabulary::kBos}) == 0);

    CHECK_THROWS_AS(count_ngrams(c, v2, 0), ValidationError);
}

TEST_CASE("mle bigram from a a b") {
    NGramModel m = train({"a a b"}, 2, Smoothing::kMle);
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    CHECK(m.score(LmState{{a}}, a) == doctest::Approx(std::log10(0.5)));
    CHECK(m.score(LmState{{a}}, b) == doctest::Approx(std::log10(0.5)));
    CHECK(m.score(LmState{{Vocabulary::kBos}}, a) == doctest::Approx(0.0));
}

TEST_CASE("mle unigram from single token corpus") {
    NGramModel m = train({"a"}, 1, Smoothing::kMle);
    TokenId a = m.vocab().lookup("a");
    CHECK(m.score(LmState{}, a) == doctest::Approx(std::log10(0.5)));
    CHECK(m.score(LmState{}, Vocabulary::kEos) == doctest::Approx(std::log10(0.5)));
}

TEST_CASE("absolute discounting redistributes mass and normalizes") {
    // counts {a:2, b:1, </s>:1}, order 1, d = 0.5. Closed form:
    // N=4, K=3, gamma = 0.5*3/4 = 0.375, uniform over 4 predictable
    // symbols (a, b, </s>, <unk>).
    NGramModel m = train({"a a b"}, 1, Smoothing::kAbsoluteDiscount, 0.5);
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    double u = 0.375 / 4.0;
    CHECK(std::pow(10.0, m.score(LmState{}, a)) == doctest::Approx(1.5 / 4.0 + u));
    CHECK(std::pow(10.0, m.score(LmState{}, b)) == doctest::Approx(0.5 / 4.0 + u));
    CHECK(std::pow(10.0, m.score(LmState{}, Vocabulary::kUnk)) == doctest::Approx(u));
    CHECK(context_mass(m, {}) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(train({"a"}, 1, Smoothing::kAbsoluteDiscount, 1.5), ValidationError);
    CHECK_THROWS_AS(train({"a"}, 1, Smoothing::kAbsoluteDiscount, 0.0), ValidationError);
}

TEST_CASE("per-context normalization under absolute discounting") {
    NGramModel m = train({"a b a c", "b a a", "c b"}, 3,
                         Smoothing::kAbsoluteDiscount, 0.7);
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    TokenId c = m.vocab().lookup("c");
    std::vector<TokenSeq> contexts = {
            {}, {a}, {b}, {c}, {Vocabulary::kBos}, {a, b}, {b, a},
            {Vocabulary::kBos, a}, {c, b}, {a, a}};
    for (const auto& ctx : contexts)
        CHECK(context_mass(m, ctx) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("unseen bigram backs off with explicit weight") {
    NGramModel m = train({"a a b"}, 2, Smoothing::kAbsoluteDiscount, 0.5);
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    // Hand arithmetic: context (b) has one continuation (</s>) with count 1;
    // gamma(b) = 0.5*1/1 = 0.5; P(a|b) = gamma(b) * P_uni(a).
    double p_uni_a = std::pow(10.0, m.score(LmState{}, a));
    double got = std::pow(10.0, m.score(LmState{{b}}, a));
    CHECK(got == doctest::Approx(0.5 * p_uni_a));
}

TEST_CASE("lm state advances as order-1 suffix") {
    NGramModel m = train({"a b c a b"}, 3, Smoothing::kAbsoluteDiscount);
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    TokenId c = m.vocab().lookup("c");
    LmState s = m.initial_state();
    s = m.lm_logprob(s, a).second;
    s = m.lm_logprob(s, b).second;
    CHECK(s.context == TokenSeq{a, b});
    s = m.lm_logprob(s, c).second;
    CHECK(s.context == TokenSeq{b, c});
}

TEST_CASE("perplexity of uniform unigram equals vocabulary size") {
    // Uniform over 4 predictable symbols: a, b, </s>, <unk>.
    Vocabulary v;
    v.add("a");
    v.add("b");
    NGramModel m(1, v);
    for (TokenId id : v.predictable_ids())
        m.set_prob({id}, std::log10(0.25));
    Corpus c = make_corpus("t", {"a b a", "b"});
    auto res = perplexity(m, c);
    CHECK(res.ppl == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(res.oov_tokens == 0);
}

TEST_CASE("perplexity of deterministic mle corpus") {
    NGramModel m = train({"a"}, 1, Smoothing::kMle);
    Corpus c = make_corpus("t", {"a"});
    auto res = perplexity(m, c);
    CHECK(res.ppl == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.scored_tokens == 2);
}

TEST_CASE("perplexity errors on zero probability") {
    NGramModel m = train({"a a"}, 1, Smoothing::kMle);
    Corpus c = make_corpus("t", {"a b"});  // b unseen under mle
    CHECK_THROWS_WITH_AS(perplexity(m, c),
                         doctest::Contains("zero probability"), std::runtime_error);
    CHECK_THROWS_AS(perplexity(m, Corpus{}), ValidationError);
}

TEST_CASE("perplexity counts OOV separately") {
    NGramModel m = train({"a b"}, 1, Smoothing::kAbsoluteDiscount, 0.5);
    Corpus c = make_corpus("t", {"a z"});
    auto res = perplexity(m, c);
    CHECK(res.oov_tokens == 1);
    CHECK(res.ppl > 1.0);
}

TEST_CASE("mle training fit is at least as sharp as discounted") {
    std::vector<std::string> sents = {"a b a b", "a b b", "b a"};
    NGramModel mle = train(sents, 2, Smoothing::kMle);
    NGramModel ad = train(sents, 2, Smoothing::kAbsoluteDiscount, 0.7);
    Corpus c = make_corpus("t", sents);
    CHECK(perplexity(mle, c).ppl <= perplexity(ad, c).ppl + 1e-12);
}

TEST_CASE("renormalize_subword_ppl") {
    CHECK(renormalize_subword_ppl(7.25, 10, 10) == doctest::Approx(7.25));
    CHECK(renormalize_subword_ppl(10.0, 20, 10) == doctest::Approx(100.0));
    CHECK_THROWS_AS(renormalize_subword_ppl(10.0, 5, 0), ValidationError);
}

TEST_CASE("subword renormalization matches direct word-level computation") {
    // The total log-probability mass of a corpus is the same whether it is
    // accumulated per word or per subword token, so
    // ppl_word = ppl_subword^(tokens/words) must hold exactly when both
    // perplexities come from the same scored mass. Build that setting:
    // score a corpus with a subword-level model, derive both sides.
    Corpus words = make_corpus("t", {"ab ab ba", "ba ab"});
    BpeModel bpe = bpe_learn(words, 0);  // character level
    std::vector<std::string> sub_sentences;
    size_t token_count = 0;
    for (const auto& line : words.lines) {
        auto toks = bpe_apply(bpe, line);
        token_count += toks.size();
        std::string s;
        for (const auto& t : toks)
            s += t + " ";
        sub_sentences.push_back(s);
    }
    size_t word_count = words.running_words();
    Corpus subs = make_corpus("t-sub", sub_sentences);
    Vocabulary sv = build_vocabulary(subs, 0);
    NGramModel sub_lm = estimate_ngram(count_ngrams(subs, sv, 2),
                                       Smoothing::kAbsoluteDiscount, 0.5);

    auto res = perplexity(sub_lm, subs);
    // Direct word-level perplexity over the same mass: note each line also
    // scores one sentence end, so include line count on both sides.
    size_t lines = subs.lines.size();
    double total_log10 = -std::log10(res.ppl) *
                         static_cast<double>(res.scored_tokens);
    double word_ppl_direct =
            std::pow(10.0, -total_log10 / static_cast<double>(word_count + lines));
    double renorm = renormalize_subword_ppl(res.ppl, token_count + lines,
                                            word_count + lines);
    CHECK(renorm == doctest::Approx(word_ppl_direct).epsilon(1e-9));
}

TEST_CASE("arpa round trip preserves all scores") {
    NGramModel m = train({"a a b"}, 2, Smoothing::kMle);
    NGramModel r = read_arpa_string(write_arpa_string(m));
    TokenId a = m.vocab().lookup("a");
    TokenId b = m.vocab().lookup("b");
    std::vector<TokenSeq> states = {{Vocabulary::kBos}, {a}, {b}};
    std::vector<TokenId> tokens = {a, b, Vocabulary::kEos};
    for (const auto& st : states)
        for (TokenId tok : tokens) {
            double d1 = m.score(LmState{st}, tok);
            double d2 = r.score(LmState{st}, tok);
            CHECK(std::abs(d1 - d2) <= 1e-6);
        }
}

TEST_CASE("arpa round trip of discounted model within 1e-6") {
    NGramModel m = train({"a b a c a", "c b a"}, 2, Smoothing::kAbsoluteDiscount, 0.6);
    NGramModel r = read_arpa_string(write_arpa_string(m));
    for (TokenId ctx : m.vocab().predictable_ids())
        for (TokenId tok : m.vocab().predictable_ids()) {
            double d1 = m.score(LmState{{ctx}}, tok);
            double d2 = r.score(LmState{{ctx}}, tok);
            CHECK(std::abs(d1 - d2) <= 1e-6);
        }
}

TEST_CASE("arpa serialization is idempotent after one round trip") {
    NGramModel m = train({"a b c d a b c", "d c b a"}, 4,
                         Smoothing::kAbsoluteDiscount, 0.7);
    std::string once = write_arpa_string(read_arpa_string(write_arpa_string(m)));
    std::string twice = write_arpa_string(read_arpa_string(once));
    CHECK(once == twice);
}

TEST_CASE("arpa parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(read_arpa_string("\\data\\\n\n\\end\\\n"),
                         doctest::Contains("empty \\data\\"), ValidationError);

    std::string bad_count =
            "\\data\\\nngram 1=3\n\n\\1-grams:\n-0.3\ta\n-0.5\tb\n\n\\end\\\n";
    CHECK_THROWS_WITH_AS(read_arpa_string(bad_count),
                         doctest::Contains("\\1-grams"), ValidationError);

    std::string bad_header = "\\data\\\nngram 1=1\n\n\\2-grams:\n";
    CHECK_THROWS_AS(read_arpa_string(bad_header), ValidationError);
}
