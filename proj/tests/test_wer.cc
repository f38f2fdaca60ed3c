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

#include "oracle.hh"
#include "seqshift/wer.hh"

using namespace seqshift;

namespace {

using Words = std::vector<std::string>;

// All sequences over {a,b,c} of length 0..max_len.
std::vector<Words> all_sequences(size_t max_len) {
    std::vector<Words> out = {{}};
    std::vector<Words> frontier = {{}};
    const Words alphabet = {"a", "b", "c"};
    for (size_t len = 1; len <= max_len; ++len) {
        std::vector<Words> next;
        for (const auto& seq : frontier)
            for (const auto& w : alphabet) {
                Words s = seq;
                s.push_back(w);
                next.push_back(s);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("compute_wer basics") {
    WerReport exact = compute_wer({"a", "b", "c"}, {"a", "b", "c"});
    CHECK(exact.errors() == 0);
    CHECK(exact.wer() == 0.0);

    WerReport del = compute_wer({"a", "b", "c"}, {"a", "c"});
    CHECK(del.deletions == 1);
    CHECK(del.substitutions == 0);
    CHECK(del.insertions == 0);
    CHECK(del.wer() == doctest::Approx(1.0 / 3.0));

    WerReport mixed = compute_wer({"a", "b", "c"}, {"a", "x", "c", "d"});
    CHECK(mixed.substitutions == 1);
    CHECK(mixed.insertions == 1);
    CHECK(mixed.deletions == 0);
    CHECK(mixed.wer() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("compute_wer empty sequences") {
    CHECK(compute_wer({}, {}).wer() == 0.0);
    WerReport only_ins = compute_wer({}, {"a", "b"});
    CHECK(only_ins.insertions == 2);
    WerReport only_del = compute_wer({"a", "b"}, {});
    CHECK(only_del.deletions == 2);
    CHECK(only_del.wer() == 1.0);
}

TEST_CASE("substitutions preferred over insert+delete pairs") {
    // "ab" vs "ba": two substitutions, not del+match+ins.
    WerReport r = compute_wer({"a", "b"}, {"b", "a"});
    CHECK(r.substitutions == 2);
    CHECK(r.insertions == 0);
    CHECK(r.deletions == 0);
}

TEST_CASE("compute_wer equals exhaustive minimal-edit enumeration") {
    auto seqs = all_sequences(4);
    for (const auto& ref : seqs) {
        for (const auto& hyp : seqs) {
            WerReport got = compute_wer(ref, hyp);
            auto expect = oracle::enumerate_min_edits(ref, hyp);
            CHECK(got.substitutions == expect.substitutions);
            CHECK(got.insertions == expect.insertions);
            CHECK(got.deletions == expect.deletions);
        }
    }
}

TEST_CASE("swapping arguments swaps insertions and deletions") {
    auto seqs = all_sequences(3);
    for (const auto& ref : seqs)
        for (const auto& hyp : seqs) {
            WerReport fwd = compute_wer(ref, hyp);
            WerReport rev = compute_wer(hyp, ref);
            CHECK(fwd.substitutions == rev.substitutions);
            CHECK(fwd.insertions == rev.deletions);
            CHECK(fwd.deletions == rev.insertions);
        }
}

TEST_CASE("error_profile_delta") {
    WerReport a{2, 1, 1, 10};   // 50/25/25
    WerReport b{6, 2, 2, 20};   // 60/20/20
    CHECK(error_profile_delta(a, a) == 0.0);
    CHECK(error_profile_delta(a, b) == doctest::Approx(0.10));

    WerReport clean{0, 0, 0, 5};
    CHECK_THROWS_WITH_AS(error_profile_delta(a, clean),
                         doctest::Contains("profile undefined"), ValidationError);
}

TEST_CASE("profiles use aggregate counts, not per-utterance means") {
    // Three utterances with different error mixes; the aggregate profile
    // comes from summed counts.
    WerReport u1{1, 0, 0, 4};
    WerReport u2{0, 2, 0, 4};
    WerReport u3{1, 0, 2, 4};
    WerReport agg;
    agg.accumulate(u1);
    agg.accumulate(u2);
    agg.accumulate(u3);
    CHECK(agg.substitutions == 2);
    CHECK(agg.insertions == 2);
    CHECK(agg.deletions == 2);
    CHECK(agg.ref_length == 12);
    // Hand-checked: proportions 1/3 each.
    WerReport uniform{5, 5, 5, 100};
    CHECK(error_profile_delta(agg, uniform) == doctest::Approx(0.0));
}
