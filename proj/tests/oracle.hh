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

// Brute-force reference implementations used only by tests. They share no
// code with the scoring and search paths they check.

#ifndef SEQSHIFT_TESTS_ORACLE_HH
#define SEQSHIFT_TESTS_ORACLE_HH

#include <functional>
#include <optional>
#include <vector>

#include "seqshift/acoustic.hh"
#include "seqshift/lexicon.hh"
#include "seqshift/ngram.hh"
#include "seqshift/topology.hh"

namespace seqshift::oracle {

// All initial-to-final paths of a state graph over T frames, each scored
// like the DP would (emissions, beta-scaled HMM transitions, HMM exit).
struct PathScores {
    std::vector<double> log_scores;
    double total_log_prob;  // log-sum-exp accumulated in long double
    double best_log_prob;
    bool has_path() const { return !log_scores.empty(); }
};

PathScores enumerate_paths(const StateGraph& graph, const Posteriorgram& pg,
                           const TransitionModel& trans);

// Same enumeration for state-emitting (HMM/CTC) graphs with emissions
// supplied per (frame, state index), so context-dependent step scores can
// be plugged in.
PathScores enumerate_paths_by_state(
        const StateGraph& graph, int32_t frames,
        const std::function<double(int32_t, int32_t)>& emit,
        const TransitionModel& trans);

// Minimal edit operations by exhaustive alignment enumeration: among all
// minimal-cost alignments, the one with the fewest insertions+deletions,
// then with the leftmost substitutions.
struct EditCounts {
    size_t substitutions = 0;
    size_t insertions = 0;
    size_t deletions = 0;
    size_t cost() const { return substitutions + insertions + deletions; }
};

EditCounts enumerate_min_edits(const std::vector<std::string>& ref,
                               const std::vector<std::string>& hyp);

// Exhaustive closed-vocabulary decode: enumerates every word sequence up
// to max_words, scores each as best alignment score (per model scoring
// callback) plus scaled LM, returns the argmax. The per-sequence scorer
// receives the concatenated unit sequence and returns a natural-log
// alignment score, or nullopt when no alignment exists.
struct ExhaustiveResult {
    std::vector<TokenId> words;
    double log_score;
    bool found = false;
};

ExhaustiveResult exhaustive_word_search(
        const std::vector<TokenId>& vocabulary_words, size_t max_words,
        const std::function<std::optional<double>(const std::vector<TokenId>&)>&
                sequence_score);

}  // namespace seqshift::oracle

#endif  // SEQSHIFT_TESTS_ORACLE_HH
