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

#ifndef SEQSHIFT_WER_HH
#define SEQSHIFT_WER_HH

#include <limits>
#include <string>
#include <vector>

#include "seqshift/common.hh"

namespace seqshift {

struct WerReport {
    size_t substitutions = 0;
    size_t insertions = 0;
    size_t deletions = 0;
    size_t ref_length = 0;

    size_t errors() const { return substitutions + insertions + deletions; }
    double wer() const {
        if (ref_length == 0)
            return errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        return static_cast<double>(errors()) / static_cast<double>(ref_length);
    }

    void accumulate(const WerReport& other) {
        substitutions += other.substitutions;
        insertions += other.insertions;
        deletions += other.deletions;
        ref_length += other.ref_length;
    }

    bool operator==(const WerReport& other) const = default;
};

// Levenshtein alignment with unit costs. Among minimal-cost alignments the
// one with fewer insertions+deletions wins, then the one whose
// substitutions come leftmost (deterministic backtrace).
WerReport compute_wer(const std::vector<std::string>& reference,
                      const std::vector<std::string>& hypothesis);

// Max absolute difference of the S/I/D proportions of two reports.
// Undefined (throws) when either report has no errors.
double error_profile_delta(const WerReport& r1, const WerReport& r2);

}  // namespace seqshift

#endif  // SEQSHIFT_WER_HH
