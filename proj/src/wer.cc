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

#include "seqshift/wer.hh"

#include <algorithm>

namespace seqshift {

namespace {

// Additive DP cost: total edits first, insertions+deletions second. Both
// components add along an alignment, so the lexicographic order is a
// valid DP semiring.
struct Cost {
    int32_t edits;
    int32_t indels;

    bool operator<(const Cost& o) const {
        if (edits != o.edits)
            return edits < o.edits;
        return indels < o.indels;
    }
    Cost operator+(const Cost& o) const { return {edits + o.edits, indels + o.indels}; }
};

enum Op : uint8_t { kMatch, kSub, kDel, kIns };

}  // namespace

WerReport compute_wer(const std::vector<std::string>& reference,
                      const std::vector<std::string>& hypothesis) {
    size_t n = reference.size();
    size_t m = hypothesis.size();
    std::vector<std::vector<Cost>> dp(n + 1, std::vector<Cost>(m + 1));
    std::vector<std::vector<Op>> back(n + 1, std::vector<Op>(m + 1, kMatch));

    for (size_t i = 1; i <= n; ++i) {
        dp[i][0] = {static_cast<int32_t>(i), static_cast<int32_t>(i)};
        back[i][0] = kDel;
    }
    for (size_t j = 1; j <= m; ++j) {
        dp[0][j] = {static_cast<int32_t>(j), static_cast<int32_t>(j)};
        back[0][j] = kIns;
    }

    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            bool match = reference[i - 1] == hypothesis[j - 1];
            Cost diag = dp[i - 1][j - 1] + Cost{match ? 0 : 1, 0};
            Cost del = dp[i - 1][j] + Cost{1, 1};
            Cost ins = dp[i][j - 1] + Cost{1, 1};
            // Backtracing prefers insertions/deletions over the diagonal on
            // ties so that substitutions land leftmost in the alignment.
            Cost best = ins;
            Op op = kIns;
            if (del < best) {
                best = del;
                op = kDel;
            }
            if (diag < best) {
                best = diag;
                op = match ? kMatch : kSub;
            }
            dp[i][j] = best;
            back[i][j] = op;
        }
    }

    WerReport report;
    report.ref_length = n;
    size_t i = n;
    size_t j = m;
    while (i > 0 || j > 0) {
        switch (back[i][j]) {
        case kMatch:
            --i;
            --j;
            break;
        case kSub:
            ++report.substitutions;
            --i;
            --j;
            break;
        case kDel:
            ++report.deletions;
            --i;
            break;
        case kIns:
            ++report.insertions;
            --j;
            break;
        }
    }
    return report;
}

double error_profile_delta(const WerReport& r1, const WerReport& r2) {
    if (r1.errors() == 0 || r2.errors() == 0)
        throw ValidationError("profile undefined for a zero-error report");
    double delta = 0.0;
    auto prop = [](size_t count, size_t total) {
        return static_cast<double>(count) / static_cast<double>(total);
    };
    delta = std::max(delta, std::abs(prop(r1.substitutions, r1.errors()) -
                                     prop(r2.substitutions, r2.errors())));
    delta = std::max(delta, std::abs(prop(r1.insertions, r1.errors()) -
                                     prop(r2.insertions, r2.errors())));
    delta = std::max(delta, std::abs(prop(r1.deletions, r1.errors()) -
                                     prop(r2.deletions, r2.errors())));
    return delta;
}

}  // namespace seqshift
