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

#ifndef SEQSHIFT_COMMON_HH
#define SEQSHIFT_COMMON_HH

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqshift {

using TokenId = int32_t;
using TokenSeq = std::vector<TokenId>;

// Validation failures (bad inputs, malformed files, inconsistent configs).
// The CLI maps these to exit code 2; everything else to 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg)
            : std::runtime_error(msg) {}
};

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool log_is_zero(double lp) {
    return lp == kLogZero;
}

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
    if (log_is_zero(a))
        return b;
    if (log_is_zero(b))
        return a;
    if (a < b)
        std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

std::vector<std::string> split_whitespace(const std::string& line);
std::vector<std::string> split_on(const std::string& line, char sep);

std::string read_text_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// "%.1f" style formatting helpers; all report output funnels through these
// so that emitted bytes are stable.
std::string format_fixed(double value, int decimals);

}  // namespace seqshift

#endif  // SEQSHIFT_COMMON_HH
