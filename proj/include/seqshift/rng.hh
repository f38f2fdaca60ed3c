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

#ifndef SEQSHIFT_RNG_HH
#define SEQSHIFT_RNG_HH

#include <cmath>
#include <cstdint>

namespace seqshift {

// Deterministic random stream (splitmix64 + Box-Muller). Hand-rolled so
// that generated artifacts are identical across standard libraries and
// platforms. Streams for independent units of work are derived via
// substream(), which keeps results independent of scheduling order.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed)
            : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1): never exactly 0, so log() below is finite.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Index below a bound, by rejection (unbiased).
    uint64_t next_index(uint64_t bound) {
        uint64_t threshold = (~bound + 1) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold)
                return r % bound;
        }
    }

    // Independent stream for the given work index, e.g. one per utterance.
    RandomStream substream(uint64_t index) const {
        RandomStream child(state_ ^ (0x5851f42d4c957f2dULL * (index + 1)));
        child.next_u64();
        return child;
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace seqshift

#endif  // SEQSHIFT_RNG_HH
