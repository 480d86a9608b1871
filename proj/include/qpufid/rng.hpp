// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file rng.hpp
 * Seeded random streams with counter-derived substreams.
 *
 * Every experiment owns one root stream whose seed is recorded in the run
 * manifest. Independent trials draw from substreams derived by trial index,
 * so results are reproducible regardless of scheduling or thread count.
 */
#pragma once

#include <cstdint>
#include <random>

namespace qpufid {

/// SplitMix64 finalizer, used to diffuse seeds and derive substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed)
        : seed_(seed), engine_(splitmix64(seed)) {}

    /// Child stream for trial/device `counter`. Pure function of (seed, counter).
    [[nodiscard]] RngStream substream(std::uint64_t counter) const {
        return RngStream(splitmix64(seed_ ^ (0xd1b54a32d192ed03ULL * (counter + 1))));
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    /// Uniform double in [0, 1).
    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Standard normal draw.
    double gaussian() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t integer(std::uint64_t bound) {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace qpufid
