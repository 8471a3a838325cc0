// Copyright 2026 The relq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELQ_RNG_H
#define RELQ_RNG_H

#include <cstdint>
#include <limits>
#include <random>

namespace relq {

/// SplitMix64 finalizer over (seed, stream). Used to derive independent per-run streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator. Every stochastic operation in the library takes one of these
/// explicitly, so a run replays bit-exactly from its seed.
class Rng {
   public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() {
        return std::numeric_limits<result_type>::min();
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }
    result_type operator()() {
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 bits of randomness.
    double uniform();
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    bool bernoulli(double p);
    double normal();

    /// Independent child stream; depends only on this generator's seed and `stream`.
    Rng split(std::uint64_t stream) const;

    std::uint64_t seed() const {
        return seed_;
    }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace relq

#endif
