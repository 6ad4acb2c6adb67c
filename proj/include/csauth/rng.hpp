// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_RNG_HPP
#define CSAUTH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace csauth {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Splittable counter scheme: mixes (master seed, stream, index) into one
/// 64-bit seed, so parallel trial order cannot change which seed a trial gets.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream,
                                        std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xd1342543de82ef95ull;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0xaf251af3b0f025b5ull;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

/// Deterministic random source. Wraps the standard mt19937_64 engine but keeps
/// all value derivation (uniform, normal, bounded ints) in-house so streams are
/// reproducible regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; both uniforms are consumed every call.
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Rayleigh amplitude with mean-square omega: sqrt of Exp(mean = omega).
    double rayleigh(double omega) {
        if (!(omega > 0.0)) throw std::invalid_argument("rayleigh: omega must be positive");
        double u = uniform01();  // in [0, 1), so 1-u in (0, 1]
        return std::sqrt(-omega * std::log(1.0 - u));
    }

    /// Uniform integer in [0, bound) by rejection, bias-free.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("below: bound must be nonzero");
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace csauth

#endif  // CSAUTH_RNG_HPP
