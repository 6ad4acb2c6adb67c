// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_KEY_SCHEDULE_HPP
#define CSAUTH_KEY_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace csauth::key {

using BitSequence = std::vector<std::uint8_t>;

/// Feedback polynomial over GF(2), stored as the full exponent set of its
/// nonzero terms, e.g. x^3 + x + 1 -> order 3, taps {3, 1, 0}.
struct PolynomialTaps {
    int order = 0;
    std::vector<int> taps;
};

enum class ShiftStrategy {
    Rotate,     // round k feeds the gains rotated left by k-1
    Flip,       // round 1 feeds the gains, later rounds the reversed gains (rotating)
    MirrorSum,  // round 1 feeds the gains, later rounds gains + reversed gains (rotating)
};

struct ShiftSchedule {
    std::vector<std::uint32_t> shifts;  // rounds * L entries, each in [0, 2^order)
    int rounds = 1;
};

inline void validate_gains(const std::vector<double>& gains) {
    if (gains.size() < 2) throw std::invalid_argument("channel gains: need at least 2 values");
    for (double g : gains)
        if (!(g >= 0.0)) throw std::invalid_argument("channel gains: values must be non-negative");
}

/// Binary seed from mean-centered gains: bit j is 1 iff gains[j] >= mean.
/// The step function is right-continuous (equality maps to 1). A produced
/// all-zero seed would dead-lock the shift register, so bit 0 is forced to 1
/// in that case; with the >= convention this is unreachable but kept so both
/// endpoints repair identically.
inline BitSequence derive_seed(const std::vector<double>& gains) {
    validate_gains(gains);
    const auto [lo, hi] = std::minmax_element(gains.begin(), gains.end());
    // zero spread steps to 1 everywhere; also dodges an inexact accumulated mean
    if (*lo == *hi) return BitSequence(gains.size(), 1);
    const double mean =
        std::accumulate(gains.begin(), gains.end(), 0.0) / static_cast<double>(gains.size());
    BitSequence seed(gains.size());
    bool any = false;
    for (std::size_t j = 0; j < gains.size(); ++j) {
        seed[j] = gains[j] >= mean ? 1 : 0;
        any = any || seed[j];
    }
    if (!any) seed[0] = 1;
    return seed;
}

/// One canonical primitive polynomial per register order. Every entry is the
/// lexicographically-smallest trinomial, falling back to the smallest
/// pentanomial where no primitive trinomial exists; the test suite re-verifies
/// full period 2^r - 1 for all of them by exhaustive cycle enumeration. Both
/// link endpoints must embed identical data, so this table is versioned API.
inline PolynomialTaps primitive_polynomial(int order) {
    if (order < 2 || order > 24)
        throw std::out_of_range("primitive_polynomial: supported orders are 2..24");
    static const std::vector<std::vector<int>> table = {
        {2, 1, 0},         // x^2 + x + 1
        {3, 1, 0},         // x^3 + x + 1
        {4, 1, 0},         // x^4 + x + 1
        {5, 2, 0},         // x^5 + x^2 + 1
        {6, 1, 0},         // x^6 + x + 1
        {7, 1, 0},         // x^7 + x + 1
        {8, 4, 3, 2, 0},   // x^8 + x^4 + x^3 + x^2 + 1
        {9, 4, 0},         // x^9 + x^4 + 1
        {10, 3, 0},        // x^10 + x^3 + 1
        {11, 2, 0},        // x^11 + x^2 + 1
        {12, 6, 4, 1, 0},  // x^12 + x^6 + x^4 + x + 1
        {13, 4, 3, 1, 0},  // x^13 + x^4 + x^3 + x + 1
        {14, 5, 3, 1, 0},  // x^14 + x^5 + x^3 + x + 1
        {15, 1, 0},        // x^15 + x + 1
        {16, 5, 3, 2, 0},  // x^16 + x^5 + x^3 + x^2 + 1
        {17, 3, 0},        // x^17 + x^3 + 1
        {18, 7, 0},        // x^18 + x^7 + 1
        {19, 5, 2, 1, 0},  // x^19 + x^5 + x^2 + x + 1
        {20, 3, 0},        // x^20 + x^3 + 1
        {21, 2, 0},        // x^21 + x^2 + 1
        {22, 1, 0},        // x^22 + x + 1
        {23, 5, 0},        // x^23 + x^5 + 1
        {24, 4, 3, 1, 0},  // x^24 + x^4 + x^3 + x + 1
    };
    return PolynomialTaps{order, table[static_cast<std::size_t>(order - 2)]};
}

/// Maximal-length sequence from a Fibonacci shift register, bit recurrence
/// a[i] = XOR of a[i - order + t] over feedback taps t < order. Emits the full
/// period 2^order - 1 starting with the seed bits, then appends one 0 so the
/// result has length 2^order with ones and zeros exactly balanced.
inline BitSequence lfsr_msequence(const BitSequence& seed, const PolynomialTaps& poly) {
    if (poly.order < 2 || poly.order > 24)
        throw std::invalid_argument("lfsr_msequence: unsupported order");
    if (seed.size() != static_cast<std::size_t>(poly.order))
        throw std::invalid_argument("lfsr_msequence: seed length must equal the register order");
    if (std::find(seed.begin(), seed.end(), 1) == seed.end())
        throw std::invalid_argument("lfsr_msequence: all-zero seed");

    const std::size_t period = (std::size_t{1} << poly.order) - 1;
    BitSequence out;
    out.reserve(period + 1);
    out.insert(out.end(), seed.begin(), seed.end());
    std::vector<int> low_taps;
    for (int t : poly.taps)
        if (t < poly.order) low_taps.push_back(t);
    for (std::size_t i = seed.size(); i < period; ++i) {
        std::uint8_t b = 0;
        for (int t : low_taps) b ^= out[i - static_cast<std::size_t>(poly.order) + t];
        out.push_back(b);
    }
    out.push_back(0);
    return out;
}

namespace detail {

inline std::vector<double> rotate_left(std::vector<double> v, std::size_t k) {
    if (!v.empty())
        std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k % v.size()), v.end());
    return v;
}

inline std::vector<double> round_input(const std::vector<double>& gains, int round,
                                       ShiftStrategy strategy) {
    if (round == 0) return gains;
    switch (strategy) {
        case ShiftStrategy::Rotate:
            return rotate_left(gains, static_cast<std::size_t>(round));
        case ShiftStrategy::Flip: {
            std::vector<double> r(gains.rbegin(), gains.rend());
            return rotate_left(std::move(r), static_cast<std::size_t>(round - 1));
        }
        case ShiftStrategy::MirrorSum: {
            std::vector<double> s(gains.size());
            for (std::size_t j = 0; j < gains.size(); ++j)
                s[j] = gains[j] + gains[gains.size() - 1 - j];
            return rotate_left(std::move(s), static_cast<std::size_t>(round - 1));
        }
    }
    throw std::logic_error("round_input: unknown strategy");
}

/// Resize the derived seed to the register order: cycle it when too short,
/// truncate when too long. Truncation can land on an all-zero prefix, which
/// gets the same bit-0 repair as seed derivation.
inline BitSequence adapt_seed(const BitSequence& seed, int order) {
    BitSequence out(static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = seed[i % seed.size()];
    if (std::find(out.begin(), out.end(), 1) == out.end()) out[0] = 1;
    return out;
}

}  // namespace detail

/// Cyclic-shift schedule: round k maps the running cumulative sum of its input
/// gains onto [0, 2^order) via shift_j = round(2^order * cumsum_j / sum) mod
/// 2^order. Later rounds feed deterministic transforms of the gains (see
/// ShiftStrategy), extending the schedule to rounds * L entries. The last
/// shift of each round is always 0, so the unshifted sequence participates.
inline ShiftSchedule shift_schedule(const std::vector<double>& gains, int order, int rounds,
                                    ShiftStrategy strategy = ShiftStrategy::Rotate) {
    if (gains.empty()) throw std::invalid_argument("shift_schedule: empty gains");
    for (double g : gains)
        if (!(g >= 0.0)) throw std::invalid_argument("shift_schedule: gains must be non-negative");
    if (order < 1 || order > 31) throw std::invalid_argument("shift_schedule: bad order");
    if (rounds < 1) throw std::invalid_argument("shift_schedule: rounds must be >= 1");

    const double size = std::pow(2.0, order);
    const std::uint32_t mod = std::uint32_t{1} << order;
    ShiftSchedule schedule;
    schedule.rounds = rounds;
    schedule.shifts.reserve(gains.size() * static_cast<std::size_t>(rounds));
    for (int k = 0; k < rounds; ++k) {
        const auto input = detail::round_input(gains, k, strategy);
        const double total = std::accumulate(input.begin(), input.end(), 0.0);
        if (!(total > 0.0)) throw std::invalid_argument("shift_schedule: gains sum to zero");
        double running = 0.0;
        for (double g : input) {
            running += g;
            const auto raw = static_cast<std::uint64_t>(std::llround(size * running / total));
            schedule.shifts.push_back(static_cast<std::uint32_t>(raw % mod));
        }
    }
    return schedule;
}

namespace detail {

/// Integer sum of all cyclically shifted m-sequence copies (the accumulator
/// right before normalization). Each copy is balanced, so the exact total is
/// shifts.size() * 2^(order-1).
inline std::vector<std::uint32_t> shift_sum(const std::vector<double>& gains, int order,
                                            int rounds, ShiftStrategy strategy) {
    const auto poly = primitive_polynomial(order);
    const auto mseq = lfsr_msequence(adapt_seed(derive_seed(gains), order), poly);
    const std::size_t size = std::size_t{1} << order;

    std::vector<std::uint32_t> acc(size, 0);
    for (std::uint32_t s : shift_schedule(gains, order, rounds, strategy).shifts) {
        // acc[i] += mseq[(i + s) mod size], split to avoid the modulo
        const std::size_t head = size - s;
        for (std::size_t i = 0; i < head; ++i) acc[i] += mseq[i + s];
        for (std::size_t i = head; i < size; ++i) acc[i] += mseq[i - head];
    }
    return acc;
}

}  // namespace detail

/// Shared 2D key: seed the register from the gains, spread one m-sequence over
/// the full index space by cyclic shifts, sum, min-max normalize to [0, 1],
/// and reshape row-major into rows x cols. Bit-deterministic in its inputs;
/// the maximal entries land on exactly 1.0, which the tag layer relies on.
inline Eigen::MatrixXd synthesize_matrix(const std::vector<double>& gains, Eigen::Index rows,
                                         Eigen::Index cols, int rounds,
                                         ShiftStrategy strategy = ShiftStrategy::Rotate) {
    validate_gains(gains);
    if (rows < 1 || cols < 1) throw std::invalid_argument("synthesize_matrix: bad dimensions");
    if (rows >= cols)
        throw std::invalid_argument("synthesize_matrix: need rows < cols (compression)");
    const auto total = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if ((total & (total - 1)) != 0)
        throw std::invalid_argument("synthesize_matrix: rows * cols must be a power of two");
    int order = 0;
    while ((std::uint64_t{1} << order) < total) ++order;
    if (order < 2 || order > 24)
        throw std::invalid_argument("synthesize_matrix: rows * cols outside supported range");

    const auto acc = detail::shift_sum(gains, order, rounds, strategy);
    const auto [lo_it, hi_it] = std::minmax_element(acc.begin(), acc.end());
    const double lo = *lo_it;
    const double span = static_cast<double>(*hi_it) - lo;
    if (!(span > 0.0)) throw std::logic_error("synthesize_matrix: degenerate accumulator");

    Eigen::MatrixXd phi(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            phi(i, j) =
                (static_cast<double>(acc[static_cast<std::size_t>(i * cols + j)]) - lo) / span;
    return phi;
}

}  // namespace csauth::key

#endif  // CSAUTH_KEY_SCHEDULE_HPP
