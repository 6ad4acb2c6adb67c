// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_PHY_CHANNEL_HPP
#define CSAUTH_PHY_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "csauth/rng.hpp"
#include "csauth/stats.hpp"

namespace csauth::phy {

struct ChannelConfig {
    int channels = 4;        // diversity branches combined at the receiver
    double omega = 1.0;      // mean-square fading amplitude
    double snr_db = 40.0;    // symbol energy over per-branch noise variance, before combining
    double loss_ratio = 0.0; // fraction of message positions that never arrive
};

inline void validate(const ChannelConfig& cfg) {
    if (cfg.channels < 1) throw std::invalid_argument("channel config: need >= 1 channel");
    if (!(cfg.omega > 0.0)) throw std::invalid_argument("channel config: omega must be positive");
    if (!(cfg.loss_ratio >= 0.0) || cfg.loss_ratio >= 1.0)
        throw std::invalid_argument("channel config: loss ratio must be in [0, 1)");
}

/// i.i.d. Rayleigh amplitudes with mean-square omega.
inline Eigen::VectorXd rayleigh_sample(double omega, Eigen::Index count, Rng& rng) {
    if (!(omega > 0.0)) throw std::invalid_argument("rayleigh_sample: omega must be positive");
    if (count < 1) throw std::invalid_argument("rayleigh_sample: count must be positive");
    Eigen::VectorXd h(count);
    for (Eigen::Index i = 0; i < count; ++i) h(i) = rng.rayleigh(omega);
    return h;
}

struct QuantizerSpec {
    int bits = 16;
    double lo = 0.0;
    double hi = 1.0;
};

struct QuantizeResult {
    std::vector<std::uint8_t> bits;  // one bit per element, MSB first per value
    std::size_t clipped = 0;         // values outside [lo, hi], saturated
};

inline void validate(const QuantizerSpec& spec) {
    if (spec.bits != 8 && spec.bits != 16)
        throw std::invalid_argument("quantizer: bits must be 8 or 16");
    if (!(spec.hi > spec.lo)) throw std::invalid_argument("quantizer: degenerate range");
}

/// Uniform mid-rise quantizer; round-trip error is bounded by half a step for
/// in-range values.
inline QuantizeResult quantize(const Eigen::VectorXd& values, const QuantizerSpec& spec) {
    validate(spec);
    const std::uint32_t levels = std::uint32_t{1} << spec.bits;
    const double step = (spec.hi - spec.lo) / static_cast<double>(levels);
    QuantizeResult out;
    out.bits.reserve(static_cast<std::size_t>(values.size()) * static_cast<std::size_t>(spec.bits));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double v = values(i);
        if (v < spec.lo || v > spec.hi) ++out.clipped;
        auto code = static_cast<std::int64_t>(std::floor((v - spec.lo) / step));
        code = std::clamp<std::int64_t>(code, 0, static_cast<std::int64_t>(levels) - 1);
        for (int b = spec.bits - 1; b >= 0; --b)
            out.bits.push_back(static_cast<std::uint8_t>((code >> b) & 1));
    }
    return out;
}

inline Eigen::VectorXd dequantize(const std::vector<std::uint8_t>& bits,
                                  const QuantizerSpec& spec) {
    validate(spec);
    if (bits.size() % static_cast<std::size_t>(spec.bits) != 0)
        throw std::invalid_argument("dequantize: bit count not a multiple of the code width");
    const std::uint32_t levels = std::uint32_t{1} << spec.bits;
    const double step = (spec.hi - spec.lo) / static_cast<double>(levels);
    const std::size_t count = bits.size() / static_cast<std::size_t>(spec.bits);
    Eigen::VectorXd values(static_cast<Eigen::Index>(count));
    std::size_t pos = 0;
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t code = 0;
        for (int b = 0; b < spec.bits; ++b) code = (code << 1) | bits[pos++];
        values(static_cast<Eigen::Index>(i)) = spec.lo + (static_cast<double>(code) + 0.5) * step;
    }
    return values;
}

namespace detail {

inline std::uint32_t gray_encode(std::uint32_t b) { return b ^ (b >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
    g ^= g >> 1;
    g ^= g >> 2;
    g ^= g >> 4;
    return g;
}

// 16-PAM alphabet {-15, -13, ..., 15} has mean square 85 per axis, so the
// square constellation normalizes by sqrt(170) for unit average energy.
inline constexpr double kQamScale = 0.076696498884737034;  // 1 / sqrt(170)

inline double pam_level(std::uint32_t index) {
    return (2.0 * static_cast<double>(index) - 15.0) * kQamScale;
}

inline std::uint32_t pam_nearest(double amplitude) {
    const double raw = (amplitude / kQamScale + 15.0) / 2.0;
    const auto idx = static_cast<std::int64_t>(std::llround(raw));
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(idx, 0, 15));
}

}  // namespace detail

/// Gray-mapped square 256-QAM, 8 bits per symbol (4 per axis), unit average
/// symbol energy.
inline std::vector<std::complex<double>> qam256_modulate(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 8 != 0) throw std::invalid_argument("qam256_modulate: ragged bit count");
    std::vector<std::complex<double>> symbols;
    symbols.reserve(bits.size() / 8);
    for (std::size_t p = 0; p < bits.size(); p += 8) {
        std::uint32_t hi = 0, lo = 0;
        for (int b = 0; b < 4; ++b) hi = (hi << 1) | bits[p + static_cast<std::size_t>(b)];
        for (int b = 4; b < 8; ++b) lo = (lo << 1) | bits[p + static_cast<std::size_t>(b)];
        symbols.emplace_back(detail::pam_level(detail::gray_decode(hi)),
                             detail::pam_level(detail::gray_decode(lo)));
    }
    return symbols;
}

/// Minimum-distance hard decision back to bits.
inline std::vector<std::uint8_t> qam256_demodulate(
    const std::vector<std::complex<double>>& symbols) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * 8);
    for (const auto& s : symbols) {
        const std::uint32_t hi = detail::gray_encode(detail::pam_nearest(s.real()));
        const std::uint32_t lo = detail::gray_encode(detail::pam_nearest(s.imag()));
        for (int b = 3; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((hi >> b) & 1));
        for (int b = 3; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((lo >> b) & 1));
    }
    return bits;
}

/// Per-symbol block fading with maximal-ratio combining: each branch sees the
/// symbol scaled by its own Rayleigh gain plus complex Gaussian noise, the
/// combiner weights branches by their gains and normalizes by the total gain
/// power (perfect channel knowledge). An infinite snr_db disables noise.
inline std::vector<std::complex<double>> transmit_mrc(
    const std::vector<std::complex<double>>& symbols, const ChannelConfig& cfg, Rng& rng) {
    validate(cfg);
    const bool noiseless = std::isinf(cfg.snr_db);
    const double sigma = noiseless ? 0.0 : std::sqrt(std::pow(10.0, -cfg.snr_db / 10.0));
    const double component_sigma = sigma / 1.4142135623730950488;  // per real/imag part

    std::vector<std::complex<double>> received;
    received.reserve(symbols.size());
    for (const auto& x : symbols) {
        double gain_power = 0.0;
        std::complex<double> noise(0.0, 0.0);
        for (int c = 0; c < cfg.channels; ++c) {
            const double h = rng.rayleigh(cfg.omega);
            gain_power += h * h;
            if (!noiseless)
                noise += h * std::complex<double>(component_sigma * rng.normal(),
                                                  component_sigma * rng.normal());
        }
        received.push_back(x + noise / gain_power);
    }
    return received;
}

/// Exactly round(loss_ratio * count) positions are marked absent, chosen
/// uniformly without replacement.
inline std::vector<std::uint8_t> apply_erasures(Eigen::Index count, double loss_ratio, Rng& rng) {
    if (count < 1) throw std::invalid_argument("apply_erasures: count must be positive");
    if (!(loss_ratio >= 0.0) || loss_ratio >= 1.0)
        throw std::invalid_argument("apply_erasures: loss ratio must be in [0, 1)");
    const auto absent =
        static_cast<Eigen::Index>(std::llround(loss_ratio * static_cast<double>(count)));
    std::vector<std::uint8_t> present(static_cast<std::size_t>(count), 1);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = 0; i < absent; ++i) {
        const auto j =
            i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(count - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        present[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 0;
    }
    return present;
}

/// Robust residual-error filter: among the present values, mark absent any
/// value farther than c normalized median absolute deviations from the
/// median. Fewer than 3 present values or zero spread leaves the mask alone.
inline std::vector<std::uint8_t> outlier_filter(const Eigen::VectorXd& values,
                                                const std::vector<std::uint8_t>& present,
                                                double c = 5.0) {
    if (present.size() != static_cast<std::size_t>(values.size()))
        throw std::invalid_argument("outlier_filter: mask length must match values");
    if (!(c > 0.0)) throw std::invalid_argument("outlier_filter: c must be positive");
    std::vector<double> sample;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (present[static_cast<std::size_t>(i)]) sample.push_back(values(i));
    if (sample.size() < 3) return present;
    const double med = stats::median(sample);
    const double spread = stats::mad_normalized(sample);
    if (!(spread > 0.0)) return present;

    std::vector<std::uint8_t> updated = present;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (updated[static_cast<std::size_t>(i)] && std::abs(values(i) - med) > c * spread)
            updated[static_cast<std::size_t>(i)] = 0;
    return updated;
}

}  // namespace csauth::phy

#endif  // CSAUTH_PHY_CHANNEL_HPP
