// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_STATS_HPP
#define CSAUTH_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace csauth::stats {

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

/// Median absolute deviation scaled by 1.4826 (consistent with the normal std).
inline double mad_normalized(const std::vector<double>& v) {
    double med = median(v);
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - med);
    return 1.4826 * median(std::move(dev));
}

/// Half-width of the Wilson 95% score interval for a binomial proportion.
inline double wilson_halfwidth(std::size_t successes, std::size_t trials) {
    if (trials == 0) throw std::invalid_argument("wilson_halfwidth: zero trials");
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    return (z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))) / (1.0 + z2 / n);
}

inline double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * 1.4142135623730950488));
}

/// Chi-square statistic of a fixed-bin histogram over [0,1] against a normal
/// fitted by sample mean and standard deviation. Comparative figure of merit,
/// not a calibrated goodness-of-fit test.
inline double gaussian_fit_chi_square(const std::vector<double>& values, int bins = 64) {
    if (values.size() < 2) throw std::invalid_argument("gaussian_fit_chi_square: need >= 2 values");
    if (bins < 2) throw std::invalid_argument("gaussian_fit_chi_square: need >= 2 bins");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    const double sigma = std::sqrt(var);
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_fit_chi_square: zero spread");

    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        int b = static_cast<int>(v * bins);
        b = std::clamp(b, 0, bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    const double n = static_cast<double>(values.size());
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / bins;
        const double hi = static_cast<double>(b + 1) / bins;
        const double expected = n * (normal_cdf(hi, mean, sigma) - normal_cdf(lo, mean, sigma));
        if (expected < 1e-9) continue;
        const double d = counts[static_cast<std::size_t>(b)] - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

}  // namespace csauth::stats

#endif  // CSAUTH_STATS_HPP
