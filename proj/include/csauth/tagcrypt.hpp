// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_TAGCRYPT_HPP
#define CSAUTH_TAGCRYPT_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "csauth/cs_core.hpp"

namespace csauth::tag {

/// Marks which measurement rows are replaced by authentication tags: bit i is
/// set iff row i of the key matrix holds a maximal (exactly 1.0) entry.
struct TagIndex {
    std::vector<std::uint8_t> bits;

    Eigen::Index count() const {
        Eigen::Index c = 0;
        for (auto b : bits) c += b;
        return c;
    }
};

struct TagValues {
    std::vector<Eigen::Index> rows;  // ascending
    std::vector<double> values;
};

/// Receiver-side tag estimates; absent positions stay flagged rather than
/// being dropped so the verdict can count them against the full tag budget.
struct ExtractedTags {
    std::vector<Eigen::Index> rows;  // ascending, same rows as the local TagValues
    std::vector<double> values;      // meaningful only where present[q] != 0
    std::vector<std::uint8_t> present;

    Eigen::Index present_count() const {
        Eigen::Index c = 0;
        for (auto p : present) c += p;
        return c;
    }
};

/// Message as it survived the channel: per-position values plus the mask of
/// positions that arrived and passed filtering. Values at absent positions
/// are never read.
struct ReceivedMessage {
    Eigen::VectorXd values;
    std::vector<std::uint8_t> present;
};

struct SplitMessage {
    std::vector<Eigen::Index> data_rows;  // present data positions, ascending
    Eigen::VectorXd data_values;
    std::vector<Eigen::Index> tag_rows;  // present tag positions, ascending
    Eigen::VectorXd tag_values;
};

struct AuthDecision {
    bool accepted = false;
    Eigen::Index matched = 0;
    Eigen::Index tag_count = 0;  // full local tag budget, absent tags count as misses
    double tau1 = 0.0;
    double tau2 = 0.0;
};

struct DecodeResult {
    cs::RecoveryReport report;
    AuthDecision auth;
    Eigen::Index data_rows_used = 0;
};

/// Rows carrying a maximal entry. The min-max normalization divides the
/// maximum by itself, so maximal entries are exactly 1.0 in binary floating
/// point and the bit-exact comparison is safe.
inline TagIndex tag_index(const Eigen::MatrixXd& phi) {
    if (phi.size() == 0 || phi.maxCoeff() != 1.0)
        throw std::invalid_argument("tag_index: matrix is not min-max normalized (max != 1)");
    TagIndex k;
    k.bits.assign(static_cast<std::size_t>(phi.rows()), 0);
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index j = 0; j < phi.cols(); ++j)
            if (phi(i, j) == 1.0) {
                k.bits[static_cast<std::size_t>(i)] = 1;
                break;
            }
    return k;
}

/// Tag values are the main-diagonal entries of the flagged rows.
inline TagValues tag_sequence(const Eigen::MatrixXd& phi, const TagIndex& k) {
    if (k.bits.size() != static_cast<std::size_t>(phi.rows()))
        throw std::invalid_argument("tag_sequence: index length must match matrix rows");
    if (phi.rows() > phi.cols())
        throw std::invalid_argument("tag_sequence: need rows <= cols for diagonal tags");
    TagValues t;
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        if (k.bits[static_cast<std::size_t>(i)]) {
            t.rows.push_back(i);
            t.values.push_back(phi(i, i));
        }
    return t;
}

namespace detail {

inline double mean_over(const Eigen::VectorXd& v, const std::vector<std::uint8_t>& select) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (select[static_cast<std::size_t>(i)]) {
            sum += v(i);
            ++count;
        }
    return sum / static_cast<double>(count);
}

}  // namespace detail

/// Transmit vector: data positions pass the measurements through, tag
/// positions carry their tag value lifted by the mean of the data part so
/// tags sit at the same amplitude level as the surrounding measurements.
inline Eigen::VectorXd embed(const Eigen::VectorXd& y, const TagIndex& k, const TagValues& t) {
    if (k.bits.size() != static_cast<std::size_t>(y.size()))
        throw std::invalid_argument("embed: index length must match measurement length");
    const Eigen::Index n_tags = k.count();
    if (n_tags == y.size())
        throw std::invalid_argument("embed: no data positions left (every row is a tag)");
    if (static_cast<Eigen::Index>(t.rows.size()) != n_tags)
        throw std::invalid_argument("embed: tag values do not match the tag index");

    std::vector<std::uint8_t> data_mask(k.bits.size());
    for (std::size_t i = 0; i < k.bits.size(); ++i) data_mask[i] = k.bits[i] ? 0 : 1;
    const double data_mean = n_tags ? detail::mean_over(y, data_mask) : 0.0;

    Eigen::VectorXd s = y;
    for (std::size_t q = 0; q < t.rows.size(); ++q) {
        if (!k.bits[static_cast<std::size_t>(t.rows[q])])
            throw std::invalid_argument("embed: tag value at a non-tag row");
        s(t.rows[q]) = t.values[q] + data_mean;
    }
    return s;
}

/// Partition the present positions of a received message by the tag index.
inline SplitMessage split(const ReceivedMessage& received, const TagIndex& k) {
    if (received.present.size() != static_cast<std::size_t>(received.values.size()) ||
        k.bits.size() != received.present.size())
        throw std::invalid_argument("split: mask, values and index lengths must agree");
    SplitMessage parts;
    for (Eigen::Index i = 0; i < received.values.size(); ++i) {
        if (!received.present[static_cast<std::size_t>(i)]) continue;
        if (k.bits[static_cast<std::size_t>(i)])
            parts.tag_rows.push_back(i);
        else
            parts.data_rows.push_back(i);
    }
    parts.data_values.resize(static_cast<Eigen::Index>(parts.data_rows.size()));
    for (std::size_t q = 0; q < parts.data_rows.size(); ++q)
        parts.data_values(static_cast<Eigen::Index>(q)) = received.values(parts.data_rows[q]);
    parts.tag_values.resize(static_cast<Eigen::Index>(parts.tag_rows.size()));
    for (std::size_t q = 0; q < parts.tag_rows.size(); ++q)
        parts.tag_values(static_cast<Eigen::Index>(q)) = received.values(parts.tag_rows[q]);
    return parts;
}

/// Undo the amplitude lift: subtract the mean of the present data positions
/// from each present tag position. Absent tags are reported as missing.
inline ExtractedTags extract_tag(const ReceivedMessage& received, const TagIndex& k) {
    if (received.present.size() != static_cast<std::size_t>(received.values.size()) ||
        k.bits.size() != received.present.size())
        throw std::invalid_argument("extract_tag: mask, values and index lengths must agree");
    std::vector<std::uint8_t> present_data(k.bits.size());
    Eigen::Index n_data = 0;
    for (std::size_t i = 0; i < k.bits.size(); ++i) {
        present_data[i] = (!k.bits[i] && received.present[i]) ? 1 : 0;
        n_data += present_data[i];
    }
    if (n_data == 0)
        throw std::invalid_argument("extract_tag: no present data positions to estimate the mean");
    const double mean = detail::mean_over(received.values, present_data);

    ExtractedTags out;
    for (Eigen::Index i = 0; i < received.values.size(); ++i) {
        if (!k.bits[static_cast<std::size_t>(i)]) continue;
        out.rows.push_back(i);
        if (received.present[static_cast<std::size_t>(i)]) {
            out.values.push_back(received.values(i) - mean);
            out.present.push_back(1);
        } else {
            out.values.push_back(0.0);
            out.present.push_back(0);
        }
    }
    return out;
}

/// Accept when the fraction of matching tags strictly exceeds tau2. A tag
/// matches when it arrived and its extracted value is within tau1 of the
/// locally generated value; absent tags count against the full budget. The
/// ratio comparison keeps the boundary exact for decimal thresholds
/// (matched == tau2 * tag_count rejects).
inline AuthDecision authenticate(const ExtractedTags& extracted, const TagValues& expected,
                                 double tau1, double tau2) {
    if (!(tau1 > 0.0)) throw std::invalid_argument("authenticate: tau1 must be positive");
    if (!(tau2 > 0.0) || !(tau2 < 1.0))
        throw std::invalid_argument("authenticate: tau2 must be in (0, 1)");
    if (extracted.rows != expected.rows)
        throw std::invalid_argument("authenticate: extracted and expected tag rows differ");

    AuthDecision d;
    d.tau1 = tau1;
    d.tau2 = tau2;
    d.tag_count = static_cast<Eigen::Index>(expected.rows.size());
    for (std::size_t q = 0; q < expected.rows.size(); ++q) {
        if (!extracted.present[q]) continue;
        if (std::abs(extracted.values[q] - expected.values[q]) < tau1) ++d.matched;
    }
    d.accepted = d.tag_count > 0 &&
                 static_cast<double>(d.matched) / static_cast<double>(d.tag_count) > tau2;
    return d;
}

/// Transmitter pipeline for one message: measure, derive the tag layer from
/// the key matrix, and hide the tags in the measurement vector.
inline Eigen::VectorXd encode_message(const Eigen::MatrixXd& phi, const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = cs::measure(phi, x);
    const TagIndex k = tag_index(phi);
    return embed(y, k, tag_sequence(phi, k));
}

/// Receiver pipeline: recompute the tag layer from the shared key, split the
/// surviving positions, authenticate, and run sparse recovery on the data
/// rows paired with their matrix rows.
inline DecodeResult decode_message(const Eigen::MatrixXd& phi, const ReceivedMessage& received,
                                   double tau1, double tau2, Eigen::Index max_support,
                                   double tol) {
    const TagIndex k = tag_index(phi);
    const TagValues expected = tag_sequence(phi, k);
    DecodeResult result;
    result.auth = authenticate(extract_tag(received, k), expected, tau1, tau2);

    const SplitMessage parts = split(received, k);
    result.data_rows_used = static_cast<Eigen::Index>(parts.data_rows.size());
    Eigen::MatrixXd phi_rows(result.data_rows_used, phi.cols());
    for (std::size_t q = 0; q < parts.data_rows.size(); ++q)
        phi_rows.row(static_cast<Eigen::Index>(q)) = phi.row(parts.data_rows[q]);
    const Eigen::Index cap = std::min<Eigen::Index>(max_support, phi_rows.rows());
    result.report = cs::omp_recover(parts.data_values, phi_rows, cap, tol);
    return result;
}

}  // namespace csauth::tag

#endif  // CSAUTH_TAGCRYPT_HPP
