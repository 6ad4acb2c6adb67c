// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_CS_CORE_HPP
#define CSAUTH_CS_CORE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "csauth/rng.hpp"

namespace csauth::cs {

struct RecoveryReport {
    Eigen::VectorXd recovered;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<Eigen::Index> support;  // in selection order
};

/// y = phi * x, optionally plus i.i.d. zero-mean Gaussian sensor noise.
inline Eigen::VectorXd measure(const Eigen::MatrixXd& phi, const Eigen::VectorXd& x,
                               double noise_sigma, Rng& rng) {
    if (phi.cols() != x.size())
        throw std::invalid_argument("measure: matrix columns must match signal length");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("measure: negative noise sigma");
    Eigen::VectorXd y = phi * x;
    if (noise_sigma > 0.0)
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise_sigma * rng.normal();
    return y;
}

inline Eigen::VectorXd measure(const Eigen::MatrixXd& phi, const Eigen::VectorXd& x) {
    if (phi.cols() != x.size())
        throw std::invalid_argument("measure: matrix columns must match signal length");
    return phi * x;
}

/// Largest absolute inner product between distinct l2-normalized columns.
/// Always in [0, 1]; orthogonal columns give 0, duplicated columns give 1.
inline double mutual_incoherence(const Eigen::MatrixXd& a) {
    if (a.cols() < 2) throw std::invalid_argument("mutual_incoherence: need >= 2 columns");
    Eigen::MatrixXd unit = a;
    for (Eigen::Index j = 0; j < unit.cols(); ++j) {
        const double norm = unit.col(j).norm();
        if (!(norm > 0.0)) throw std::invalid_argument("mutual_incoherence: zero-norm column");
        unit.col(j) /= norm;
    }
    double mu = 0.0;
    for (Eigen::Index i = 0; i < unit.cols(); ++i)
        for (Eigen::Index j = i + 1; j < unit.cols(); ++j)
            mu = std::max(mu, std::abs(unit.col(i).dot(unit.col(j))));
    return std::min(mu, 1.0);
}

/// Sampling-count window alpha * mu^2 * K * ln(n) <= m <= n.
inline bool measurement_bound_ok(double mu, int k, int n, int m, double alpha) {
    if (k <= 0 || n <= 0 || m <= 0 || !(alpha > 0.0) || !(mu >= 0.0))
        throw std::invalid_argument("measurement_bound_ok: arguments must be positive");
    const double lower = alpha * mu * mu * static_cast<double>(k) * std::log(static_cast<double>(n));
    return lower <= static_cast<double>(m) && m <= n;
}

namespace detail {

/// Minimum-norm least squares on the selected columns.
inline Eigen::VectorXd solve_on_support(const Eigen::MatrixXd& a,
                                        const std::vector<Eigen::Index>& support,
                                        const Eigen::VectorXd& y) {
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t q = 0; q < support.size(); ++q) sub.col(static_cast<Eigen::Index>(q)) = a.col(support[q]);
    return sub.completeOrthogonalDecomposition().solve(y);
}

}  // namespace detail

/// Orthogonal matching pursuit over A = phi_rows * psi: repeatedly pick the
/// column with the largest normalized correlation against the residual, refit
/// by least squares on the accumulated support, stop once the residual l2 norm
/// drops to tol or the support reaches max_support. The returned signal is
/// psi * coefficients (pass an empty psi for the identity basis).
inline RecoveryReport omp_recover(const Eigen::VectorXd& y_hat, const Eigen::MatrixXd& phi_rows,
                                  const Eigen::MatrixXd& psi, Eigen::Index max_support,
                                  double tol) {
    if (y_hat.size() == 0) throw std::invalid_argument("omp_recover: empty measurement vector");
    if (phi_rows.rows() != y_hat.size())
        throw std::invalid_argument("omp_recover: row count must match measurement length");
    if (max_support <= 0) throw std::invalid_argument("omp_recover: max_support must be positive");
    if (max_support > phi_rows.rows())
        throw std::invalid_argument("omp_recover: max_support exceeds available rows");
    const bool identity_basis = psi.size() == 0;
    if (!identity_basis && (psi.rows() != phi_rows.cols() || psi.cols() != phi_rows.cols()))
        throw std::invalid_argument("omp_recover: basis must be square and match matrix columns");
    if (!(tol >= 0.0)) throw std::invalid_argument("omp_recover: negative tolerance");

    const Eigen::MatrixXd a = identity_basis ? phi_rows : Eigen::MatrixXd(phi_rows * psi);
    const Eigen::Index n = a.cols();
    Eigen::VectorXd col_norms(n);
    for (Eigen::Index j = 0; j < n; ++j) col_norms(j) = a.col(j).norm();

    RecoveryReport report;
    Eigen::VectorXd residual = y_hat;
    Eigen::VectorXd coeffs;
    std::vector<bool> used(static_cast<std::size_t>(n), false);

    while (static_cast<Eigen::Index>(report.support.size()) < max_support &&
           residual.norm() > tol) {
        const Eigen::VectorXd corr = a.transpose() * residual;
        Eigen::Index best = -1;
        double best_score = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)] || !(col_norms(j) > 0.0)) continue;
            const double score = std::abs(corr(j)) / col_norms(j);
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0) break;  // nothing selectable left
        used[static_cast<std::size_t>(best)] = true;
        report.support.push_back(best);
        coeffs = detail::solve_on_support(a, report.support, y_hat);
        residual = y_hat;
        for (std::size_t q = 0; q < report.support.size(); ++q)
            residual -= coeffs(static_cast<Eigen::Index>(q)) * a.col(report.support[q]);
        ++report.iterations;
    }

    Eigen::VectorXd sparse = Eigen::VectorXd::Zero(n);
    for (std::size_t q = 0; q < report.support.size(); ++q)
        sparse(report.support[q]) = coeffs.size() ? coeffs(static_cast<Eigen::Index>(q)) : 0.0;
    report.recovered = identity_basis ? sparse : Eigen::VectorXd(psi * sparse);
    report.residual_norm = residual.norm();
    return report;
}

inline RecoveryReport omp_recover(const Eigen::VectorXd& y_hat, const Eigen::MatrixXd& phi_rows,
                                  Eigen::Index max_support, double tol) {
    return omp_recover(y_hat, phi_rows, Eigen::MatrixXd(), max_support, tol);
}

/// Exhaustive minimum-support search, the reference oracle for the greedy
/// path. Enumerates every support of size 0..k_max, least-squares each, and
/// returns the smallest support meeting tol; within a size ties break by
/// lower residual, across sizes the smaller support wins. If no support meets
/// tol the lowest-residual attempt is returned (smallest such support).
inline RecoveryReport exhaustive_l0(const Eigen::VectorXd& y, const Eigen::MatrixXd& a,
                                    int k_max, double tol) {
    if (y.size() == 0) throw std::invalid_argument("exhaustive_l0: empty measurement vector");
    if (a.rows() != y.size())
        throw std::invalid_argument("exhaustive_l0: row count must match measurement length");
    if (k_max < 1) throw std::invalid_argument("exhaustive_l0: k_max must be positive");
    const Eigen::Index n = a.cols();
    const int k_top = static_cast<int>(std::min<Eigen::Index>(k_max, n));
    double combos = 1.0;
    for (int i = 0; i < k_top; ++i)
        combos *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (combos > 1e6) throw std::invalid_argument("exhaustive_l0: enumeration guard exceeded");

    RecoveryReport best;
    best.recovered = Eigen::VectorXd::Zero(n);
    best.residual_norm = y.norm();
    if (best.residual_norm <= tol) return best;

    for (int k = 1; k <= k_top; ++k) {
        RecoveryReport level_best;
        double level_residual = std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
        for (int q = 0; q < k; ++q) idx[static_cast<std::size_t>(q)] = q;
        while (true) {
            const Eigen::VectorXd coeffs = detail::solve_on_support(a, idx, y);
            Eigen::VectorXd residual = y;
            for (std::size_t q = 0; q < idx.size(); ++q)
                residual -= coeffs(static_cast<Eigen::Index>(q)) * a.col(idx[q]);
            const double rn = residual.norm();
            if (rn < level_residual) {
                level_residual = rn;
                level_best.support = idx;
                level_best.recovered = Eigen::VectorXd::Zero(n);
                for (std::size_t q = 0; q < idx.size(); ++q)
                    level_best.recovered(idx[q]) = coeffs(static_cast<Eigen::Index>(q));
                level_best.residual_norm = rn;
                level_best.iterations = k;
            }
            // next combination in lexicographic order
            int pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < k; ++q)
                idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
        }
        if (level_residual <= tol) return level_best;  // smallest satisfying support
        if (level_residual < best.residual_norm) best = level_best;
    }
    return best;
}

/// K = round(ratio * n) support positions chosen uniformly without
/// replacement; nonzero values are standard normal, redrawn on an exact zero.
inline Eigen::VectorXd generate_sparse_signal(Eigen::Index n, double sparsity_ratio, Rng& rng) {
    if (n < 1) throw std::invalid_argument("generate_sparse_signal: bad length");
    if (!(sparsity_ratio > 0.0) || sparsity_ratio > 1.0)
        throw std::invalid_argument("generate_sparse_signal: ratio must be in (0, 1]");
    const auto k = static_cast<Eigen::Index>(std::llround(sparsity_ratio * static_cast<double>(n)));
    if (k < 1) throw std::invalid_argument("generate_sparse_signal: ratio rounds to zero nonzeros");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        double v = rng.normal();
        while (v == 0.0) v = rng.normal();
        x(idx[static_cast<std::size_t>(i)]) = v;
    }
    return x;
}

inline Eigen::Index sparsity_count(const Eigen::VectorXd& x) {
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) != 0.0) ++k;
    return k;
}

inline double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
    if (a.size() == 0) throw std::invalid_argument("rmse: empty vectors");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

/// Recovery verdict: RMSE below the threshold tau3.
inline bool perfect_recovery(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, double tau3) {
    if (!(tau3 > 0.0)) throw std::invalid_argument("perfect_recovery: tau3 must be positive");
    return rmse(x_hat, x) < tau3;
}

}  // namespace csauth::cs

#endif  // CSAUTH_CS_CORE_HPP
