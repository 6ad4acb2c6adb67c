// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_IO_HPP
#define CSAUTH_IO_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace csauth::io {

// Binary container: 16-byte header (8-byte magic, uint32 rows, uint32 cols,
// little-endian) followed by rows*cols little-endian float64 values in
// row-major order. Vectors are stored as length x 1.
inline constexpr std::array<char, 8> kMagic = {'C', 'S', 'A', 'U', 'T', 'H', 'M', '1'};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

}  // namespace detail

inline void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::fail(path, "cannot open for writing");
    out.write(kMagic.data(), kMagic.size());
    const auto rows = static_cast<std::uint32_t>(m.rows());
    const auto cols = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    if (!out) detail::fail(path, "write failed");
}

inline Eigen::MatrixXd read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::fail(path, "cannot open for reading");
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) detail::fail(path, "bad magic (not a csauth binary container)");
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in || rows == 0 || cols == 0) detail::fail(path, "bad header dimensions");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof v);
            if (!in) detail::fail(path, "truncated payload");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    return m;
}

// Text alternative: first line "rows cols", then one line per row of
// space-separated values with full round-trip precision.
inline void write_matrix_text(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::fail(path, "cannot open for writing");
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << buf << (j + 1 < m.cols() ? " " : "");
        }
        out << '\n';
    }
    if (!out) detail::fail(path, "write failed");
}

inline Eigen::MatrixXd read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::fail(path, "cannot open for reading");
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1) detail::fail(path, "bad text header");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> m(i, j))) detail::fail(path, "truncated text payload");
    return m;
}

/// Reads either container, sniffing the binary magic first.
inline Eigen::MatrixXd read_matrix(const std::string& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) detail::fail(path, "cannot open for reading");
        std::array<char, 8> magic{};
        probe.read(magic.data(), magic.size());
        if (probe && magic == kMagic) return read_matrix_binary(path);
    }
    return read_matrix_text(path);
}

inline void write_vector_binary(const std::string& path, const Eigen::VectorXd& v) {
    write_matrix_binary(path, Eigen::MatrixXd(v));
}

inline Eigen::VectorXd read_vector(const std::string& path) {
    Eigen::MatrixXd m = read_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    detail::fail(path, "expected a vector (one row or one column)");
}

/// Gains file: one decimal per line; blank lines and lines starting with '#'
/// are skipped.
inline std::vector<double> read_gains(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::fail(path, "cannot open for reading");
    std::vector<double> gains;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double v = 0.0;
        if (!(ss >> v)) detail::fail(path, "line " + std::to_string(lineno) + ": not a number");
        gains.push_back(v);
    }
    if (gains.empty()) detail::fail(path, "no gain values found");
    return gains;
}

/// Present-mask file: one 0/1 per line, length must match the message.
inline std::vector<std::uint8_t> read_mask(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::fail(path, "cannot open for reading");
    std::vector<std::uint8_t> mask;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line[0] != '0' && line[0] != '1')
            detail::fail(path, "line " + std::to_string(lineno) + ": expected 0 or 1");
        mask.push_back(static_cast<std::uint8_t>(line[0] - '0'));
    }
    if (mask.empty()) detail::fail(path, "no mask values found");
    return mask;
}

inline std::vector<double> read_signal(const std::string& path) {
    // Accepts the binary/text container or a bare one-value-per-line file.
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) detail::fail(path, "cannot open for reading");
        std::array<char, 8> magic{};
        probe.read(magic.data(), magic.size());
        if (probe && magic == kMagic) {
            const Eigen::VectorXd v = read_vector(path);
            return {v.data(), v.data() + v.size()};
        }
    }
    return read_gains(path);
}

}  // namespace csauth::io

#endif  // CSAUTH_IO_HPP
