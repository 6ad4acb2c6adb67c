// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_EXPERIMENTS_HPP
#define CSAUTH_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "csauth/cs_core.hpp"
#include "csauth/key_schedule.hpp"
#include "csauth/phy_channel.hpp"
#include "csauth/rng.hpp"
#include "csauth/stats.hpp"
#include "csauth/tagcrypt.hpp"

namespace csauth::exp {

enum class Axis { Snr, Sparsity, Loss };

inline std::string to_string(Axis axis) {
    switch (axis) {
        case Axis::Snr: return "snr";
        case Axis::Sparsity: return "sparsity";
        case Axis::Loss: return "loss";
    }
    throw std::logic_error("unknown axis");
}

inline Axis axis_from_string(const std::string& s) {
    if (s == "snr") return Axis::Snr;
    if (s == "sparsity") return Axis::Sparsity;
    if (s == "loss") return Axis::Loss;
    throw std::invalid_argument("unknown sweep axis: " + s);
}

struct ExperimentConfig {
    Eigen::Index n = 1024;
    Eigen::Index m = 256;
    double sparsity_ratio = 0.02;
    int rounds = 6;
    int gains_len = 18;  // L, the number of estimated channel gains feeding the key
    phy::ChannelConfig channel{};
    double tau1 = 0.05;     // per-tag match tolerance
    double tau2 = 0.6;      // accepted fraction threshold
    double tau3_rel = 1e-3; // recovery RMSE threshold, relative to the peak signal value
    double alpha = 1.0;     // sampling-bound factor
    double outlier_c = 5.0;
    int quant_bits = 16;
    double noise_sigma = 0.0;   // sensor noise on the measurements themselves
    double gain_jitter = 0.0;   // receiver-side gain estimation perturbation
    bool eavesdropper = false;  // receiver derives its key from independent gains
    int trials = 200;
    Axis axis = Axis::Snr;
    std::vector<double> grid{};
    std::uint64_t master_seed = 1;
};

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.n < 2 || cfg.m < 1 || cfg.m >= cfg.n)
        throw std::invalid_argument("experiment config: need 1 <= m < n");
    if (!(cfg.sparsity_ratio > 0.0) || cfg.sparsity_ratio > 1.0)
        throw std::invalid_argument("experiment config: sparsity must be in (0, 1]");
    if (cfg.rounds < 1) throw std::invalid_argument("experiment config: rounds must be >= 1");
    if (cfg.gains_len < 2) throw std::invalid_argument("experiment config: gains_len must be >= 2");
    phy::validate(cfg.channel);
    if (!(cfg.tau1 > 0.0) || !(cfg.tau2 > 0.0) || cfg.tau2 >= 1.0 || !(cfg.tau3_rel > 0.0) ||
        !(cfg.alpha > 0.0))
        throw std::invalid_argument("experiment config: thresholds must be positive (tau2 < 1)");
    if (cfg.quant_bits != 8 && cfg.quant_bits != 16)
        throw std::invalid_argument("experiment config: quant_bits must be 8 or 16");
    if (!(cfg.noise_sigma >= 0.0) || !(cfg.gain_jitter >= 0.0))
        throw std::invalid_argument("experiment config: negative noise parameter");
    if (cfg.trials < 1) throw std::invalid_argument("experiment config: trials must be >= 1");
    if (cfg.grid.empty()) throw std::invalid_argument("experiment config: empty sweep grid");
}

struct TrialOutcome {
    bool recovered = false;
    bool authenticated = false;
    Eigen::Index rows_used = 0;  // data rows surviving loss and filtering
    Eigen::Index tag_count = 0;  // transmitter-side tag budget
    double rmse = 0.0;
    std::string failure;  // non-empty when the pipeline aborted (counts as both verdicts false)
};

/// One end-to-end pass: shared key from fresh gains, measure and tag the
/// sparse signal, quantize onto 256-QAM symbols, push them through the fading
/// channel, erase and filter, then split, authenticate and recover. The two
/// verdicts are recorded independently. Module errors become a failure tag,
/// never an exception.
inline TrialOutcome run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
    TrialOutcome outcome;
    try {
        Rng rng(trial_seed);
        std::vector<double> gains(static_cast<std::size_t>(cfg.gains_len));
        for (auto& g : gains) g = rng.rayleigh(cfg.channel.omega);
        const Eigen::VectorXd x = cs::generate_sparse_signal(cfg.n, cfg.sparsity_ratio, rng);

        std::vector<double> rx_gains = gains;
        if (cfg.eavesdropper)
            for (auto& g : rx_gains) g = rng.rayleigh(cfg.channel.omega);
        if (cfg.gain_jitter > 0.0)
            for (auto& g : rx_gains) g = std::abs(g + cfg.gain_jitter * rng.normal());

        const Eigen::MatrixXd phi = key::synthesize_matrix(gains, cfg.m, cfg.n, cfg.rounds);
        Eigen::VectorXd y = cs::measure(phi, x);
        if (cfg.noise_sigma > 0.0)
            for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += cfg.noise_sigma * rng.normal();
        const tag::TagIndex k = tag::tag_index(phi);
        outcome.tag_count = k.count();
        const Eigen::VectorXd s = tag::embed(y, k, tag::tag_sequence(phi, k));

        // Real-valued message onto symbols: uniform quantization over the
        // message's own range (assumed known at the receiver), two 256-QAM
        // symbols per value at 16 bits.
        phy::QuantizerSpec spec;
        spec.bits = cfg.quant_bits;
        spec.lo = s.minCoeff();
        spec.hi = s.maxCoeff();
        if (!(spec.hi > spec.lo)) spec.hi = spec.lo + 1.0;
        const auto coded = phy::quantize(s, spec);
        const auto symbols = phy::qam256_modulate(coded.bits);
        const auto received_symbols = phy::transmit_mrc(symbols, cfg.channel, rng);
        const Eigen::VectorXd s_hat = phy::dequantize(phy::qam256_demodulate(received_symbols), spec);

        auto present = phy::apply_erasures(cfg.m, cfg.channel.loss_ratio, rng);
        present = phy::outlier_filter(s_hat, present, cfg.outlier_c);

        const bool same_key = !cfg.eavesdropper && cfg.gain_jitter == 0.0;
        const Eigen::MatrixXd phi_rx =
            same_key ? phi : key::synthesize_matrix(rx_gains, cfg.m, cfg.n, cfg.rounds);

        const auto k_signal = static_cast<Eigen::Index>(
            std::llround(cfg.sparsity_ratio * static_cast<double>(cfg.n)));
        const auto decoded = tag::decode_message(phi_rx, {s_hat, present}, cfg.tau1, cfg.tau2,
                                                 2 * k_signal, 1e-8 * s_hat.norm());
        outcome.rows_used = decoded.data_rows_used;
        outcome.authenticated = decoded.auth.accepted;
        outcome.rmse = cs::rmse(decoded.report.recovered, x);
        outcome.recovered = outcome.rmse < cfg.tau3_rel * x.cwiseAbs().maxCoeff();
    } catch (const std::exception& e) {
        outcome.failure = e.what();
        outcome.recovered = false;
        outcome.authenticated = false;
    }
    return outcome;
}

struct SweepPoint {
    double axis_value = 0.0;
    double recovery_p = 0.0;
    double auth_p = 0.0;
    int trials = 0;
    double ci_halfwidth = 0.0;       // Wilson 95%, recovery estimate
    double auth_ci_halfwidth = 0.0;  // Wilson 95%, authentication estimate
};

struct SweepResult {
    Axis axis = Axis::Snr;
    std::vector<SweepPoint> points;
};

inline ExperimentConfig at_grid_point(const ExperimentConfig& cfg, double value) {
    ExperimentConfig point = cfg;
    switch (cfg.axis) {
        case Axis::Snr: point.channel.snr_db = value; break;
        case Axis::Sparsity: point.sparsity_ratio = value; break;
        case Axis::Loss: point.channel.loss_ratio = value; break;
    }
    return point;
}

/// Runs cfg.trials independent trials per grid point. Trial seeds come from
/// the splittable counter scheme on (master seed, grid index, trial index),
/// and per-trial outcomes are tallied in index order, so the result is
/// identical for any worker count.
inline SweepResult sweep(const ExperimentConfig& cfg, unsigned threads = 0) {
    validate(cfg);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t points = cfg.grid.size();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialOutcome> outcomes(points * trials);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= outcomes.size()) return;
            const std::size_t g = task / trials;
            const std::size_t t = task % trials;
            const ExperimentConfig point = at_grid_point(cfg, cfg.grid[g]);
            outcomes[task] = run_trial(point, derive_stream_seed(cfg.master_seed, g, t));
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    result.axis = cfg.axis;
    result.points.resize(points);
    for (std::size_t g = 0; g < points; ++g) {
        std::size_t recovered = 0, authenticated = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            recovered += outcomes[g * trials + t].recovered ? 1 : 0;
            authenticated += outcomes[g * trials + t].authenticated ? 1 : 0;
        }
        auto& p = result.points[g];
        p.axis_value = cfg.grid[g];
        p.trials = cfg.trials;
        p.recovery_p = static_cast<double>(recovered) / static_cast<double>(trials);
        p.auth_p = static_cast<double>(authenticated) / static_cast<double>(trials);
        p.ci_halfwidth = stats::wilson_halfwidth(recovered, trials);
        p.auth_ci_halfwidth = stats::wilson_halfwidth(authenticated, trials);
    }
    return result;
}

struct PropertyReport {
    bool ok = true;
    std::vector<std::string> violations;

    void flag(const std::string& msg) {
        ok = false;
        violations.push_back(msg);
    }
};

/// Authentication should track or exceed recovery along an SNR sweep; the
/// comparison allows the two Wilson half-widths as slack.
inline PropertyReport auth_vs_recovery_dominance(const SweepResult& result) {
    PropertyReport report;
    for (const auto& p : result.points) {
        const double slack = p.ci_halfwidth + p.auth_ci_halfwidth;
        if (p.auth_p < p.recovery_p - slack) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "auth %.4f < recovery %.4f - slack %.4f at %s=%.4f", p.auth_p,
                          p.recovery_p, slack, to_string(result.axis).c_str(), p.axis_value);
            report.flag(buf);
        }
    }
    return report;
}

/// First grid value whose recovery probability drops below the threshold;
/// returns NaN when the curve never drops.
inline double recovery_knee(const SweepResult& result, double threshold = 0.5) {
    for (const auto& p : result.points)
        if (p.recovery_p < threshold) return p.axis_value;
    return std::numeric_limits<double>::quiet_NaN();
}

/// Statistical monotonicity: consecutive points may only move the wrong way
/// by up to slack_mult times their combined interval half-widths.
inline PropertyReport monotone_within_interval(const SweepResult& result, bool increasing,
                                               bool use_auth = false, double slack_mult = 2.0) {
    PropertyReport report;
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        const auto& prev = result.points[i - 1];
        const auto& cur = result.points[i];
        const double a = use_auth ? prev.auth_p : prev.recovery_p;
        const double b = use_auth ? cur.auth_p : cur.recovery_p;
        const double slack = slack_mult * ((use_auth ? prev.auth_ci_halfwidth : prev.ci_halfwidth) +
                                           (use_auth ? cur.auth_ci_halfwidth : cur.ci_halfwidth));
        const double drop = increasing ? a - b : b - a;
        if (drop > slack) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s curve not monotone at %s=%.4f (%.4f -> %.4f)",
                          use_auth ? "auth" : "recovery", to_string(result.axis).c_str(),
                          cur.axis_value, a, b);
            report.flag(buf);
        }
    }
    return report;
}

/// CSV: fixed header then one row per grid point, 6 decimal places, LF line
/// endings. Byte-identical for identical sweep results.
inline void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "axis_value,recovery_p,auth_p,trials,ci_halfwidth\n";
    char buf[160];
    for (const auto& p : result.points) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d,%.6f\n", p.axis_value, p.recovery_p,
                      p.auth_p, p.trials, p.ci_halfwidth);
        out << buf;
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

// ---------------------------------------------------------------------------
// Flat key/value config files and the figure presets.

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);  // doubles must survive the round trip
    out << "n = " << cfg.n << '\n';
    out << "m = " << cfg.m << '\n';
    out << "sparsity_ratio = " << cfg.sparsity_ratio << '\n';
    out << "rounds = " << cfg.rounds << '\n';
    out << "gains_len = " << cfg.gains_len << '\n';
    out << "channels = " << cfg.channel.channels << '\n';
    out << "omega = " << cfg.channel.omega << '\n';
    out << "snr_db = " << cfg.channel.snr_db << '\n';
    out << "loss_ratio = " << cfg.channel.loss_ratio << '\n';
    out << "tau1 = " << cfg.tau1 << '\n';
    out << "tau2 = " << cfg.tau2 << '\n';
    out << "tau3 = " << cfg.tau3_rel << '\n';
    out << "alpha = " << cfg.alpha << '\n';
    out << "outlier_c = " << cfg.outlier_c << '\n';
    out << "quant_bits = " << cfg.quant_bits << '\n';
    out << "noise_sigma = " << cfg.noise_sigma << '\n';
    out << "gain_jitter = " << cfg.gain_jitter << '\n';
    out << "receiver = " << (cfg.eavesdropper ? "eavesdropper" : "legitimate") << '\n';
    out << "trials = " << cfg.trials << '\n';
    out << "axis = " << to_string(cfg.axis) << '\n';
    out << "grid =";
    for (double v : cfg.grid) out << ' ' << v;
    out << '\n';
    out << "seed = " << cfg.master_seed << '\n';
    return out.str();
}

/// Parses "key = value" lines; '#' starts a comment, unknown keys are errors.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto as_double = [&](const std::string& v) {
            if (v == "inf") return std::numeric_limits<double>::infinity();
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": bad number '" + v + "'");
            return d;
        };
        auto as_int = [&](const std::string& v) { return static_cast<long long>(as_double(v)); };

        if (key == "n") cfg.n = as_int(value);
        else if (key == "m") cfg.m = as_int(value);
        else if (key == "sparsity_ratio") cfg.sparsity_ratio = as_double(value);
        else if (key == "rounds") cfg.rounds = static_cast<int>(as_int(value));
        else if (key == "gains_len") cfg.gains_len = static_cast<int>(as_int(value));
        else if (key == "channels") cfg.channel.channels = static_cast<int>(as_int(value));
        else if (key == "omega") cfg.channel.omega = as_double(value);
        else if (key == "snr_db") cfg.channel.snr_db = as_double(value);
        else if (key == "loss_ratio") cfg.channel.loss_ratio = as_double(value);
        else if (key == "tau1") cfg.tau1 = as_double(value);
        else if (key == "tau2") cfg.tau2 = as_double(value);
        else if (key == "tau3") cfg.tau3_rel = as_double(value);
        else if (key == "alpha") cfg.alpha = as_double(value);
        else if (key == "outlier_c") cfg.outlier_c = as_double(value);
        else if (key == "quant_bits") cfg.quant_bits = static_cast<int>(as_int(value));
        else if (key == "noise_sigma") cfg.noise_sigma = as_double(value);
        else if (key == "gain_jitter") cfg.gain_jitter = as_double(value);
        else if (key == "receiver") {
            if (value == "eavesdropper") cfg.eavesdropper = true;
            else if (value == "legitimate") cfg.eavesdropper = false;
            else
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": receiver must be legitimate or eavesdropper");
        } else if (key == "trials") cfg.trials = static_cast<int>(as_int(value));
        else if (key == "axis") cfg.axis = axis_from_string(value);
        else if (key == "grid") {
            cfg.grid.clear();
            std::istringstream ss(value);
            std::string tok;
            while (ss >> tok) {
                if (!tok.empty() && tok.back() == ',') tok.pop_back();
                if (tok.empty()) continue;
                cfg.grid.push_back(as_double(tok));
            }
        } else if (key == "seed") cfg.master_seed = static_cast<std::uint64_t>(as_int(value));
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    return parse_config(in);
}

namespace detail {

inline std::vector<double> linspace(double lo, double hi, double step) {
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
    return grid;
}

}  // namespace detail

/// Built-in sweep settings matching the evaluation figures: n=1024, m=256,
/// 2% sparsity where captioned, tau2=0.6, SNR 40 dB for the loss sweeps,
/// omega=1, 200 trials per point.
inline ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "fig8" || name == "fig10") {
        cfg.axis = Axis::Snr;
        cfg.grid = detail::linspace(0.0, 40.0, 5.0);
        cfg.channel.loss_ratio = 0.0;
    } else if (name == "fig9") {
        cfg.axis = Axis::Sparsity;
        cfg.grid = detail::linspace(0.01, 0.10, 0.01);
        cfg.channel.snr_db = std::numeric_limits<double>::infinity();
        cfg.channel.loss_ratio = 0.0;
    } else if (name == "fig11") {
        cfg.axis = Axis::Loss;
        cfg.grid = detail::linspace(0.0, 0.6, 0.05);
        cfg.channel.snr_db = 40.0;
    } else if (name == "fig12") {
        cfg.axis = Axis::Loss;
        cfg.grid = detail::linspace(0.0, 0.8, 0.05);
        cfg.channel.snr_db = 40.0;
    } else {
        throw std::invalid_argument("unknown preset: " + name +
                                    " (expected fig8|fig9|fig10|fig11|fig12)");
    }
    return cfg;
}

}  // namespace csauth::exp

#endif  // CSAUTH_EXPERIMENTS_HPP
