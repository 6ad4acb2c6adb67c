// SPDX-License-Identifier: Apache-2.0
//
// csauth command line: key generation, message encode/decode, and the Monte
// Carlo sweep harness.

#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csauth/csauth.hpp"

using namespace csauth;

namespace {

struct KeyShape {
    Eigen::Index rows = 256;
    Eigen::Index cols = 1024;
    int rounds = 6;
};

void add_shape_options(CLI::App* cmd, KeyShape& shape) {
    cmd->add_option("--rows", shape.rows, "Key matrix rows (m)")->check(CLI::PositiveNumber);
    cmd->add_option("--cols", shape.cols, "Key matrix columns (n)")->check(CLI::PositiveNumber);
    cmd->add_option("--rounds", shape.rounds, "Shift-schedule rounds")->check(CLI::PositiveNumber);
}

int run_keygen(const std::string& gains_path, const KeyShape& shape, const std::string& out,
               bool text) {
    const auto gains = io::read_gains(gains_path);
    const auto phi = key::synthesize_matrix(gains, shape.rows, shape.cols, shape.rounds);
    if (text)
        io::write_matrix_text(out, phi);
    else
        io::write_matrix_binary(out, phi);
    std::printf("wrote %lldx%lld key matrix to %s\n", static_cast<long long>(phi.rows()),
                static_cast<long long>(phi.cols()), out.c_str());
    return 0;
}

int run_encode(const std::string& gains_path, const std::string& signal_path,
               const KeyShape& shape, const std::string& out, bool text) {
    const auto gains = io::read_gains(gains_path);
    const auto signal = io::read_signal(signal_path);
    if (static_cast<Eigen::Index>(signal.size()) != shape.cols)
        throw std::runtime_error("signal length " + std::to_string(signal.size()) +
                                 " does not match --cols " + std::to_string(shape.cols));
    const auto phi = key::synthesize_matrix(gains, shape.rows, shape.cols, shape.rounds);
    const Eigen::VectorXd x =
        Eigen::Map<const Eigen::VectorXd>(signal.data(), static_cast<Eigen::Index>(signal.size()));
    const Eigen::VectorXd message = tag::encode_message(phi, x);
    if (text)
        io::write_matrix_text(out, Eigen::MatrixXd(message));
    else
        io::write_vector_binary(out, message);
    std::printf("wrote %lld-value message to %s\n", static_cast<long long>(message.size()),
                out.c_str());
    return 0;
}

int run_decode(const std::string& gains_path, const std::string& message_path,
               const std::string& mask_path, const KeyShape& shape, const std::string& out,
               double tau1, double tau2, Eigen::Index max_support, double tol) {
    const auto gains = io::read_gains(gains_path);
    const Eigen::VectorXd message = io::read_vector(message_path);
    if (message.size() != shape.rows)
        throw std::runtime_error("message length " + std::to_string(message.size()) +
                                 " does not match --rows " + std::to_string(shape.rows));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(message.size()), 1);
    if (!mask_path.empty()) {
        mask = io::read_mask(mask_path);
        if (mask.size() != static_cast<std::size_t>(message.size()))
            throw std::runtime_error("mask length does not match the message");
    }
    const auto phi = key::synthesize_matrix(gains, shape.rows, shape.cols, shape.rounds);
    if (max_support <= 0) max_support = shape.rows / 4;
    if (tol < 0.0) tol = 1e-8 * message.norm();

    const auto result = tag::decode_message(phi, {message, mask}, tau1, tau2, max_support, tol);
    std::printf("auth: %s (%lld/%lld tags matched, tau1=%g tau2=%g)\n",
                result.auth.accepted ? "accept" : "reject",
                static_cast<long long>(result.auth.matched),
                static_cast<long long>(result.auth.tag_count), tau1, tau2);
    std::printf("recovery: %lld data rows, %d iterations, residual %.3e\n",
                static_cast<long long>(result.data_rows_used), result.report.iterations,
                result.report.residual_norm);
    if (!out.empty()) {
        io::write_vector_binary(out, result.report.recovered);
        std::printf("wrote recovered signal to %s\n", out.c_str());
    } else {
        for (Eigen::Index i = 0; i < result.report.recovered.size(); ++i)
            std::printf("%.17g\n", result.report.recovered(i));
    }
    return result.auth.accepted ? 0 : 2;
}

int run_simulate(const std::string& config_path, const std::string& preset_name,
                 const std::string& out, bool check, unsigned threads, int trials_override,
                 long long seed_override) {
    exp::ExperimentConfig cfg;
    if (!preset_name.empty()) cfg = exp::preset(preset_name);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error(config_path + ": cannot open for reading");
        cfg = exp::parse_config(in, cfg);
    }
    if (trials_override > 0) cfg.trials = trials_override;
    if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
    exp::validate(cfg);

    const auto result = exp::sweep(cfg, threads);
    exp::write_csv(result, out);
    std::printf("wrote %zu-point sweep over %s to %s\n", result.points.size(),
                exp::to_string(cfg.axis).c_str(), out.c_str());

    if (!check) return 0;
    exp::PropertyReport combined;
    for (const auto& p : result.points) {
        if (p.recovery_p < 0.0 || p.recovery_p > 1.0 || p.auth_p < 0.0 || p.auth_p > 1.0)
            combined.flag("probability out of range");
        if (p.trials != cfg.trials) combined.flag("trial count mismatch");
    }
    auto merge = [&combined](const exp::PropertyReport& r) {
        for (const auto& v : r.violations) combined.flag(v);
    };
    switch (cfg.axis) {
        case exp::Axis::Snr:
            merge(exp::monotone_within_interval(result, true));
            merge(exp::monotone_within_interval(result, true, true));
            merge(exp::auth_vs_recovery_dominance(result));
            break;
        case exp::Axis::Sparsity:
        case exp::Axis::Loss:
            merge(exp::monotone_within_interval(result, false));
            break;
    }
    for (const auto& v : combined.violations) std::fprintf(stderr, "check: %s\n", v.c_str());
    if (!combined.ok) return 3;
    std::printf("all sweep properties hold\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressed-sensing concurrent encryption and authentication"};
    app.require_subcommand(1);

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Derive the shared key matrix from channel gains");
    std::string kg_gains, kg_out;
    KeyShape kg_shape;
    bool kg_text = false;
    keygen->add_option("--gains", kg_gains, "Gains file, one decimal per line")->required();
    add_shape_options(keygen, kg_shape);
    keygen->add_option("--out", kg_out, "Output matrix file")->required();
    keygen->add_flag("--text", kg_text, "Write the text container instead of binary");

    // encode
    auto* encode = app.add_subcommand("encode", "Measure a signal and hide the tags");
    std::string en_gains, en_signal, en_out;
    KeyShape en_shape;
    bool en_text = false;
    encode->add_option("--gains", en_gains, "Gains file, one decimal per line")->required();
    encode->add_option("--signal", en_signal, "Signal file (container or one value per line)")
        ->required();
    add_shape_options(encode, en_shape);
    encode->add_option("--out", en_out, "Output message file")->required();
    encode->add_flag("--text", en_text, "Write the text container instead of binary");

    // decode
    auto* decode = app.add_subcommand("decode", "Authenticate a message and recover the signal");
    std::string de_gains, de_message, de_mask, de_out;
    KeyShape de_shape;
    double de_tau1 = 0.05, de_tau2 = 0.6, de_tol = -1.0;
    Eigen::Index de_support = 0;
    decode->add_option("--gains", de_gains, "Gains file, one decimal per line")->required();
    decode->add_option("--message", de_message, "Received message file")->required();
    decode->add_option("--mask", de_mask, "Present mask file, one 0/1 per line (default: all present)");
    add_shape_options(decode, de_shape);
    decode->add_option("--out", de_out, "Recovered signal output (default: print to stdout)");
    decode->add_option("--tau1", de_tau1, "Per-tag match tolerance");
    decode->add_option("--tau2", de_tau2, "Accepted tag fraction threshold");
    decode->add_option("--max-support", de_support, "Recovery support cap (default rows/4)");
    decode->add_option("--tol", de_tol, "Recovery residual tolerance (default 1e-8 * |message|)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo recovery/authentication sweeps");
    std::string si_config, si_preset, si_out;
    bool si_check = false;
    unsigned si_threads = 0;
    int si_trials = 0;
    long long si_seed = -1;
    simulate->add_option("--config", si_config, "Flat key=value config file");
    simulate->add_option("--preset", si_preset, "fig8|fig9|fig10|fig11|fig12")
        ->check(CLI::IsMember({"fig8", "fig9", "fig10", "fig11", "fig12"}));
    simulate->add_option("--out", si_out, "Output CSV path")->required();
    simulate->add_flag("--check", si_check, "Assert sweep properties, exit 3 on violation");
    simulate->add_option("--threads", si_threads, "Worker threads (default: hardware)");
    simulate->add_option("--trials", si_trials, "Override trials per grid point");
    simulate->add_option("--seed", si_seed, "Override the master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keygen->parsed()) return run_keygen(kg_gains, kg_shape, kg_out, kg_text);
        if (encode->parsed()) return run_encode(en_gains, en_signal, en_shape, en_out, en_text);
        if (decode->parsed())
            return run_decode(de_gains, de_message, de_mask, de_shape, de_out, de_tau1, de_tau2,
                              de_support, de_tol);
        if (simulate->parsed()) {
            if (si_config.empty() && si_preset.empty())
                throw std::runtime_error("simulate needs --config and/or --preset");
            return run_simulate(si_config, si_preset, si_out, si_check, si_threads, si_trials,
                                si_seed);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
