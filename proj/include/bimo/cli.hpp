#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bimo/capacity.hpp"
#include "bimo/channel.hpp"
#include "bimo/errors.hpp"
#include "bimo/format.hpp"
#include "bimo/ldpc.hpp"
#include "bimo/metrics.hpp"
#include "bimo/montecarlo.hpp"
#include "bimo/version.hpp"

// Batch front end. Every CSV is self-describing: '#' header lines record the
// tool version and a command line that reproduces the file byte-for-byte.
// The worker-count flag is omitted from that record because it never affects
// output bytes. Exit codes: 0 ok, 1 usage, 2 numeric domain, 3 simulation
// or construction failure.

namespace bimo::cli {

enum class Command { None, Capacity, Qber, LlrTable, BerSim, CodeGen };

struct CliConfig {
    Command cmd = Command::None;
    bool help_requested = false;
    std::string help_text;
    std::string recorded_command; // normalized, without --threads

    std::vector<double> nc_values;
    std::vector<double> delta_values;
    double delta = 0.0;
    long llr_cap = 10;

    ChannelModelKind model = ChannelModelKind::Bimo;
    CodeSpec code_spec;
    std::vector<double> qber_values;
    bool points_by_nc = false;
    std::uint64_t seed = 1;
    std::uint64_t code_seed = 7;
    long max_frames = 100000;
    long min_frame_errors = 100;
    int max_iters = 50;
    int threads = 1;

    std::string out_path;
};

namespace detail {

inline double parse_number(const std::string& s, const std::string& flag) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw UsageError(flag + ": '" + s + "' is not a finite number");
    return v;
}

// Value syntax shared by the sweep flags: a single number, a comma list, or
// start:stop:step (start included; stop excluded up to a rounding guard).
inline std::vector<double> parse_values(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double part[3];
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            const std::size_t sep = s.find(':', pos);
            const bool last = k == 2;
            if (last != (sep == std::string::npos))
                throw UsageError(flag + ": grid must be start:stop:step");
            part[k] = parse_number(s.substr(pos, last ? std::string::npos : sep - pos), flag);
            pos = sep + 1;
        }
        const auto [a, b, step] = std::tuple{part[0], part[1], part[2]};
        if (!(step > 0.0)) throw UsageError(flag + ": grid step must be > 0");
        if (!(b > a)) throw UsageError(flag + ": grid stop must exceed start");
        const double raw = (b - a) / step - 1e-9;
        const long count = std::max<long>(1, static_cast<long>(std::ceil(raw)));
        if (count > 1000000) throw UsageError(flag + ": grid has more than 1e6 points");
        for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t sep = s.find(',', pos);
        const std::size_t end = sep == std::string::npos ? s.size() : sep;
        out.push_back(parse_number(s.substr(pos, end - pos), flag));
        if (sep == std::string::npos) break;
        pos = sep + 1;
    }
    if (out.empty()) throw UsageError(flag + ": no values given");
    return out;
}

inline CodeSpec code_spec_for_rate(const std::string& rate) {
    if (rate == "0.5") return {500, 500};
    if (rate == "0.61") return {252, 156};
    if (rate == "0.75") return {750, 250};
    throw UsageError("--rate '" + rate +
                     "' is not supported; choose 0.5 (500+500), 0.61 (252+156) or 0.75 (750+250)");
}

inline void require_nonneg(const std::vector<double>& vals, const std::string& flag) {
    for (double v : vals)
        if (!(std::isfinite(v) && v >= 0.0))
            throw UsageError(flag + ": values must be finite and >= 0");
}

// The command line recorded in output headers: original tokens minus the
// worker-count flag, quoted where needed.
inline std::string normalized_command(const std::vector<std::string>& args) {
    std::string out = "bimo";
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--threads") { ++i; continue; }
        if (a.rfind("--threads=", 0) == 0) continue;
        out += ' ';
        if (a.find_first_of(" \t'\"") != std::string::npos) {
            out += '\'';
            out += a;
            out += '\'';
        } else {
            out += a;
        }
    }
    return out;
}

} // namespace detail

// Parses argv (without the program name) into a validated config.
// Static preconditions are checked here so no work starts on a bad request.
inline CliConfig parse_args(const std::vector<std::string>& args) {
    CliConfig cfg;
    cfg.recorded_command = detail::normalized_command(args);

    CLI::App app{"photon-count channel toolkit: exact statistics, capacities, and coded error-rate simulation"};
    app.name("bimo");
    app.require_subcommand(1);

    std::string nc_spec, delta_spec = "0", qber_spec, rate_spec, model_spec, delta_scalar = "0";

    auto* cap = app.add_subcommand("capacity", "soft and hard channel capacity over a parameter grid");
    cap->add_option("--nc-grid", nc_spec, "mean photon numbers (value, list, or start:stop:step)")->required();
    cap->add_option("--delta", delta_spec, "phase diffusion widths (value, list, or grid)");
    cap->add_option("--out", cfg.out_path, "output file (default: stdout)");

    auto* qb = app.add_subcommand("qber", "raw hard-decision error rate");
    qb->add_option("--nc", nc_spec, "mean photon numbers (value, list, or grid)")->required();
    qb->add_option("--delta", delta_spec, "phase diffusion widths (value, list, or grid)");
    qb->add_option("--out", cfg.out_path, "output file (default: stdout)");

    auto* llr = app.add_subcommand("llr-table", "count-pair LLR table for n0+n1 <= cap");
    llr->add_option("--delta", delta_scalar, "phase diffusion width");
    llr->add_option("--cap", cfg.llr_cap, "largest total photon count")->check(CLI::NonNegativeNumber);
    llr->add_option("--out", cfg.out_path, "output file (default: stdout)");

    auto* sim = app.add_subcommand("ber-sim", "coded BER/FER sweep");
    sim->add_option("--model", model_spec, "channel model: bimo, bsc, or awgn")->required();
    sim->add_option("--rate", rate_spec, "code rate: 0.5, 0.61, or 0.75")->required();
    sim->add_option("--qber", qber_spec, "target raw error rates (value, list, or grid)");
    sim->add_option("--nc", nc_spec, "mean photon numbers (value, list, or grid)");
    sim->add_option("--delta", delta_scalar, "phase diffusion width");
    sim->add_option("--seed", cfg.seed, "master seed");
    sim->add_option("--code-seed", cfg.code_seed, "code construction seed");
    sim->add_option("--max-frames", cfg.max_frames, "frame budget per point");
    sim->add_option("--min-frame-errors", cfg.min_frame_errors, "stop a point after this many frame errors");
    sim->add_option("--max-iters", cfg.max_iters, "decoder iteration limit");
    sim->add_option("--threads", cfg.threads, "worker threads (never affects output bytes)");
    sim->add_option("--out", cfg.out_path, "output file (default: stdout)");

    auto* gen = app.add_subcommand("code-gen", "construct a code and export its parity-check matrix (alist)");
    gen->add_option("--rate", rate_spec, "code rate: 0.5, 0.61, or 0.75")->required();
    gen->add_option("--seed", cfg.code_seed, "construction seed");
    gen->add_option("--out", cfg.out_path, "output file (default: stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev); // CLI11 consumes reversed argv
    } catch (const CLI::CallForHelp& e) {
        cfg.help_requested = true;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + " (try 'bimo --help')");
    }

    if (cap->parsed()) {
        cfg.cmd = Command::Capacity;
        cfg.nc_values = detail::parse_values(nc_spec, "--nc-grid");
        cfg.delta_values = detail::parse_values(delta_spec, "--delta");
        detail::require_nonneg(cfg.nc_values, "--nc-grid");
        detail::require_nonneg(cfg.delta_values, "--delta");
    } else if (qb->parsed()) {
        cfg.cmd = Command::Qber;
        cfg.nc_values = detail::parse_values(nc_spec, "--nc");
        cfg.delta_values = detail::parse_values(delta_spec, "--delta");
        detail::require_nonneg(cfg.nc_values, "--nc");
        detail::require_nonneg(cfg.delta_values, "--delta");
    } else if (llr->parsed()) {
        cfg.cmd = Command::LlrTable;
        cfg.delta = detail::parse_number(delta_scalar, "--delta");
        if (!(cfg.delta >= 0.0)) throw UsageError("--delta: must be >= 0");
    } else if (sim->parsed()) {
        cfg.cmd = Command::BerSim;
        if (model_spec == "bimo") cfg.model = ChannelModelKind::Bimo;
        else if (model_spec == "bsc") cfg.model = ChannelModelKind::Bsc;
        else if (model_spec == "awgn") cfg.model = ChannelModelKind::Awgn;
        else throw UsageError("--model '" + model_spec + "' is not supported; choose bimo, bsc, or awgn");
        cfg.code_spec = detail::code_spec_for_rate(rate_spec);
        cfg.delta = detail::parse_number(delta_scalar, "--delta");
        if (!(cfg.delta >= 0.0)) throw UsageError("--delta: must be >= 0");
        const bool has_qber = !qber_spec.empty(), has_nc = !nc_spec.empty();
        if (has_qber == has_nc)
            throw UsageError("ber-sim needs exactly one of --qber or --nc");
        if (has_qber) {
            cfg.qber_values = detail::parse_values(qber_spec, "--qber");
            for (double v : cfg.qber_values)
                if (!(v > 0.0 && v < 0.5))
                    throw UsageError("--qber: targets must lie in (0, 1/2)");
        } else {
            cfg.points_by_nc = true;
            cfg.nc_values = detail::parse_values(nc_spec, "--nc");
            for (double v : cfg.nc_values)
                if (!(std::isfinite(v) && v > 0.0))
                    throw UsageError("--nc: values must be finite and > 0");
        }
        if (cfg.max_frames < 1) throw UsageError("--max-frames: must be >= 1");
        if (cfg.min_frame_errors < 1) throw UsageError("--min-frame-errors: must be >= 1");
        if (cfg.max_iters < 1) throw UsageError("--max-iters: must be >= 1");
        if (cfg.threads < 1) throw UsageError("--threads: must be >= 1");
    } else if (gen->parsed()) {
        cfg.cmd = Command::CodeGen;
        cfg.code_spec = detail::code_spec_for_rate(rate_spec);
    }
    return cfg;
}

namespace detail {

inline std::string csv_header(const CliConfig& cfg, bool with_seed) {
    std::string h = "# bimo ";
    h += kVersion;
    h += "\n# command: ";
    h += cfg.recorded_command;
    h += '\n';
    if (with_seed) {
        h += "# master-seed: ";
        h += std::to_string(cfg.seed);
        h += '\n';
    }
    return h;
}

inline std::string exec_capacity(const CliConfig& cfg) {
    std::vector<ChannelParams> grid;
    for (double nc : cfg.nc_values)
        for (double d : cfg.delta_values) grid.emplace_back(nc, d);
    const std::vector<CapacityPoint> pts = capacity_sweep(grid);
    std::string out = csv_header(cfg, false);
    out += "N_c,Delta,qber,capacity_bimo,capacity_bsc\n";
    for (const CapacityPoint& p : pts) {
        out += format_real(p.params.mean_photon_number);
        out += ',';
        out += format_real(p.params.phase_diffusion);
        out += ',';
        out += format_real(p.qber);
        out += ',';
        out += format_real(p.bimo_capacity);
        out += ',';
        out += format_real(p.bsc_capacity);
        out += '\n';
    }
    return out;
}

inline std::string exec_qber(const CliConfig& cfg) {
    std::string out = csv_header(cfg, false);
    out += "N_c,Delta,qber\n";
    for (double nc : cfg.nc_values)
        for (double d : cfg.delta_values) {
            out += format_real(nc);
            out += ',';
            out += format_real(d);
            out += ',';
            out += format_real(qber(ChannelParams(nc, d)));
            out += '\n';
        }
    return out;
}

inline std::string exec_llr_table(const CliConfig& cfg) {
    const ChannelParams params(1.0, cfg.delta); // LLR depends only on Delta
    std::string out = csv_header(cfg, false);
    out += "n0,n1,llr_nat,llr_log2\n";
    for (long n0 = 0; n0 <= cfg.llr_cap; ++n0)
        for (long n1 = 0; n0 + n1 <= cfg.llr_cap; ++n1) {
            const double v = bimo_llr(params, {n0, n1}).value;
            out += std::to_string(n0);
            out += ',';
            out += std::to_string(n1);
            out += ',';
            out += format_real(v);
            out += ',';
            out += format_real(v / kLn2);
            out += '\n';
        }
    return out;
}

inline std::string exec_ber_sim(const CliConfig& cfg) {
    SimConfig sim;
    sim.code_spec = cfg.code_spec;
    sim.model = cfg.model;
    sim.max_frames = cfg.max_frames;
    sim.min_frame_errors = cfg.min_frame_errors;
    sim.max_iters = cfg.max_iters;
    sim.master_seed = cfg.seed;
    sim.code_seed = cfg.code_seed;
    sim.workers = cfg.threads;
    if (cfg.points_by_nc) {
        for (double nc : cfg.nc_values) sim.points.push_back({0.0, nc, cfg.delta, true});
    } else {
        for (double t : cfg.qber_values) sim.points.push_back({t, 0.0, cfg.delta, false});
    }
    const std::vector<SimRecord> records = run_sweep(sim); // fail fast: no partial files
    std::string out = csv_header(cfg, true);
    out += sim_record_csv_header();
    out += '\n';
    for (const SimRecord& r : records) {
        out += to_csv_row(r);
        out += '\n';
    }
    return out;
}

inline std::string exec_code_gen(const CliConfig& cfg) {
    const Code code = construct_code(cfg.code_spec, cfg.code_seed);
    std::ostringstream os;
    write_alist(code.h, os);
    return os.str();
}

inline void write_output(const CliConfig& cfg, const std::string& content) {
    if (cfg.out_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::filesystem::path path(cfg.out_path);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("BIMO_OUT_DIR"); dir && *dir)
            path = std::filesystem::path(dir) / path;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
        f.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw std::runtime_error("failed writing output file " + path.string());
    }
}

} // namespace detail

inline int execute(const CliConfig& cfg) {
    if (cfg.help_requested) {
        std::cout << cfg.help_text;
        return 0;
    }
    std::string content;
    switch (cfg.cmd) {
        case Command::Capacity: content = detail::exec_capacity(cfg); break;
        case Command::Qber: content = detail::exec_qber(cfg); break;
        case Command::LlrTable: content = detail::exec_llr_table(cfg); break;
        case Command::BerSim: content = detail::exec_ber_sim(cfg); break;
        case Command::CodeGen: content = detail::exec_code_gen(cfg); break;
        default: throw UsageError("a subcommand is required (try 'bimo --help')");
    }
    detail::write_output(cfg, content);
    return 0;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return execute(parse_args(args));
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DegenerateChannel& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TargetUnreachable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace bimo::cli
