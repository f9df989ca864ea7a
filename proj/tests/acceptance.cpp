// Acceptance gate: nine end-to-end checks, one line of output each.
// Exit status is the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "bimo/bimo.hpp"

using namespace bimo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& what, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", idx, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<double> kFluxGrid = {0.5, 2.0, 7.0, 12.0};
const std::vector<double> kDephaseGrid = {0.0, 0.5, 1.0};

// ---- 1. difference-statistic pmf vs. brute-force enumeration ---------------

void check_difference_pmf() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const long cap = 100;
    for (double nc : kFluxGrid) {
        for (double delta : kDephaseGrid) {
            const ChannelParams p(nc, delta);
            for (Bit b : {Bit::zero, Bit::one}) {
                std::map<long, double> marg;
                for (long n0 = 0; n0 <= cap; ++n0)
                    for (long n1 = 0; n1 <= cap; ++n1)
                        marg[n1 - n0] += joint_pmf(p, b, {n0, n1});
                const long w = difference_window(nc);
                for (long d = -w; d <= w; ++d) {
                    const auto it = marg.find(d);
                    const double ref = it == marg.end() ? 0.0 : it->second;
                    worst = std::max(worst, std::abs(skellam_pmf(p, b, d) - ref));
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    report(1, "difference-statistic pmf matches pair enumeration",
           worst <= 1e-10 && dt < 10.0,
           "max |pmf - enumerated| = " + num(worst) + " (tol 1e-10), " + num(dt) +
               " s (budget 10 s)");
}

// ---- 2. linear llr vs. exact likelihood ratio -------------------------------

void check_llr_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double nc : kFluxGrid) {
        for (double delta : kDephaseGrid) {
            const ChannelParams p(nc, delta);
            for (long n0 = 0; n0 <= 30; ++n0) {
                for (long n1 = 0; n0 + n1 <= 30; ++n1) {
                    const double exact = joint_log_pmf(p, Bit::one, {n0, n1}) -
                                         joint_log_pmf(p, Bit::zero, {n0, n1});
                    worst = std::max(
                        worst, std::abs(bimo_llr(p, {n0, n1}).value - exact));
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    report(2, "count-difference llr equals the exact likelihood log-ratio",
           worst <= 1e-12 && dt < 5.0,
           "max |llr - log-ratio| = " + num(worst) + " (tol 1e-12), " + num(dt) +
               " s (budget 5 s)");
}

// ---- 3. raw error rate: closed form vs. enumeration vs. sampling ------------

void check_qber_triple() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_exact = 0.0;
    double worst_sigma = 0.0;
    const long trials = 1000000;
    std::uint64_t seed = 31000;
    for (double nc : kFluxGrid) {
        for (double delta : kDephaseGrid) {
            const ChannelParams p(nc, delta);
            const double closed = qber(p);

            double enumerated = 0.0;
            for (long n0 = 0; n0 <= 100; ++n0) {
                for (long n1 = 0; n1 <= 100; ++n1) {
                    const double pr = joint_pmf(p, Bit::zero, {n0, n1});
                    if (n1 > n0) enumerated += pr;
                    else if (n1 == n0) enumerated += 0.5 * pr;
                }
            }
            worst_exact = std::max(worst_exact, std::abs(closed - enumerated));

            RandomStream rng(seed++);
            long errors = 0;
            for (long t = 0; t < trials; ++t) {
                errors += hard_decision(sample_outcome(p, Bit::zero, rng), rng) !=
                          Bit::zero;
            }
            const double mc = static_cast<double>(errors) / trials;
            const double sigma =
                std::sqrt(closed * (1.0 - closed) / static_cast<double>(trials));
            worst_sigma = std::max(worst_sigma, std::abs(mc - closed) / sigma);
        }
    }
    const double dt = seconds_since(t0);
    report(3, "raw error rate: closed form, enumeration, and sampling agree",
           worst_exact <= 1e-10 && worst_sigma < 4.0 && dt < 30.0,
           "max |closed - enumerated| = " + num(worst_exact) +
               " (tol 1e-10), worst sampling deviation = " + num(worst_sigma) +
               " sigma (limit 4), " + num(dt) + " s (budget 30 s)");
}

// ---- 4. capacity: closed form validated, ordered, monotone, saturated -------

double reference_conditional_entropy(const ChannelParams& p, double z0) {
    const long w = difference_window(p.mean_photon_number);
    double h = 0.0;
    for (long d = -w; d <= w; ++d) {
        const double p0 = skellam_pmf(p, Bit::zero, d);
        const double p1 = skellam_pmf(p, Bit::one, d);
        const double mix = z0 * p0 + (1.0 - z0) * p1;
        if (mix <= 0.0) continue;
        const double post0 = z0 * p0 / mix;
        if (post0 > 0.0 && post0 < 1.0)
            h += mix * (-post0 * std::log2(post0) -
                        (1.0 - post0) * std::log2(1.0 - post0));
    }
    return h;
}

void check_capacity() {
    const auto t0 = std::chrono::steady_clock::now();

    double worst_closed = 0.0;
    for (double nc : kFluxGrid)
        for (double delta : kDephaseGrid)
            for (double z0 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                const ChannelParams p(nc, delta);
                worst_closed = std::max(
                    worst_closed,
                    std::abs(conditional_entropy(p, InputPrior(z0)) -
                             reference_conditional_entropy(p, z0)));
            }
    const bool closed_ok = worst_closed <= 1e-9;

    bool ordered = true;
    for (double nc = 0.5; nc <= 14.0; nc += 1.5)
        for (double delta : {0.0, 0.25, 0.5, 1.0})
            ordered = ordered && bimo_capacity(ChannelParams(nc, delta)) >=
                                     bsc_capacity(qber(ChannelParams(nc, delta)));

    bool monotone = true;
    for (double nc : {1.0, 6.0, 12.0}) {
        double prev_soft = bimo_capacity(ChannelParams(nc, 0.0));
        double prev_hard = bsc_capacity(qber(ChannelParams(nc, 0.0)));
        for (double delta = 0.2; delta <= 2.0; delta += 0.2) {
            const ChannelParams p(nc, delta);
            const double soft = bimo_capacity(p);
            const double hard = bsc_capacity(qber(p));
            monotone = monotone && soft < prev_soft && hard < prev_hard;
            prev_soft = soft;
            prev_hard = hard;
        }
    }

    const double sat = bimo_capacity(ChannelParams(12.0, 0.0));
    const bool saturated = sat >= 0.999;

    const double dt = seconds_since(t0);
    report(4, "soft-metric capacity: validated, ordered, monotone, saturated",
           closed_ok && ordered && monotone && saturated && dt < 60.0,
           "max closed-vs-direct entropy diff = " + num(worst_closed) +
               " (tol 1e-9), soft >= hard everywhere: " + (ordered ? "yes" : "NO") +
               ", monotone decay: " + (monotone ? "yes" : "NO") +
               ", capacity(flux 12, dephasing 0) = " + num(sat) +
               " (required >= 0.999), " + num(dt) + " s (budget 60 s)");
}

// ---- 5. soft-over-hard gap decays with flux ---------------------------------

void check_gap_decay() {
    const auto gap = [](double nc) {
        const ChannelParams p(nc, 0.0);
        return bimo_capacity(p) - bsc_capacity(qber(p));
    };
    const double lo = gap(1.0), hi = gap(12.0);
    report(5, "soft-over-hard capacity gap shrinks as flux grows", hi < lo,
           "gap(flux 1) = " + num(lo) + ", gap(flux 12) = " + num(hi));
}

// ---- helpers for the coded sweeps -------------------------------------------

SimConfig sweep_config(ChannelModelKind model, const CodeSpec& spec,
                       const std::vector<double>& targets, long max_frames,
                       long min_frame_errors, std::uint64_t master_seed) {
    SimConfig cfg;
    cfg.code_spec = spec;
    cfg.model = model;
    for (double t : targets) cfg.points.push_back(PointSpec{t, 0.0, 0.0, false});
    cfg.max_frames = max_frames;
    cfg.min_frame_errors = min_frame_errors;
    cfg.max_iters = 50;
    cfg.master_seed = master_seed;
    cfg.code_seed = 7;
    cfg.workers = 1;
    return cfg;
}

// ---- 6. coded gain of soft metrics over hard decisions ----------------------

void check_coded_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> targets = {0.06, 0.08, 0.10};
    const CodeSpec spec{500, 500};
    const auto soft =
        run_sweep(sweep_config(ChannelModelKind::Bimo, spec, targets, 20000, 100, 2026));
    const auto hard =
        run_sweep(sweep_config(ChannelModelKind::Bsc, spec, targets, 20000, 100, 2026));

    bool ordered = true;
    std::string pairs;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        ordered = ordered && soft[i].ber < hard[i].ber;
        pairs += (i ? "; " : "") + num(targets[i]) + ": " + num(soft[i].ber) +
                 " vs " + num(hard[i].ber);
    }
    const double last_soft = soft.back().ber;
    const double ratio = last_soft > 0.0
                             ? hard.back().ber / last_soft
                             : std::numeric_limits<double>::infinity();
    const double dt = seconds_since(t0);
    report(6, "soft metrics beat hard decisions after coding (rate 0.5)",
           ordered && ratio >= 100.0,
           "ber soft vs hard at " + pairs + "; ratio at 0.1 = " + num(ratio) +
               " (required >= 100), " + num(dt) + " s");
}

// ---- 7. soft-metric channel tracks its Gaussian surrogate -------------------

void check_awgn_sandwich() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> targets = {0.045, 0.05};
    const CodeSpec spec{750, 250};
    const auto soft =
        run_sweep(sweep_config(ChannelModelKind::Bimo, spec, targets, 20000, 100, 3030));
    const auto gauss =
        run_sweep(sweep_config(ChannelModelKind::Awgn, spec, targets, 20000, 100, 3030));

    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const bool measurable = soft[i].ber > 0.0 && gauss[i].ber > 0.0;
        const double ratio = measurable ? soft[i].ber / gauss[i].ber : 0.0;
        ok = ok && measurable && ratio >= 0.1 && ratio <= 10.0;
        detail += (i ? "; " : "") + num(targets[i]) + ": ber " + num(soft[i].ber) +
                  " vs " + num(gauss[i].ber) + " (ratio " + num(ratio) + ")";
    }
    const double dt = seconds_since(t0);
    report(7, "photon-count decoding tracks the Gaussian surrogate (rate 0.75)",
           ok, detail + "; required ratio in [0.1, 10], " + num(dt) + " s");
}

// ---- 8. higher code rate needs a cleaner channel ----------------------------

void check_rate_trend() {
    const auto t0 = std::chrono::steady_clock::now();
    // Scan a shared grid from noisy to clean; the waterfall point is the first
    // (largest) raw error rate whose residual ber is below 1e-3.
    const std::vector<double> grid = {0.10, 0.08, 0.06, 0.05, 0.04};
    const auto waterfall = [&](const CodeSpec& spec) -> double {
        for (double target : grid) {
            const auto rows = run_sweep(
                sweep_config(ChannelModelKind::Bimo, spec, {target}, 1500, 40, 4040));
            if (rows[0].ber < 1e-3) return target;
        }
        return 0.0;
    };
    const double half = waterfall(CodeSpec{500, 500});
    const double high = waterfall(CodeSpec{750, 250});
    const double dt = seconds_since(t0);
    report(8, "higher code rate demands a cleaner channel", high < half && high > 0.0,
           "residual ber first < 1e-3 at raw error rate " + num(high) +
               " (rate 0.75) vs " + num(half) + " (rate 0.5), " + num(dt) + " s");
}

// ---- 9. byte-identical reruns at any worker count ---------------------------

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("'") + BIMO_CLI_PATH + "' " + args + " >/dev/null 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void check_determinism() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / "bimo_acceptance";
    fs::create_directories(dir);
    const fs::path out = dir / "rerun.out";

    // Each entry: base invocation (without --out), plus per-run extra flags that
    // must not change the output bytes.
    struct Case {
        std::string base;
        std::string extra_a;
        std::string extra_b;
    };
    const std::vector<Case> cases = {
        {"capacity --nc-grid 0.5:3:0.5 --delta 0,0.5", "", ""},
        {"qber --nc 5 --delta 0.25", "", ""},
        {"llr-table --delta 0.25 --cap 12", "", ""},
        {"code-gen --rate 0.5 --seed 7", "", ""},
        {"ber-sim --model bimo --rate 0.61 --qber 0.09 --max-frames 300 "
         "--min-frame-errors 20 --seed 4",
         "--threads 1", "--threads 3"},
        {"ber-sim --model awgn --rate 0.5 --qber 0.08 --max-frames 200 "
         "--min-frame-errors 20 --seed 12",
         "--threads 2", "--threads 5"},
        {"ber-sim --model bsc --rate 0.75 --qber 0.04 --max-frames 200 "
         "--min-frame-errors 20 --seed 9",
         "--threads 4", "--threads 1"},
    };

    bool ok = true;
    std::string why = "all reruns byte-identical";
    for (const auto& c : cases) {
        const std::string invocation = c.base + " --out '" + out.string() + "'";
        const int ra = run_cli(invocation + " " + c.extra_a);
        const std::string first = slurp(out);
        const int rb = run_cli(invocation + " " + c.extra_b);
        if (ra != 0 || rb != 0 || first.empty() || first != slurp(out)) {
            ok = false;
            why = "mismatch or failure for: " + c.base;
            break;
        }
    }
    fs::remove_all(dir);
    const double dt = seconds_since(t0);
    report(9, "identical flags and seed reproduce output bytes at any thread count",
           ok, why + ", " + num(dt) + " s");
}

}  // namespace

int main() {
    check_difference_pmf();
    check_llr_equivalence();
    check_qber_triple();
    check_capacity();
    check_gap_decay();
    check_coded_ordering();
    check_awgn_sandwich();
    check_rate_trend();
    check_determinism();
    if (g_failures == 0) {
        std::printf("all acceptance checks passed\n");
    } else {
        std::printf("%d acceptance check(s) failed\n", g_failures);
    }
    return g_failures;
}
