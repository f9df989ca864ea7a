#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bimo/channel.hpp"
#include "bimo/errors.hpp"
#include "bimo/special.hpp"

// Mutual information and capacity of the photon-count channel, computed
// through the difference statistic D = n1 - n0 (sufficient for the binary
// hypothesis, so nothing is lost), and the capacity of the hard-decision
// binary symmetric channel it induces.

namespace bimo {

struct InputPrior {
    double z0 = 0.5; // probability of sending bit 0

    explicit InputPrior(double z) : z0(z) {
        if (!(z >= 0.0 && z <= 1.0))
            throw std::domain_error("InputPrior: z0 must lie in [0, 1]");
    }
};

// Likelihood-ratio factor per unit of D: p(d|bit1)/p(d|bit0) = alpha^d with
// alpha = (1-q)/q > 1.
inline double alpha_param(double phase_diffusion) {
    const double q = q_param(phase_diffusion);
    return (1.0 - q) / q;
}

// Posterior (P(bit0 | D=m), P(bit1 | D=m)). Only the observation's
// likelihood ratio alpha^m and the prior enter, so N_c is not needed.
// Evaluated through the log-odds t = ln((1-z0)/z0) + m ln(alpha) to stay
// stable when alpha^m would overflow.
inline std::pair<double, double> posterior(const InputPrior& prior,
                                           double phase_diffusion, long m) {
    const double z0 = prior.z0;
    if (z0 == 0.0) return {0.0, 1.0};
    if (z0 == 1.0) return {1.0, 0.0};
    const double t = std::log((1.0 - z0) / z0) + m * std::log(alpha_param(phase_diffusion));
    const double p1 = 1.0 / (1.0 + std::exp(-t));
    return {1.0 - p1, p1};
}

// H(Phi | D) in bits: minus the sum over outcomes m of
//   z0 p(m|bit0) log2 p(bit0|m) + (1-z0) p(m|bit1) log2 p(bit1|m).
// The weights are assembled in log space and the log-posteriors through
// log1pexp, so every term is finite for all priors and outcomes.
inline double conditional_entropy(const ChannelParams& params, const InputPrior& prior) {
    const double z0 = prior.z0;
    if (z0 == 0.0 || z0 == 1.0) return 0.0;

    const double lnalpha = std::log(alpha_param(params.phase_diffusion));
    const auto [m0, m1] = arm_means(params, Bit::zero);
    const double bessel_arg = 2.0 * std::sqrt(m0 * m1);
    const double log_prior_odds = std::log((1.0 - z0) / z0);
    const long w = difference_window(params.mean_photon_number);

    double h = 0.0;
    for (long m = -w; m <= w; ++m) {
        // log of the common Skellam factor e^{-Nc} I_|m|(arg)
        const double log_b = -params.mean_photon_number + log_bessel_i(std::labs(m), bessel_arg);
        const double w0 = z0 * std::exp(log_b - 0.5 * m * lnalpha);
        const double w1 = (1.0 - z0) * std::exp(log_b + 0.5 * m * lnalpha);
        const double t = log_prior_odds + m * lnalpha; // posterior log odds
        const double log2_p0 = -log1pexp(t) / kLn2;
        const double log2_p1 = -log1pexp(-t) / kLn2;
        h -= w0 * log2_p0 + w1 * log2_p1;
    }
    return h;
}

// I(Phi; D) = H(Phi) - H(Phi|D), in bits per channel use.
inline double mutual_information(const ChannelParams& params, const InputPrior& prior) {
    if (prior.z0 == 0.0 || prior.z0 == 1.0) return 0.0;
    // Clamp the ~1e-16 negative residue the two entropy paths can leave.
    return std::max(0.0, binary_entropy(prior.z0) - conditional_entropy(params, prior));
}

// The uniform prior maximizes the mutual information of this channel
// (asserted on a prior grid in the tests rather than proved here).
inline double bimo_capacity(const ChannelParams& params) {
    return mutual_information(params, InputPrior(0.5));
}

// Capacity of a binary symmetric channel with the given crossover.
inline double bsc_capacity(double qber) {
    if (!(qber >= 0.0 && qber <= 0.5))
        throw std::domain_error("bsc_capacity: crossover must lie in [0, 1/2]");
    return 1.0 - binary_entropy(qber);
}

struct CapacityPoint {
    ChannelParams params;
    double qber = 0.0;
    double bimo_capacity = 0.0;
    double bsc_capacity = 0.0;
};

inline std::vector<CapacityPoint> capacity_sweep(const std::vector<ChannelParams>& grid) {
    std::vector<CapacityPoint> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            CapacityPoint pt{grid[i], 0.0, 0.0, 0.0};
            pt.qber = qber(grid[i]);
            pt.bimo_capacity = bimo_capacity(grid[i]);
            pt.bsc_capacity = bsc_capacity(pt.qber);
            out.push_back(pt);
        } catch (const std::domain_error& e) {
            throw std::domain_error("capacity_sweep: point " + std::to_string(i) + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("capacity_sweep: point " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

} // namespace bimo
