#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bimo/errors.hpp"
#include "bimo/random.hpp"
#include "bimo/special.hpp"

// Binary-input/multiple-output channel of a two-arm photon-counting
// receiver. A carrier pulse with mean photon number N_c is split by the
// transmitted bit's polarization phase (pi/4 for 0, 3*pi/4 for 1) into two
// detector arms whose counts are independent Poisson variables. Gaussian
// phase noise of width Delta shrinks the arm contrast by exp(-Delta^2).

namespace bimo {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

enum class Bit : int { zero = 0, one = 1 };

inline constexpr int bit_value(Bit b) { return static_cast<int>(b); }
inline constexpr Bit make_bit(int v) { return v ? Bit::one : Bit::zero; }
inline constexpr Bit flip(Bit b) { return b == Bit::zero ? Bit::one : Bit::zero; }

struct ChannelParams {
    double mean_photon_number; // N_c, mean photons per carrier pulse
    double phase_diffusion;    // Delta, std dev of the polarization phase noise

    ChannelParams(double nc, double delta)
        : mean_photon_number(nc), phase_diffusion(delta) {
        if (!(std::isfinite(nc) && nc >= 0.0))
            throw std::domain_error("ChannelParams: mean photon number must be finite and >= 0");
        if (!(std::isfinite(delta) && delta >= 0.0))
            throw std::domain_error("ChannelParams: phase diffusion must be finite and >= 0");
    }
};

struct PhotonOutcome {
    long n0 = 0; // photons in the reflected arm
    long n1 = 0; // photons in the transmitted arm
};

// Mean photon numbers (N0, N1) of the two arms for a given transmitted bit.
// N0 + N1 = N_c; the bit only moves contrast between the arms.
inline std::pair<double, double> arm_means(const ChannelParams& p, Bit bit) {
    const double contrast =
        std::exp(-p.phase_diffusion * p.phase_diffusion) * kInvSqrt2;
    const double c = bit == Bit::zero ? contrast : -contrast;
    const double half = 0.5 * p.mean_photon_number;
    return {half * (1.0 + c), half * (1.0 - c)};
}

// q = N1/N_c for bit 0 (equivalently N0/N_c for bit 1): the fraction of the
// carrier that leaks into the "wrong" arm. Ranges over [(2-sqrt(2))/4, 1/2).
inline double q_param(double phase_diffusion) {
    if (!(std::isfinite(phase_diffusion) && phase_diffusion >= 0.0))
        throw std::domain_error("q_param: phase diffusion must be finite and >= 0");
    return 0.5 * (1.0 - std::exp(-phase_diffusion * phase_diffusion) * kInvSqrt2);
}

// ln p(n0, n1 | bit): product of the two Poisson arm laws, in log space so
// large counts cannot overflow.
inline double joint_log_pmf(const ChannelParams& p, Bit bit, const PhotonOutcome& o) {
    if (o.n0 < 0 || o.n1 < 0)
        throw std::domain_error("joint_log_pmf: photon counts must be >= 0");
    const auto [m0, m1] = arm_means(p, bit);
    const double inf = std::numeric_limits<double>::infinity();
    if (m0 == 0.0 && o.n0 > 0) return -inf;
    if (m1 == 0.0 && o.n1 > 0) return -inf;
    double lp = -p.mean_photon_number;
    if (o.n0 > 0) lp += o.n0 * std::log(m0) - std::lgamma(o.n0 + 1.0);
    if (o.n1 > 0) lp += o.n1 * std::log(m1) - std::lgamma(o.n1 + 1.0);
    return lp;
}

inline double joint_pmf(const ChannelParams& p, Bit bit, const PhotonOutcome& o) {
    return std::exp(joint_log_pmf(p, bit, o));
}

// ln p(D = d | bit) for the difference statistic D = n1 - n0. The difference
// of two independent Poisson variables with means (N0, N1) has pmf
//   exp(-(N0+N1)) * (N1/N0)^(d/2) * I_|d|(2 sqrt(N0 N1)).
inline double skellam_log_pmf(const ChannelParams& p, Bit bit, long d) {
    const auto [m0, m1] = arm_means(p, bit);
    if (m0 == 0.0 || m1 == 0.0) { // only when N_c = 0: all mass at d = 0
        return d == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return -p.mean_photon_number + 0.5 * d * std::log(m1 / m0) +
           log_bessel_i(std::labs(d), 2.0 * std::sqrt(m0 * m1));
}

inline double skellam_pmf(const ChannelParams& p, Bit bit, long d) {
    return std::exp(skellam_log_pmf(p, bit, d));
}

// Truncation window for sums over the difference statistic: more than ten
// standard deviations past the mean, leaving tail mass below 1e-12.
inline long difference_window(double nc) {
    return static_cast<long>(std::ceil(nc + 10.0 * std::sqrt(nc + 1.0) + 20.0));
}

struct DifferencePmf {
    long d_min = 0;
    long d_max = 0;
    std::vector<double> mass; // indexed by d - d_min

    double at(long d) const {
        if (d < d_min || d > d_max) return 0.0;
        return mass[static_cast<std::size_t>(d - d_min)];
    }
    double total() const {
        double s = 0.0;
        for (double v : mass) s += v;
        return s;
    }
};

inline DifferencePmf difference_pmf(const ChannelParams& p, Bit bit) {
    DifferencePmf out;
    out.d_max = difference_window(p.mean_photon_number);
    out.d_min = -out.d_max;
    out.mass.resize(static_cast<std::size_t>(2 * out.d_max + 1));
    for (long d = out.d_min; d <= out.d_max; ++d)
        out.mass[static_cast<std::size_t>(d - out.d_min)] = skellam_pmf(p, bit, d);
    return out;
}

// Raw hard-decision error probability: the receiver decides by the sign of
// D and tosses a fair coin on a tie, so for bit 0 (where D < 0 is correct)
// the error mass is P(D > 0) + P(D = 0)/2.
inline double qber(const ChannelParams& p) {
    const long w = difference_window(p.mean_photon_number);
    double s = 0.5 * skellam_pmf(p, Bit::zero, 0);
    for (long m = 1; m <= w; ++m) s += skellam_pmf(p, Bit::zero, m);
    return s;
}

// Inverts qber(N_c, Delta) in N_c by bisection on [0, 1000]; the map is
// strictly decreasing from 1/2 toward the floor set by the search ceiling.
inline double nc_for_qber(double target_qber, double phase_diffusion) {
    if (!(std::isfinite(target_qber)) || target_qber >= 0.5 || target_qber <= 0.0)
        throw TargetUnreachable("nc_for_qber: target must lie in (0, 1/2)");
    if (!(std::isfinite(phase_diffusion) && phase_diffusion >= 0.0))
        throw std::domain_error("nc_for_qber: phase diffusion must be finite and >= 0");

    constexpr double kCeiling = 1e3;
    constexpr double kTol = 1e-9;
    if (qber(ChannelParams(kCeiling, phase_diffusion)) > target_qber)
        throw TargetUnreachable("nc_for_qber: target below reachable range at N_c ceiling");

    double lo = 0.0, hi = kCeiling;
    double mid = 0.5 * kCeiling;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double err = qber(ChannelParams(mid, phase_diffusion)) - target_qber;
        if (std::abs(err) <= kTol) return mid;
        if (err > 0.0)
            lo = mid; // qber too high: need more photons
        else
            hi = mid;
    }
    return mid;
}

// One channel use: independent Poisson counts in the two arms.
inline PhotonOutcome sample_outcome(const ChannelParams& p, Bit bit, RandomStream& rng) {
    const auto [m0, m1] = arm_means(p, bit);
    PhotonOutcome o;
    o.n0 = rng.poisson(m0);
    o.n1 = rng.poisson(m1);
    return o;
}

} // namespace bimo
