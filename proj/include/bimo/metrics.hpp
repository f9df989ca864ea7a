#pragma once

#include <cmath>

#include "bimo/channel.hpp"
#include "bimo/errors.hpp"
#include "bimo/random.hpp"
#include "bimo/special.hpp"

// Soft and hard demappers. One global sign convention everywhere:
// an LLR is ln(P(observation | bit = 1) / P(observation | bit = 0)),
// natural log, so positive values favor bit 1. The sum-product tanh rule
// is only exact for natural-log LLRs; base-2 values are display-only.

namespace bimo {

struct Llr {
    double value = 0.0; // natural log scale
};

// Exact LLR of a photon-count pair. The joint Poisson likelihood ratio
// collapses to (n0 - n1) * ln(q/(1-q)) with q = q_param(Delta): only the
// count difference matters, and ln(q/(1-q)) < 0 makes the sign track the
// majority arm (positive iff n1 > n0).
inline Llr bimo_llr(const ChannelParams& p, const PhotonOutcome& o) {
    const double q = q_param(p.phase_diffusion);
    if (q >= 0.5)
        throw DegenerateChannel("bimo_llr: arms are indistinguishable (q = 1/2)");
    return {(static_cast<double>(o.n0) - static_cast<double>(o.n1)) *
            std::log(q / (1.0 - q))};
}

// Hard-decision channel LLR: +/- ln((1-QBER)/QBER) keyed by the received bit.
inline Llr bsc_llr(double qber, Bit hard_bit) {
    if (!(qber > 0.0 && qber < 0.5))
        throw DegenerateChannel("bsc_llr: crossover must lie in (0, 1/2)");
    const double mag = std::log((1.0 - qber) / qber);
    return {hard_bit == Bit::one ? mag : -mag};
}

// Sign-of-difference detector; ties are broken by a fair coin from the
// caller's stream so the realized error rate is exactly the channel QBER.
inline Bit hard_decision(const PhotonOutcome& o, RandomStream& rng) {
    if (o.n1 > o.n0) return Bit::one;
    if (o.n1 < o.n0) return Bit::zero;
    return make_bit(rng.coin());
}

// Antipodal signaling over real AWGN, unit symbol energy.
struct AwgnOperatingPoint {
    double symbol_energy_to_noise = 0.0; // E_s/N_0
    double noise_std = 0.0;              // per-dimension sigma = 1/sqrt(2 Es/N0)
};

// Operating point whose uncoded hard-decision error rate equals the target:
// Q(sqrt(2 Es/N0)) = target, i.e. Es/N0 = Q^{-1}(target)^2 / 2.
inline AwgnOperatingPoint snr_from_qber(double target_qber) {
    if (!(target_qber > 0.0 && target_qber < 0.5))
        throw DegenerateChannel("snr_from_qber: target must lie in (0, 1/2)");
    const double x = q_tail_inv(target_qber);
    AwgnOperatingPoint op;
    op.symbol_energy_to_noise = 0.5 * x * x;
    op.noise_std = 1.0 / x;
    return op;
}

// One AWGN channel use: transmit s = +/-1, observe y = s + sigma * z,
// return the exact antipodal LLR 2y / sigma^2.
inline Llr awgn_sample_llr(const AwgnOperatingPoint& op, Bit bit, RandomStream& rng) {
    const double s = bit == Bit::one ? 1.0 : -1.0;
    const double y = s + op.noise_std * rng.gaussian();
    return {2.0 * y / (op.noise_std * op.noise_std)};
}

} // namespace bimo
