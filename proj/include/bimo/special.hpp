#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bimo {

inline constexpr double kLn2 = 0.6931471805599453094172321;

// ln(1 + e^t), overflow-safe for any t.
inline double log1pexp(double t) {
    if (t > 36.0) return t + std::exp(-t);
    if (t < -37.0) return std::exp(t);
    return std::log1p(std::exp(t));
}

// ln I_n(x) for integer order n >= 0, x >= 0.
//
// Power series sum_k (x/2)^{n+2k} / (k! (n+k)!). All terms are positive, so
// the sum is evaluated relative to its largest term: locate the peak index,
// then walk outward with the exact term-to-term ratios until terms are
// negligible. No cancellation occurs and only two lgamma calls are needed,
// which keeps the relative error near 1e-14 for the order/argument ranges
// used here (x up to ~1e3, n up to the truncation window).
inline double log_bessel_i(long n, double x) {
    if (n < 0) throw std::domain_error("log_bessel_i: order must be >= 0");
    if (x < 0.0) throw std::domain_error("log_bessel_i: argument must be >= 0");
    if (x == 0.0)
        return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();

    const double nd = static_cast<double>(n);
    // Peak of t_k = (n+2k) ln(x/2) - ln k! - ln (n+k)! over real k.
    double kpk = 0.5 * (-(nd + 1.0) + std::sqrt((nd + 1.0) * (nd + 1.0) + x * x));
    long k0 = kpk > 0.0 ? static_cast<long>(kpk) : 0;

    const double lhalf = std::log(0.5 * x);
    auto log_term = [&](long k) {
        return (nd + 2.0 * k) * lhalf - std::lgamma(k + 1.0) - std::lgamma(nd + k + 1.0);
    };
    const double t0 = log_term(k0);

    // term(k+1)/term(k) = x^2 / (4 (k+1) (n+k+1))
    const double x2q = 0.25 * x * x;
    double sum = 1.0;
    double term = 1.0;
    for (long k = k0; term > 1e-19; ++k) {
        term *= x2q / (static_cast<double>(k + 1) * (nd + k + 1.0));
        sum += term;
    }
    term = 1.0;
    for (long k = k0; k > 0 && term > 1e-19; --k) {
        term *= static_cast<double>(k) * (nd + k) / x2q;
        sum += term;
    }
    return t0 + std::log(sum);
}

// Gaussian tail Q(x) = P(Z > x) for standard normal Z.
inline double q_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Inverse of q_tail on (0, 1/2], by bisection. Q is strictly decreasing;
// [0, 40] covers every tail probability representable in double.
inline double q_tail_inv(double p) {
    if (!(p > 0.0 && p <= 0.5))
        throw std::domain_error("q_tail_inv: probability must be in (0, 1/2]");
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (q_tail(mid) > p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

// Binary entropy in bits, with the 0 log 0 = 0 convention.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

} // namespace bimo
