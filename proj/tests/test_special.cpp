#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bimo/special.hpp"

using namespace bimo;

TEST_CASE("log1pexp matches direct evaluation in the safe range") {
    for (double t = -30.0; t <= 30.0; t += 0.37) {
        REQUIRE(log1pexp(t) == Catch::Approx(std::log1p(std::exp(t))).epsilon(1e-14));
    }
}

TEST_CASE("log1pexp is accurate at extreme arguments") {
    // Large positive: log(1+e^t) ~= t + e^{-t}.
    REQUIRE(log1pexp(50.0) == Catch::Approx(50.0 + std::exp(-50.0)).epsilon(1e-15));
    REQUIRE(log1pexp(800.0) == 800.0);  // would overflow a naive exp
    // Large negative: log(1+e^t) ~= e^t.
    REQUIRE(log1pexp(-45.0) == Catch::Approx(std::exp(-45.0)).epsilon(1e-13));
    REQUIRE(log1pexp(-800.0) == 0.0);
    REQUIRE(std::isfinite(log1pexp(0.0)));
    REQUIRE(log1pexp(0.0) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("log_bessel_i agrees with the standard library where both are finite") {
    // std::cyl_bessel_i overflows past x ~ 700; compare in log domain below that.
    for (int n : {0, 1, 2, 5, 11, 40}) {
        for (double x : {0.5, 1.0, 3.0, 10.0, 55.0, 300.0}) {
            const double ref = std::cyl_bessel_i(static_cast<double>(n), x);
            REQUIRE(log_bessel_i(n, x) ==
                    Catch::Approx(std::log(ref)).epsilon(1e-12).margin(1e-12));
        }
    }
}

TEST_CASE("log_bessel_i handles the zero-argument boundary") {
    REQUIRE(log_bessel_i(0, 0.0) == 0.0);  // I_0(0) = 1
    REQUIRE(log_bessel_i(1, 0.0) == -std::numeric_limits<double>::infinity());
    REQUIRE(log_bessel_i(7, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log_bessel_i stays finite and monotone in x for large arguments") {
    // Far beyond cyl_bessel_i's overflow point the log-domain value must still
    // be finite and increasing in x (I_n is increasing on x > 0).
    double prev = log_bessel_i(3, 500.0);
    for (double x : {800.0, 1200.0, 2000.0, 5000.0}) {
        const double cur = log_bessel_i(3, x);
        REQUIRE(std::isfinite(cur));
        REQUIRE(cur > prev);
        prev = cur;
    }
    // Asymptotically log I_n(x) ~ x - 0.5*log(2*pi*x).
    const double x = 5000.0;
    const double asym = x - 0.5 * std::log(2.0 * M_PI * x);
    REQUIRE(log_bessel_i(0, x) == Catch::Approx(asym).epsilon(1e-4));
}

TEST_CASE("log_bessel_i satisfies the three-term recurrence") {
    // I_{n-1}(x) - I_{n+1}(x) = (2n/x) I_n(x), checked in linear space via
    // exponentials of the log values (safe for moderate x).
    for (double x : {2.0, 9.0, 41.0}) {
        for (int n : {1, 2, 6, 15}) {
            const double lo = std::exp(log_bessel_i(n - 1, x));
            const double hi = std::exp(log_bessel_i(n + 1, x));
            const double mid = std::exp(log_bessel_i(n, x));
            REQUIRE(lo - hi == Catch::Approx(2.0 * n / x * mid).epsilon(1e-11));
        }
    }
}

TEST_CASE("q_tail reproduces the Gaussian tail at known points") {
    REQUIRE(q_tail(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(q_tail(1.0) == Catch::Approx(0.15865525393145705).epsilon(1e-13));
    REQUIRE(q_tail(3.0) == Catch::Approx(0.0013498980316300933).epsilon(1e-12));
}

TEST_CASE("q_tail_inv inverts q_tail across the working range") {
    for (double p : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.45}) {
        const double x = q_tail_inv(p);
        REQUIRE(q_tail(x) == Catch::Approx(p).epsilon(1e-10));
    }
    // Frozen reference value computed with 50-digit arithmetic.
    REQUIRE(q_tail_inv(0.1) == Catch::Approx(1.281551565544600466965).epsilon(1e-10));
}

TEST_CASE("binary_entropy hits its known anchors") {
    REQUIRE(binary_entropy(0.0) == 0.0);
    REQUIRE(binary_entropy(1.0) == 0.0);
    REQUIRE(binary_entropy(0.5) == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(binary_entropy(0.11) == Catch::Approx(0.49991595816452800).epsilon(1e-13));
    // Symmetry h(p) = h(1-p).
    for (double p : {0.03, 0.2, 0.41}) {
        REQUIRE(binary_entropy(p) == Catch::Approx(binary_entropy(1.0 - p)).epsilon(1e-14));
    }
}
