#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace upde {

inline constexpr double kPi = std::numbers::pi;

/// Per-mode magnitudes whose natural log exceeds this are treated as
/// unrepresentable in double precision (DBL_MAX sits near exp(709.78)).
inline constexpr double kOverflowLogThreshold = 700.0;

/// exp(-x) underflows to an exact 0 beyond this exponent; callers that
/// evaluate e^{-p n^2} rely on the cutoff instead of producing denormals.
inline constexpr double kExpUnderflowThreshold = 750.0;

/// a^b for a > 0, evaluated as exp(b log a) so that extreme bases and
/// exponents stay in range whenever the result itself is representable.
inline double pow_log(double base, double exponent) {
    if (!(base > 0.0)) {
        throw std::invalid_argument("pow_log: base must be positive");
    }
    if (exponent == 0.0) {
        return 1.0;
    }
    return std::exp(exponent * std::log(base));
}

/// e^{-x} with the documented hard underflow at kExpUnderflowThreshold.
inline double exp_neg(double x) {
    return x > kExpUnderflowThreshold ? 0.0 : std::exp(-x);
}

/// log(sum_i exp(v_i)) over possibly huge exponents; -inf entries are
/// ignored, an empty (or all -inf) input yields -inf.
inline double log_sum_exp(std::span<const double> values) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (v > peak) {
            peak = v;
        }
    }
    if (!std::isfinite(peak)) {
        return peak;
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(v - peak);
    }
    return peak + std::log(acc);
}

namespace detail {
// 2*pi split into a double-double pair; the tail keeps the integer-multiple
// reduction below accurate for multipliers up to ~1e10.
inline constexpr double kTwoPiHi = 0x1.921fb54442d18p+2;
inline constexpr double kTwoPiLo = 0x1.1a62633145c07p-51;
}  // namespace detail

/// sin(n*x) for integer n up to ~1e10 and x in [0, pi].
///
/// The product n*x can reach 3e10, where plain double evaluation loses six
/// decimal digits of phase. The product is formed exactly with an FMA split
/// and reduced against a double-double 2*pi, so the result is accurate to a
/// few ulp for every representable input.
inline double sin_of_multiple(std::int64_t n, double x) {
    const double nd = static_cast<double>(n);
    const double hi = nd * x;
    const double lo = std::fma(nd, x, -hi);
    const double cycles = std::nearbyint(hi / detail::kTwoPiHi);
    const double r = std::fma(-cycles, detail::kTwoPiHi, hi);
    const double correction = std::fma(-cycles, detail::kTwoPiLo, lo);
    return std::sin(r + correction);
}

/// sin(pi * k * num / den) by exact integer reduction mod 2*den.
///
/// Grid-structured arguments (nodes j*pi/K, the quarter-period points
/// m*pi/2) have an exact value determined by k*num mod 2*den; this evaluates
/// it without ever forming the huge floating-point phase. Requires den <= 1e6
/// so the intermediate product stays inside 64-bit range.
inline double sin_pi_rational(std::int64_t k, std::int64_t num, std::int64_t den) {
    if (den < 1 || den > 1000000 || num < 0 || num > den) {
        throw std::invalid_argument("sin_pi_rational: need 0 <= num <= den <= 1e6");
    }
    if (k < 0) {
        throw std::invalid_argument("sin_pi_rational: negative multiplier");
    }
    const std::int64_t two_den = 2 * den;
    std::int64_t r = ((k % two_den) * num) % two_den;
    double sign = 1.0;
    if (r >= den) {  // sin(pi + y) = -sin(y)
        r -= den;
        sign = -1.0;
    }
    if (r == 0) {
        return 0.0;
    }
    if (2 * r == den) {
        return sign;
    }
    // fold into [0, den/2] so symmetric nodes share one rounding
    if (2 * r > den) {
        r = den - r;
    }
    return sign * std::sin(kPi * static_cast<double>(r) / static_cast<double>(den));
}

}  // namespace upde
