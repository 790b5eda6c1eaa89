#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "upde/numerics.hpp"
#include "upde/quadrature.hpp"

using upde::QuadratureConfig;
using upde::QuadratureError;
using upde::adaptive_simpson;

TEST_CASE("smooth integrands converge to closed forms") {
    const double i1 = adaptive_simpson([](double x) { return std::exp(2.0 * x); }, 0.0, 1.0);
    CHECK(i1 == doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-12));

    const double i2 = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, upde::kPi);
    CHECK(i2 == doctest::Approx(2.0).epsilon(1e-12));

    // product of exponentials, the shape the kernel integrals take
    const double i3 = adaptive_simpson(
        [](double eta) { return std::exp(-eta) * std::exp(-3.0 * (1.0 - eta)); }, 0.0, 1.0);
    CHECK(i3 == doctest::Approx(std::exp(-3.0) * (std::exp(2.0) - 1.0) / 2.0).epsilon(1e-12));

    // fixed-resolution long double rule as an independent cross-check
    const long double reference = oracle::simpson_reference(
        [](long double x) { return std::exp(-2.0L * x) * std::cos(x); }, 0.0L, 1.0L, 1 << 14);
    const double adaptive = adaptive_simpson(
        [](double x) { return std::exp(-2.0 * x) * std::cos(x); }, 0.0, 1.0);
    CHECK(adaptive == doctest::Approx(static_cast<double>(reference)).epsilon(1e-11));
}

TEST_CASE("degenerate intervals and zero integrands") {
    CHECK(adaptive_simpson([](double) { return 4.2; }, 0.3, 0.3) == 0.0);
    CHECK(adaptive_simpson([](double) { return 0.0; }, 0.0, 1.0) == 0.0);
}

TEST_CASE("invalid configuration and reversed bounds are rejected") {
    QuadratureConfig bad;
    bad.relative_tolerance = 0.0;
    CHECK_THROWS_AS(adaptive_simpson([](double) { return 1.0; }, 0.0, 1.0, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(adaptive_simpson([](double) { return 1.0; }, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("refinement cap reports the last two estimates") {
    QuadratureConfig tight;
    tight.initial_subdivisions = 2;
    tight.max_refinements = 2;
    tight.relative_tolerance = 1e-16;
    try {
        adaptive_simpson([](double x) { return std::sqrt(std::fabs(x - 0.3141)); }, 0.0, 1.0,
                         tight);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& err) {
        CHECK(std::isfinite(err.last_estimate));
        CHECK(std::isfinite(err.previous_estimate));
        CHECK(err.last_estimate != err.previous_estimate);
    }
}
