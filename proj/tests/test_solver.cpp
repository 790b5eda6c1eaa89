#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "upde/solver.hpp"

using upde::ConstForm;
using upde::ExpForm;
using upde::ExpForm2;
using upde::PerturbationSpec;
using upde::ProblemSpec;
using upde::QuadratureConfig;

namespace {

// forward problem whose solution is e^{-2t-s} sin x (same source as the
// final-value example, data read off the initial edges)
ProblemSpec forward_example() {
    ProblemSpec spec;
    spec.horizon = 1.0;
    spec.n_max = 8;
    spec.phi.set(1, ExpForm{1.0, -2.0, 0.0});   // u(x,t,0) = e^{-2t} sin x
    spec.psi.set(1, ExpForm{1.0, -1.0, 0.0});   // u(x,0,s) = e^{-s} sin x
    spec.source.set(1, ExpForm2{-2.0, -2.0, -1.0, 0.0});
    return spec;
}

}  // namespace

TEST_CASE("kernel integral of the worked example") {
    const ProblemSpec spec = upde::paper_example();
    const double at_origin = upde::exp_kernel_integral(1, 0.0, 0.0, spec.horizon, spec.source);
    CHECK(at_origin == doctest::Approx(-0.318092372803578).epsilon(1e-10));

    for (double t : {0.0, 0.25, 0.6, 1.0}) {
        for (double s : {0.0, 0.4, 0.9}) {
            const double value = upde::exp_kernel_integral(1, t, s, spec.horizon, spec.source);
            const double expected = static_cast<double>(oracle::kernel_integral_closed(t, s));
            CHECK(value == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("kernel integral trivial cases") {
    const ProblemSpec spec = upde::paper_example();
    CHECK(upde::exp_kernel_integral(1, 1.0, 0.5, spec.horizon, spec.source) == 0.0);  // tau = T
    ProblemSpec silent = spec;
    silent.source = upde::SourceProfile{};
    CHECK(upde::exp_kernel_integral(1, 0.2, 0.1, silent.horizon, silent.source) == 0.0);
    CHECK_THROWS_AS(upde::exp_kernel_integral(1, -0.1, 0.0, spec.horizon, spec.source),
                    std::invalid_argument);
}

TEST_CASE("naive backward solution reproduces the exact data set") {
    const ProblemSpec spec = upde::paper_example();
    const auto evals = upde::backward_solve_naive(spec, 0.5, 0.5);
    REQUIRE(evals.size() == 1);
    CHECK(evals[0].n == 1);
    CHECK_FALSE(evals[0].overflowed);
    CHECK(evals[0].value == doctest::Approx(0.22313016014843).epsilon(1e-10));

    // whole grid: coefficient is e^{-2t-s} everywhere
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            const double t = i / 8.0;
            const double s = j / 8.0;
            const auto at = upde::backward_solve_naive(spec, t, s);
            REQUIRE(at.size() == 1);
            const double expected = static_cast<double>(oracle::exact_solution(1.0L, t, s));
            CHECK(std::fabs(at[0].value - expected) <= 1e-8);
        }
    }

    ProblemSpec zero;
    zero.phi.set(1, ConstForm{0.0});
    zero.psi.set(1, ConstForm{0.0});
    const auto silent = upde::backward_solve_naive(zero, 0.25, 0.5);
    for (const auto& e : silent) {
        CHECK(e.value == 0.0);
        CHECK_FALSE(e.overflowed);
    }
}

TEST_CASE("perturbed modes blow up with tracked magnitude") {
    const ProblemSpec base = upde::paper_example();

    const auto m3 = upde::backward_solve_naive(upde::perturb(base, PerturbationSpec{3}), 0.0, 0.0);
    REQUIRE(m3.size() == 2);
    CHECK(m3[1].n == 3);
    CHECK_FALSE(m3[1].overflowed);
    CHECK(m3[1].log_magnitude == doctest::Approx(7.90138771133189).epsilon(1e-12));
    CHECK(m3[1].value == doctest::Approx(2701.02797585846).epsilon(1e-10));

    const auto m40 = upde::backward_solve_naive(upde::perturb(base, PerturbationSpec{40}), 0.0, 0.0);
    REQUIRE(m40.size() == 2);
    CHECK(m40[1].n == 40);
    CHECK(m40[1].overflowed);
    CHECK(std::isinf(m40[1].value));
    CHECK(m40[1].log_magnitude ==
          doctest::Approx(1600.0 - std::log(40.0)).epsilon(1e-12));
    CHECK_THROWS_AS(upde::spectrum_from(m40), std::invalid_argument);
}

TEST_CASE("factored and unfactored kernel associations agree") {
    const ProblemSpec spec = upde::paper_example();
    QuadratureConfig tight;
    tight.initial_subdivisions = 32;
    tight.relative_tolerance = 1e-14;
    for (double t : {0.0, 0.3, 0.7}) {
        for (double s : {0.1, 0.5, 1.0}) {
            const auto factored = upde::backward_solve_naive(spec, t, s, tight);
            const auto direct = upde::backward_solve_unfactored(spec, t, s, tight);
            REQUIRE(factored.size() == direct.size());
            for (std::size_t i = 0; i < factored.size(); ++i) {
                CHECK_FALSE(factored[i].overflowed);
                CHECK(factored[i].value ==
                      doctest::Approx(direct[i].value).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("diagonal convention agrees with the mirrored branch") {
    // compatible two-mode data set; swapping phi and psi turns the D1
    // evaluation at t = s into the D2 formula
    ProblemSpec spec = upde::paper_example();
    spec.phi.set(2, ConstForm{0.75});
    spec.psi.set(2, ConstForm{0.75});
    ProblemSpec swapped = spec;
    std::swap(swapped.phi, swapped.psi);
    for (double tau : {0.0, 0.25, 0.5, 1.0}) {
        const auto d1 = upde::backward_solve_naive(spec, tau, tau);
        const auto d2 = upde::backward_solve_naive(swapped, tau, tau);
        REQUIRE(d1.size() == d2.size());
        for (std::size_t i = 0; i < d1.size(); ++i) {
            CHECK(std::fabs(d1[i].value - d2[i].value) <= 1e-8 * (1.0 + std::fabs(d1[i].value)));
        }
    }
}

TEST_CASE("forward solution of separable data") {
    ProblemSpec spec;
    spec.horizon = 1.0;
    spec.phi.set(1, ExpForm{1.0, -1.0, 0.0});  // u(x,t,0) = e^{-t} sin x
    spec.psi.set(1, ConstForm{1.0});           // u(x,0,s) = sin x
    for (double t : {0.0, 0.25, 0.6, 1.0}) {
        for (double s : {0.0, 0.5, 1.0}) {
            const auto u = upde::forward_solve(spec, t, s);
            CHECK(std::fabs(u.coefficient(1) - std::exp(-t)) <= 1e-8);
        }
    }

    ProblemSpec zero;
    CHECK(upde::forward_solve(zero, 0.5, 0.5).empty());

    // second pure mode: e^{-4 s} sin(2x) from phi_2 = 1
    ProblemSpec mode2;
    mode2.phi.set(2, ConstForm{1.0});
    mode2.psi.set(2, ExpForm{1.0, -4.0, 0.0});
    const auto at = upde::forward_solve(mode2, 0.5, 0.25);
    CHECK(at.coefficient(2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("forward solution with source matches the closed form and the PDE") {
    const ProblemSpec spec = forward_example();
    for (double t : {0.1, 0.45, 0.8}) {
        for (double s : {0.05, 0.45, 0.95}) {
            const auto u = upde::forward_solve(spec, t, s);
            CHECK(std::fabs(u.coefficient(1) - std::exp(-2.0 * t - s)) <= 1e-8);
        }
    }

    // finite-difference residual of the reconstructed field
    auto field = [&spec](double x, double t, double s) {
        return upde::evaluate_series_at(upde::forward_solve(spec, t, s), x);
    };
    auto source = [&spec](double x, double t, double s) {
        return spec.source.eval(1, t, s) * std::sin(x);
    };
    const double h = 1e-4;
    for (double x : {0.8, 1.9}) {
        for (double t : {0.3, 0.6}) {
            CHECK(std::fabs(oracle::pde_residual(field, source, x, t, 0.4, h)) <= 1e-5);
        }
    }
}

TEST_CASE("forward solve scales exactly with the data") {
    const ProblemSpec spec = forward_example();
    ProblemSpec doubled = spec;
    doubled.phi.set(1, ExpForm{2.0, -2.0, 0.0});
    doubled.psi.set(1, ExpForm{2.0, -1.0, 0.0});
    doubled.source.set(1, ExpForm2{-4.0, -2.0, -1.0, 0.0});
    for (double t : {0.2, 0.7}) {
        for (double s : {0.3, 0.9}) {
            const auto base = upde::forward_solve(spec, t, s);
            const auto twice = upde::forward_solve(doubled, t, s);
            CHECK(twice.coefficient(1) == 2.0 * base.coefficient(1));
        }
    }
}

TEST_CASE("sampled source lattices drive the kernel integral") {
    const ProblemSpec analytic = upde::paper_example();
    ProblemSpec sampled = analytic;
    const std::size_t nodes = 81;
    std::vector<double> lattice(nodes * nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            const double t = static_cast<double>(i) / 80.0;
            const double s = static_cast<double>(j) / 80.0;
            lattice[i * nodes + j] = analytic.source.eval(1, t, s);
        }
    }
    sampled.source.set(1, upde::SampledField(1.0, nodes, lattice));
    for (double t : {0.0, 0.3, 0.7}) {
        for (double s : {0.1, 0.55}) {
            const auto reference = upde::backward_solve_naive(analytic, t, s);
            const auto through_samples = upde::backward_solve_naive(sampled, t, s);
            REQUIRE(through_samples.size() == reference.size());
            CHECK(std::fabs(through_samples[0].value - reference[0].value) <= 1e-6);
        }
    }
}

TEST_CASE("instability norm against the closed form") {
    CHECK(upde::illposedness_norm(1, 0.5, 0.5) ==
          doctest::Approx(2.06636567706125).epsilon(1e-9));
    CHECK(upde::illposedness_norm(2, 0.5, 0.5) ==
          doctest::Approx(4.63040423510355).epsilon(1e-9));
    CHECK(upde::illposedness_norm(3, 0.5, 0.5) ==
          doctest::Approx(37.6065810865099).epsilon(1e-9));

    // log-scale path stays finite far past double range
    CHECK(upde::illposedness_log_norm(20, 0.5, 0.5) ==
          doctest::Approx(197.230059079091).epsilon(1e-12));
    CHECK(upde::illposedness_log_norm(40, 0.5, 0.5) ==
          doctest::Approx(796.536911898531).epsilon(1e-12));
    CHECK(std::isinf(upde::illposedness_norm(40, 0.5, 0.5)));
    for (std::int64_t m : {1, 2, 3, 20, 40}) {
        CHECK(upde::illposedness_log_norm(m, 0.5, 0.5) ==
              doctest::Approx(static_cast<double>(oracle::illposedness_log_norm(m)))
                  .epsilon(1e-12));
    }

    // strictly increasing and unbounded
    double previous = 0.0;
    for (std::int64_t m = 1; m <= 8; ++m) {
        const double norm = upde::illposedness_norm(m, 0.5, 0.5);
        CHECK(norm > previous);
        previous = norm;
    }
    CHECK(previous > 1e12);
}

TEST_CASE("log norm machinery matches plain Parseval when finite") {
    std::vector<upde::ModeEvaluation> evals;
    auto push = [&evals](std::int64_t n, double value) {
        upde::ModeEvaluation e;
        e.n = n;
        e.value = value;
        e.log_magnitude = std::log(std::fabs(value));
        evals.push_back(e);
    };
    push(1, 0.3);
    push(4, -1.7);
    push(9, 2.2);
    const double direct = upde::l2_norm(
        upde::SineSpectrum({{1, 0.3}, {4, -1.7}, {9, 2.2}}));
    CHECK(std::exp(upde::log_l2_norm(evals)) == doctest::Approx(direct).epsilon(1e-12));
}
