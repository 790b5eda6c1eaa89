#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "upde/experiments.hpp"

using upde::ExperimentRow;
using upde::GridConfig;
using upde::PerturbationSpec;
using upde::RegularizationParams;
using upde::SineSpectrum;
using upde::SpaceGrid;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("closed-form oracle values") {
    CHECK(upde::closed_form_regularized(upde::kPi / 2.0, 0.0, 0.0, 10000000000LL, 10.0) ==
          doctest::Approx(0.99999972394).epsilon(1e-9));
    CHECK(upde::closed_form_regularized(upde::kPi / 2.0, 0.125, 0.125, 100, 10.0) ==
          doctest::Approx(0.420159558549).epsilon(1e-9));
    CHECK(upde::closed_form_regularized(0.0, 0.33, 0.7, 5, 10.0) == 0.0);
    CHECK_THROWS_AS(upde::closed_form_regularized(-0.5, 0.1, 0.1, 2, 10.0),
                    std::invalid_argument);

    // node evaluation agrees with the generic path for modest m
    const SpaceGrid grid(100);
    for (int j : {0, 17, 50, 83, 100}) {
        CHECK(upde::closed_form_regularized_at_node(grid, j, 0.4, 0.15, 7, 10.0) ==
              doctest::Approx(upde::closed_form_regularized(grid.node(j), 0.4, 0.15, 7, 10.0))
                  .epsilon(1e-12));
    }

    // long double route over both branches
    for (double t : {0.0, 0.3, 0.75}) {
        for (double s : {0.1, 0.5, 1.0}) {
            const double sx1 = upde::sin_of_multiple(1, 1.1);
            const double sxm = upde::sin_of_multiple(9, 1.1);
            const double reference =
                static_cast<double>(oracle::closed_form(sx1, sxm, t, s, 9, 10.0L));
            CHECK(upde::closed_form_regularized(1.1, t, s, 9, 10.0) ==
                  doctest::Approx(reference).epsilon(1e-12));
        }
    }
}

TEST_CASE("table rows carry the reference cells") {
    const GridConfig grid{100, 80, 10.0};
    const auto rows = upde::run_table1(grid, {100, 10000000000LL});
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].label == "m=1e2");
    CHECK(rows[5].label == "m=1e10");
    CHECK(rows[0].x == doctest::Approx(upde::kPi / 2.0));

    // row (pi/2, 0.5, 0.5) for m = 1e2
    CHECK(rows[1].t == 0.5);
    CHECK(std::fabs(rows[1].exact - 0.2231301601) <= 1e-6);
    CHECK(std::fabs(rows[1].approx - 0.1684339068) <= 1e-6);
    CHECK(std::fabs(rows[1].abs_error - 0.0546962533) <= 1e-6);

    // rows (pi/2, 0.75, 0.75) and (pi/2, 0, 0) for m = 1e10
    CHECK(std::fabs(rows[5].abs_error - 7.4e-9) <= 1e-6);
    CHECK(std::fabs(rows[9].approx - 0.9999997239) <= 1e-6);
    CHECK(std::fabs(rows[9].abs_error - 2.761e-7) <= 1e-6);

    for (const auto& row : rows) {
        CHECK(row.abs_error == std::fabs(row.exact - row.approx));
        CHECK(row.t == row.s);
    }
}

TEST_CASE("supplementary abscissa rows are labeled and consistent") {
    const GridConfig grid{100, 80, 10.0};
    const auto rows = upde::run_table1(grid, {100}, true);
    REQUIRE(rows.size() == 10);
    bool saw_supplementary = false;
    for (const auto& row : rows) {
        if (row.label.find("supplementary") != std::string::npos) {
            saw_supplementary = true;
            CHECK(row.x == doctest::Approx(upde::kPi / 3.0));
            // perturbation mode is visible off the midpoint: approx includes
            // a sin(m pi/3) term, still finite and consistent
            CHECK(row.abs_error == std::fabs(row.exact - row.approx));
        }
    }
    CHECK(saw_supplementary);
}

TEST_CASE("pipeline against the closed form on grid nodes") {
    const upde::ProblemSpec base = upde::paper_example();
    const SpaceGrid grid(100);
    const std::int64_t m = 100;
    const PerturbationSpec pert{m};
    const RegularizationParams params(10.0, upde::noise_level(pert), base.horizon);
    const upde::ProblemSpec noisy = upde::perturb(base, pert);
    for (double t : {0.0, 0.5, 0.9}) {
        for (double s : {0.0, 0.45, 1.0}) {
            const SineSpectrum v = upde::regularized_solve(noisy, params, t, s);
            const auto values = grid.sample(v);
            for (int j = 0; j <= grid.subdivisions(); j += 10) {
                const double reference =
                    upde::closed_form_regularized_at_node(grid, j, t, s, m, 10.0);
                CHECK(std::fabs(values[static_cast<std::size_t>(j)] - reference) <= 1e-9);
            }
        }
    }
}

TEST_CASE("divergence data") {
    const auto result = upde::run_divergence({1, 2, 3, 40});
    REQUIRE(result.entries.size() == 4);
    CHECK(result.entries[0].norm == doctest::Approx(2.06636567706125).epsilon(1e-9));
    CHECK(result.entries[1].norm == doctest::Approx(4.63040423510355).epsilon(1e-9));
    CHECK(result.entries[1].log_norm == doctest::Approx(1.53264417208478).epsilon(1e-12));
    CHECK(result.entries[2].norm == doctest::Approx(37.6065810865099).epsilon(1e-9));
    CHECK(std::isinf(result.entries[3].norm));
    CHECK(result.entries[3].log_norm == doctest::Approx(796.536911898531).epsilon(1e-9));

    bool saw_exact = false;
    bool saw_m2 = false;
    for (const auto& pt : result.profiles) {
        saw_exact = saw_exact || pt.label == "exact";
        saw_m2 = saw_m2 || pt.label == "m=2";
        CHECK(pt.label != "m=40");  // profile beyond double range is skipped
    }
    CHECK(saw_exact);
    CHECK(saw_m2);
}

TEST_CASE("convergence sweep hits the theoretical rates") {
    const std::vector<std::int64_t> ms{100, 10000, 1000000, 100000000};
    const auto origin = upde::run_convergence_sweep(10.0, ms, 0.0, 0.0);
    CHECK(origin.slope == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(origin.residual <= 1e-9);

    const auto corner = upde::run_convergence_sweep(10.0, ms, 1.0, 1.0);
    CHECK(corner.slope == doctest::Approx(1.0).epsilon(1e-9));

    // p = T: the filter exponent collapses and the propagated error freezes
    const auto flat = upde::run_convergence_sweep(1.0, ms, 0.0, 0.0);
    CHECK(std::fabs(flat.slope) <= 1e-6);

    // total error alongside: dominated by the smoothing bias, so it decays
    // strictly slower than the propagated part at the origin
    for (std::size_t i = 0; i < origin.rows.size(); ++i) {
        CHECK(origin.rows[i].total_error > origin.rows[i].propagated_error);
    }

    CHECK_THROWS_AS(upde::run_convergence_sweep(10.0, {100}, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("csv emission format") {
    const std::string path = "emit_test.csv";
    upde::emit_csv({}, path);
    CHECK(slurp(path) == "x,t,s,exact,approx,abs_error,label\n");

    ExperimentRow row;
    row.x = upde::kPi / 2.0;
    row.t = 0.5;
    row.s = 0.5;
    row.exact = 0.2231301601484298;
    row.approx = 0.1684339068094538;
    row.abs_error = row.exact - row.approx;
    row.label = "m=1e2";
    upde::emit_csv({row}, path);
    const std::string text = slurp(path);
    CHECK(text ==
          "x,t,s,exact,approx,abs_error,label\n"
          "1.570796327,0.5,0.5,0.2231301601,0.1684339068,0.05469625334,m=1e2\n");
    std::remove(path.c_str());
}

TEST_CASE("table output is deterministic and matches the checked-in reference") {
    const GridConfig grid{100, 80, 10.0};
    const auto rows = upde::run_table1(grid, {100});
    const std::string once = "table_once.csv";
    const std::string twice = "table_twice.csv";
    upde::emit_csv(rows, once);
    upde::emit_csv(rows, twice);
    CHECK(slurp(once) == slurp(twice));

    const std::string golden = slurp(std::string(UPDE_TEST_DATA_DIR) + "/table1_m100.csv");
    CHECK(slurp(once) == golden);
    std::remove(once.c_str());
    std::remove(twice.c_str());
}

TEST_CASE("full two-index table agrees with the reference numerically") {
    // the m=1e10 abs_error cells form by cancellation of near-equal values,
    // so the reference comparison is numeric rather than byte-wise there
    const GridConfig grid{100, 80, 10.0};
    const auto rows = upde::run_table1(grid, {100, 10000000000LL});
    std::ifstream golden(std::string(UPDE_TEST_DATA_DIR) + "/table1_full.csv");
    REQUIRE(golden);
    std::string line;
    REQUIRE(std::getline(golden, line));  // header
    std::size_t index = 0;
    while (std::getline(golden, line)) {
        REQUIRE(index < rows.size());
        std::istringstream fields(line);
        std::string cell;
        double expected[6];
        for (double& value : expected) {
            REQUIRE(std::getline(fields, cell, ','));
            value = std::stod(cell);
        }
        REQUIRE(std::getline(fields, cell, ','));
        const auto& row = rows[index];
        CHECK(row.label == cell);
        CHECK(std::fabs(row.x - expected[0]) <= 1e-9);
        CHECK(row.t == expected[1]);
        CHECK(row.s == expected[2]);
        CHECK(std::fabs(row.exact - expected[3]) <= 1e-9);
        CHECK(std::fabs(row.approx - expected[4]) <= 1e-9);
        CHECK(std::fabs(row.abs_error - expected[5]) <= 1e-9);
        ++index;
    }
    CHECK(index == rows.size());
}

TEST_CASE("labels") {
    CHECK(upde::label_for_m(100) == "m=1e2");
    CHECK(upde::label_for_m(10000000000LL) == "m=1e10");
    CHECK(upde::label_for_m(37) == "m=37");
    CHECK(upde::label_for_m(2) == "m=2");
    CHECK(upde::label_for_m(500) == "m=500");
}
