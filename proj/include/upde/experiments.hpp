#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "upde/numerics.hpp"
#include "upde/problem.hpp"
#include "upde/regularizer.hpp"
#include "upde/sine_basis.hpp"
#include "upde/solver.hpp"

namespace upde {

// ---------------------------------------------------------------------------
// Experiment harness for the worked data set: comparison table, blow-up
// demonstration, convergence-rate sweep, CSV emission. Everything is
// deterministic; rows are computed independently and written in order.
// ---------------------------------------------------------------------------

struct ExperimentRow {
    double x = 0.0;
    double t = 0.0;
    double s = 0.0;
    double exact = 0.0;
    double approx = 0.0;
    double abs_error = 0.0;
    std::string label;
};

struct GridConfig {
    int K = 100;     // space subdivisions (even)
    int M = 80;      // time subdivisions per axis
    double p = 10.0; // filter exponent

    void validate() const {
        if (K < 2 || K % 2 != 0) {
            throw std::invalid_argument("GridConfig: K must be even and >= 2");
        }
        if (M < 1) {
            throw std::invalid_argument("GridConfig: M must be >= 1");
        }
        if (!(p >= 1.0)) {
            throw std::invalid_argument("GridConfig: p must be >= 1");
        }
    }
};

/// "m=1e2" for round powers of ten, "m=37" otherwise.
inline std::string label_for_m(std::int64_t m) {
    if (m >= 100) {
        std::int64_t power = 0;
        std::int64_t value = m;
        while (value % 10 == 0) {
            value /= 10;
            ++power;
        }
        if (value == 1) {
            return "m=1e" + std::to_string(power);
        }
    }
    return "m=" + std::to_string(m);
}

/// 10 significant digits, shortest form ("%.10g"); round-trips the values
/// the harness produces.
inline std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

// ---------------------------------------------------------------------------
// Closed-form regularized solution of the worked example (horizon T = 1):
//
//   D1: (sqrt(pi/2)/m + e^{-p})^{(t-1)/p} e^{-1-t-s} sin x
//         + (sqrt(pi/2)/m + e^{-p m^2})^{(t-1)/p} sin(mx)/m
//   D2: same with (s-1)/p and e^{-1-2t}.
//
// This is the independent oracle the spectral pipeline is verified against.
// ---------------------------------------------------------------------------

namespace detail {

struct ClosedFormTerms {
    double mode1 = 0.0;  // coefficient of sin(x)
    double modem = 0.0;  // coefficient of sin(mx)
};

inline ClosedFormTerms closed_form_coefficients(double t, double s, std::int64_t m, double p) {
    if (m < 1 || !(p >= 1.0)) {
        throw std::invalid_argument("closed_form_regularized: need m >= 1 and p >= 1");
    }
    const TimeDomainPoint point = classify_domain(t, s, 1.0);
    const bool d1 = point.region != Region::D2;
    const double tau = d1 ? t : s;
    const double eps = std::sqrt(kPi / 2.0) / static_cast<double>(m);
    ClosedFormTerms terms;
    const double smooth = d1 ? std::exp(-1.0 - t - s) : std::exp(-1.0 - 2.0 * t);
    terms.mode1 = pow_log(eps + exp_neg(p), (tau - 1.0) / p) * smooth;
    terms.modem = pow_log(eps + exp_neg(p * eigenvalue(m)), (tau - 1.0) / p) /
                  static_cast<double>(m);
    return terms;
}

}  // namespace detail

/// Oracle at an arbitrary point of [0, pi]. For m beyond ~1e8 the sin(mx)
/// phase of a raw double x is only defined to ~1e-15 absolute; prefer the
/// grid-node overload, which reduces the phase exactly, when x has the
/// structure j*pi/K.
inline double closed_form_regularized(double x, double t, double s, std::int64_t m, double p) {
    if (!(x >= 0.0 && x <= kPi)) {
        throw std::invalid_argument("closed_form_regularized: x outside [0, pi]");
    }
    const auto terms = detail::closed_form_coefficients(t, s, m, p);
    return terms.mode1 * sin_of_multiple(1, x) + terms.modem * sin_of_multiple(m, x);
}

/// Oracle at grid node x_j (exact quarter-period reduction of sin(m x_j)).
inline double closed_form_regularized_at_node(const SpaceGrid& grid, int j, double t, double s,
                                              std::int64_t m, double p) {
    const auto terms = detail::closed_form_coefficients(t, s, m, p);
    return terms.mode1 * grid.sine_at(1, j) + terms.modem * grid.sine_at(m, j);
}

// ---------------------------------------------------------------------------
// Comparison table: points (pi/2, tau, tau) for tau in {0.75, 0.5, 0.25,
// 0.125, 0}, exact value against the regularized pipeline with
// eps = sqrt(pi/2)/m. Optional supplementary rows at x = pi/3, where the
// perturbation mode is visible (no reference claim attaches to them).
// ---------------------------------------------------------------------------

inline std::vector<ExperimentRow> run_table1(const GridConfig& grid,
                                             const std::vector<std::int64_t>& m_values,
                                             bool supplementary_x = false,
                                             const QuadratureConfig& quad = {1024, 12, 1e-12}) {
    grid.validate();
    const ProblemSpec base = paper_example();
    const double horizon = base.horizon;
    static constexpr double kTableTimes[] = {0.75, 0.5, 0.25, 0.125, 0.0};

    std::vector<ExperimentRow> rows;
    for (std::int64_t m : m_values) {
        const PerturbationSpec pert{m};
        const ProblemSpec noisy = perturb(base, pert);
        const RegularizationParams params(grid.p, noise_level(pert), horizon);
        const std::string label = label_for_m(m);
        for (double tau : kTableTimes) {
            const SineSpectrum v = regularized_solve(noisy, params, tau, tau, quad);

            auto push = [&](double x, std::int64_t den, const std::string& row_label) {
                double exact = std::exp(-3.0 * tau) * sin_pi_rational(1, 1, den);
                double approx = 0.0;
                for (const SineMode& e : v.entries()) {
                    approx += e.c * sin_pi_rational(e.n, 1, den);
                }
                rows.push_back({x, tau, tau, exact, approx, std::fabs(exact - approx), row_label});
            };

            push(kPi / 2.0, 2, label);
            if (supplementary_x) {
                push(kPi / 3.0, 3, label + " x=pi/3 supplementary");
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Blow-up demonstration: log of ||u_m - u|| at (1/2, 1/2) per m, plus the
// spatial profiles of the perturbed naive solutions for plotting.
// ---------------------------------------------------------------------------

struct DivergenceEntry {
    std::int64_t m = 0;
    double log_norm = 0.0;
    double norm = 0.0;  // +inf once past double range
};

struct ProfilePoint {
    double x = 0.0;
    double value = 0.0;
    std::string label;
};

struct DivergenceResult {
    std::vector<DivergenceEntry> entries;
    std::vector<ProfilePoint> profiles;
};

inline DivergenceResult run_divergence(const std::vector<std::int64_t>& m_values,
                                       const GridConfig& grid = {}) {
    grid.validate();
    const double t = 0.5;
    const double s = 0.5;
    const ProblemSpec base = paper_example();
    const SpaceGrid space(grid.K);

    DivergenceResult result;
    const SineSpectrum exact = SineSpectrum::single(1, std::exp(-2.0 * t - s));
    const std::vector<double> exact_values = space.sample(exact);
    for (std::size_t j = 0; j < space.node_count(); ++j) {
        result.profiles.push_back({space.node(static_cast<int>(j)), exact_values[j], "exact"});
    }

    for (std::int64_t m : m_values) {
        DivergenceEntry entry;
        entry.m = m;
        entry.log_norm = illposedness_log_norm(m, t, s, base.horizon);
        entry.norm = entry.log_norm > kOverflowLogThreshold
                         ? std::numeric_limits<double>::infinity()
                         : std::exp(entry.log_norm);
        result.entries.push_back(entry);

        const auto evals = backward_solve_naive(perturb(base, PerturbationSpec{m}), t, s);
        bool representable = true;
        for (const ModeEvaluation& e : evals) {
            representable = representable && !e.overflowed;
        }
        if (!representable) {
            continue;  // profile off double range; the log norm already reports it
        }
        const std::vector<double> values = space.sample(spectrum_from(evals));
        const std::string label = label_for_m(m);
        for (std::size_t j = 0; j < space.node_count(); ++j) {
            result.profiles.push_back({space.node(static_cast<int>(j)), values[j], label});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Convergence-rate sweep. For each m the data error is eps = sqrt(pi/2)/m;
// the measured quantity regressed against eps is the propagated data error
//
//     || v_eps(perturbed) - v_eps(exact data) ||,
//
// the component of the total error that the theory pins to the exact rate
// eps^{(tau-T+p)/p}. The distance of the regularized solution from the true
// solution is reported alongside per row: its decay mixes in the
// data-independent smoothing bias, which for this data set sits in its
// pre-asymptotic knee across any practical range of m.
// ---------------------------------------------------------------------------

struct SweepRow {
    std::int64_t m = 0;
    double eps = 0.0;
    double propagated_error = 0.0;
    double total_error = 0.0;
};

struct SweepResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS residual of the log-log fit
    std::vector<SweepRow> rows;
};

inline SweepResult run_convergence_sweep(double p, const std::vector<std::int64_t>& m_values,
                                         double t, double s,
                                         const QuadratureConfig& quad = {}) {
    const ProblemSpec base = paper_example();
    classify_domain(t, s, base.horizon);

    SweepResult result;
    std::vector<double> log_eps;
    std::vector<double> log_err;
    for (std::int64_t m : m_values) {
        const PerturbationSpec pert{m};
        const double eps = noise_level(pert);
        const RegularizationParams params(p, eps, base.horizon);
        const SineSpectrum with_noise = regularized_solve(perturb(base, pert), params, t, s, quad);
        const SineSpectrum with_exact = regularized_solve(base, params, t, s, quad);
        const SineSpectrum truth = SineSpectrum::single(1, std::exp(-2.0 * t - s));

        SweepRow row;
        row.m = m;
        row.eps = eps;
        row.propagated_error = l2_norm(difference(with_noise, with_exact));
        row.total_error = l2_norm(difference(with_noise, truth));
        result.rows.push_back(row);
        if (row.propagated_error > 0.0) {
            log_eps.push_back(std::log(eps));
            log_err.push_back(std::log(row.propagated_error));
        }
    }

    // least squares on (log eps, log err)
    const std::size_t count = log_eps.size();
    double distinct = 0.0;
    for (std::size_t i = 1; i < count; ++i) {
        distinct = std::fmax(distinct, std::fabs(log_eps[i] - log_eps[0]));
    }
    if (count < 2 || distinct == 0.0) {
        throw std::invalid_argument("run_convergence_sweep: need at least 2 distinct eps values");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        mean_x += log_eps[i];
        mean_y += log_err[i];
    }
    mean_x /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sxx += (log_eps[i] - mean_x) * (log_eps[i] - mean_x);
        sxy += (log_eps[i] - mean_x) * (log_err[i] - mean_y);
    }
    result.slope = sxy / sxx;
    result.intercept = mean_y - result.slope * mean_x;
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double predicted = result.intercept + result.slope * log_eps[i];
        ss += (log_err[i] - predicted) * (log_err[i] - predicted);
    }
    result.residual = std::sqrt(ss / static_cast<double>(count));
    return result;
}

// ---------------------------------------------------------------------------
// CSV emission. Deterministic: identical inputs give byte-identical files.
// ---------------------------------------------------------------------------

inline void emit_csv(const std::vector<ExperimentRow>& rows, const std::string& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_csv: cannot open '" + destination + "' for writing");
    }
    out << "x,t,s,exact,approx,abs_error,label\n";
    for (const ExperimentRow& row : rows) {
        out << format_value(row.x) << ',' << format_value(row.t) << ',' << format_value(row.s)
            << ',' << format_value(row.exact) << ',' << format_value(row.approx) << ','
            << format_value(row.abs_error) << ',' << row.label << '\n';
    }
    if (!out) {
        throw std::runtime_error("emit_csv: write failure on '" + destination + "'");
    }
}

inline void emit_divergence_csv(const DivergenceResult& result, const std::string& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_divergence_csv: cannot open '" + destination + "'");
    }
    out << "m,log_norm,norm\n";
    for (const DivergenceEntry& e : result.entries) {
        out << e.m << ',' << format_value(e.log_norm) << ',' << format_value(e.norm) << '\n';
    }
    if (!out) {
        throw std::runtime_error("emit_divergence_csv: write failure on '" + destination + "'");
    }
}

inline void emit_profiles_csv(const DivergenceResult& result, const std::string& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_profiles_csv: cannot open '" + destination + "'");
    }
    out << "x,value,label\n";
    for (const ProfilePoint& pt : result.profiles) {
        out << format_value(pt.x) << ',' << format_value(pt.value) << ',' << pt.label << '\n';
    }
    if (!out) {
        throw std::runtime_error("emit_profiles_csv: write failure on '" + destination + "'");
    }
}

inline void emit_sweep_csv(const SweepResult& result, const std::string& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_sweep_csv: cannot open '" + destination + "'");
    }
    out << "m,eps,propagated_error,total_error\n";
    for (const SweepRow& row : result.rows) {
        out << row.m << ',' << format_value(row.eps) << ',' << format_value(row.propagated_error)
            << ',' << format_value(row.total_error) << '\n';
    }
    if (!out) {
        throw std::runtime_error("emit_sweep_csv: write failure on '" + destination + "'");
    }
}

}  // namespace upde
