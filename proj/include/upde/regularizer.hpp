#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "upde/numerics.hpp"
#include "upde/problem.hpp"
#include "upde/solver.hpp"

namespace upde {

// ---------------------------------------------------------------------------
// Stabilizing filter: the growth factor e^{(T-tau) n^2} of the backward
// solution is replaced by (eps + e^{-p n^2})^{(tau-T)/p}, which is bounded
// by eps^{(tau-T)/p} uniformly in n. Powers are evaluated in log scale so
// mode indices up to 1e10 cost nothing.
// ---------------------------------------------------------------------------

/// Filter exponent p and noise level eps, validated against the horizon:
/// p >= 1, p >= T (the inequality lemma needs 0 <= tau <= T <= p), eps > 0.
class RegularizationParams {
public:
    RegularizationParams(double p, double eps, double horizon) : p_(p), eps_(eps) {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("RegularizationParams: horizon must be > 0");
        }
        if (!(p >= 1.0)) {
            throw std::invalid_argument("RegularizationParams: p must be >= 1");
        }
        if (!(p >= horizon)) {
            throw std::invalid_argument("RegularizationParams: p must be >= the horizon T");
        }
        if (!(eps > 0.0)) {
            throw std::invalid_argument("RegularizationParams: eps must be > 0");
        }
    }

    double p() const { return p_; }
    double eps() const { return eps_; }

private:
    double p_;
    double eps_;
};

/// (eps + e^{-p n^2})^{(tau-T)/p}; tau is t on D1 and s on D2.
/// Equals 1 at tau = T and never exceeds eps^{(tau-T)/p}.
inline double filter_factor(std::int64_t n, double tau, double horizon,
                            const RegularizationParams& params) {
    if (n < 1) {
        throw std::invalid_argument("filter_factor: mode index must be >= 1");
    }
    if (!(tau >= 0.0 && tau <= horizon)) {
        throw std::invalid_argument("filter_factor: tau outside [0, T]");
    }
    const double damped = exp_neg(params.p() * eigenvalue(n));
    return pow_log(params.eps() + damped, (tau - horizon) / params.p());
}

/// Regularized solution: per mode, the backward bracket scaled by the filter
/// instead of the raw exponential. Bounded for every mode, so the result is
/// an ordinary spectrum. Diagonal points use the D1 branch.
inline SineSpectrum regularized_solve(const ProblemSpec& spec, const RegularizationParams& params,
                                      double t, double s, const QuadratureConfig& cfg = {}) {
    spec.validate();
    const TimeDomainPoint point = classify_domain(t, s, spec.horizon);
    const bool d1 = point.region != Region::D2;
    const double tau = d1 ? t : s;
    const DataProfile& data = d1 ? spec.psi : spec.phi;
    const double data_arg = d1 ? spec.horizon + s - t : spec.horizon + t - s;

    std::vector<SineMode> entries;
    for (std::int64_t n : spec.active_modes()) {
        const double bracket =
            data.eval(n, data_arg) - exp_kernel_integral(n, t, s, spec.horizon, spec.source, cfg);
        const double c = filter_factor(n, tau, spec.horizon, params) * bracket;
        if (c != 0.0) {
            entries.push_back({n, c});
        }
    }
    return SineSpectrum(std::move(entries));
}

/// Continuous-dependence bound: two data sets at L2 distance delta produce
/// regularized solutions no farther apart than eps^{(tau-T)/p} * delta.
inline double stability_bound(double delta, double tau, double horizon,
                              const RegularizationParams& params) {
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("stability_bound: delta must be >= 0");
    }
    if (!(tau >= 0.0 && tau <= horizon)) {
        throw std::invalid_argument("stability_bound: tau outside [0, T]");
    }
    return pow_log(params.eps(), (tau - horizon) / params.p()) * delta;
}

// ---------------------------------------------------------------------------
// A-priori smoothness constants: exponentially weighted spectral energy of
// the exact solution, the ingredient of the convergence estimate. The sup is
// taken over a discrete (t, s) grid and refined by doubling, so it is a
// lower estimate of the true sup.
// ---------------------------------------------------------------------------

/// Raised when the weighted energy of some mode exceeds double range, i.e.
/// the filter exponent p outruns the solution's spectral decay.
class UnboundedEnergyError : public std::runtime_error {
public:
    UnboundedEnergyError(std::int64_t mode, double log_term)
        : std::runtime_error("smoothness constant is unbounded: mode " + std::to_string(mode) +
                             " contributes log-term " + std::to_string(log_term)),
          mode_index(mode),
          log_contribution(log_term) {}

    std::int64_t mode_index;
    double log_contribution;
};

struct ErrorBudget {
    double c1 = 0.0;  // sup over the D1 triangle
    double c2 = 0.0;  // sup over the D2 triangle
};

namespace detail {

inline double weighted_energy(const SineSpectrum& spectrum, double tau, double horizon, double p) {
    double sum = 0.0;
    for (const SineMode& e : spectrum.entries()) {
        // stored coefficients are 2/pi-normalized; the estimate uses the
        // plain-integral normalization u_n = (pi/2) c_n
        const double u_n = 0.5 * kPi * e.c;
        if (u_n == 0.0) {
            continue;
        }
        const double log_term = 2.0 * (p + tau - horizon) * eigenvalue(e.n) +
                                2.0 * std::log(std::fabs(u_n));
        if (log_term > kOverflowLogThreshold) {
            throw UnboundedEnergyError(e.n, log_term);
        }
        sum += std::exp(log_term);
    }
    return sum;
}

}  // namespace detail

/// Estimate the smoothness constants of an exact solution given as a
/// spectrum-valued function of (t, s). The time grid starts at
/// `initial_subdivisions` per axis and doubles until both sups move by less
/// than 0.1%.
inline ErrorBudget smoothness_constants(
    const std::function<SineSpectrum(double, double)>& exact_solution, double horizon, double p,
    int initial_subdivisions = 16, int max_subdivisions = 4096) {
    if (!(horizon > 0.0) || !(p >= horizon)) {
        throw std::invalid_argument("smoothness_constants: need horizon > 0 and p >= horizon");
    }
    if (initial_subdivisions < 1) {
        throw std::invalid_argument("smoothness_constants: grid must have >= 1 subdivision");
    }

    ErrorBudget previous;
    bool have_previous = false;
    for (int m = initial_subdivisions; m <= max_subdivisions; m *= 2) {
        ErrorBudget budget;
        const double step = horizon / static_cast<double>(m);
        for (int i = 0; i <= m; ++i) {
            const double t = static_cast<double>(i) * step;
            for (int j = 0; j <= m; ++j) {
                const double s = static_cast<double>(j) * step;
                const SineSpectrum spectrum = exact_solution(t, s);
                if (j <= i) {  // (t,s) in D1
                    budget.c1 = std::fmax(
                        budget.c1, 0.5 * kPi * detail::weighted_energy(spectrum, t, horizon, p));
                }
                if (i <= j) {  // (t,s) in D2
                    budget.c2 = std::fmax(
                        budget.c2, 0.5 * kPi * detail::weighted_energy(spectrum, s, horizon, p));
                }
            }
        }
        if (have_previous) {
            const double move1 = std::fabs(budget.c1 - previous.c1);
            const double move2 = std::fabs(budget.c2 - previous.c2);
            if (move1 <= 1e-3 * std::fmax(budget.c1, 1e-300) &&
                move2 <= 1e-3 * std::fmax(budget.c2, 1e-300)) {
                return budget;
            }
        }
        previous = budget;
        have_previous = true;
    }
    return previous;
}

/// Convergence estimate (1 + sqrt(C)) * eps^{(tau - T + p)/p}, with C picked
/// by the region the point lives in (diagonal resolves to D1).
inline double error_bound(const ErrorBudget& budget, double tau, double horizon,
                          const RegularizationParams& params, Region region) {
    if (!(budget.c1 >= 0.0) || !(budget.c2 >= 0.0)) {
        throw std::invalid_argument("error_bound: budget constants must be finite and >= 0");
    }
    if (!(tau >= 0.0 && tau <= horizon)) {
        throw std::invalid_argument("error_bound: tau outside [0, T]");
    }
    const double c = region == Region::D2 ? budget.c2 : budget.c1;
    const double rate = (tau - horizon + params.p()) / params.p();
    return (1.0 + std::sqrt(c)) * pow_log(params.eps(), rate);
}

/// Bound profile along D1 as a function of t (and D2 of s).
inline std::function<double(double)> bound_on_d1(const ErrorBudget& budget, double horizon,
                                                 const RegularizationParams& params) {
    return [budget, horizon, params](double t) {
        return error_bound(budget, t, horizon, params, Region::D1);
    };
}

inline std::function<double(double)> bound_on_d2(const ErrorBudget& budget, double horizon,
                                                 const RegularizationParams& params) {
    return [budget, horizon, params](double s) {
        return error_bound(budget, s, horizon, params, Region::D2);
    };
}

// ---------------------------------------------------------------------------
// The two elementary inequalities behind the estimates, as checkable
// predicates (log-scale evaluation, rounding slack 1e-12).
// ---------------------------------------------------------------------------

/// (eps + e^{-n^2 p})^{(t-T)/p} <= eps^{(t-T)/p} on 0 <= t <= T <= p.
inline bool lemma5_holds(double eps, std::int64_t n, double t, double horizon, double p) {
    if (!(eps > 0.0) || n < 1 || !(t >= 0.0 && t <= horizon && horizon <= p)) {
        throw std::invalid_argument("lemma5_holds: hypothesis domain is 0 <= t <= T <= p, eps > 0");
    }
    const double exponent = (t - horizon) / p;
    const double lhs_log = exponent * std::log(eps + exp_neg(p * eigenvalue(n)));
    const double rhs_log = exponent * std::log(eps);
    return lhs_log <= rhs_log + 1e-12;
}

/// 1 - (x+1)^{-alpha} <= x^{1-alpha} for x > 0, 0 < alpha < 1.
inline bool lemma6_holds(double x, double alpha) {
    if (!(x > 0.0) || !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("lemma6_holds: need x > 0 and 0 < alpha < 1");
    }
    const double lhs = 1.0 - pow_log(x + 1.0, -alpha);
    const double rhs = pow_log(x, 1.0 - alpha);
    return lhs <= rhs + 1e-12;
}

}  // namespace upde
