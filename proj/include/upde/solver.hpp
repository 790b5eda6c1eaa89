#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "upde/numerics.hpp"
#include "upde/problem.hpp"
#include "upde/quadrature.hpp"
#include "upde/sine_basis.hpp"

namespace upde {

// ---------------------------------------------------------------------------
// The final-value solution per mode, written with the growth factor pulled
// out of the time integral:
//
//   D1:  e^{(T-t) n^2} ( psi_n(T+s-t) - I_n(t,s) )
//   D2:  e^{(T-s) n^2} ( phi_n(T+t-s) - I_n(t,s) )
//
//   I_n(t,s) = integral_tau^T e^{(tau-eta) n^2} f_n(T+t-eta, T+s-eta) d eta,
//   tau = max(t, s).
//
// The integrand exponent is <= 0 on [tau, T], so the kernel integral is
// always representable; blow-up lives entirely in the leading factor, which
// is tracked in log scale and flagged instead of silently overflowing.
// ---------------------------------------------------------------------------

/// One mode of a backward solution. When `overflowed` is set the value is
/// +-inf as a sentinel and `log_magnitude` carries the information;
/// otherwise |value| = exp(log_magnitude) up to rounding.
struct ModeEvaluation {
    std::int64_t n = 0;
    double value = 0.0;
    double log_magnitude = -std::numeric_limits<double>::infinity();
    bool overflowed = false;
};

/// Kernel integral I_n above. Empty interval (tau >= T) yields 0.
inline double exp_kernel_integral(std::int64_t n, double t, double s, double horizon,
                                  const SourceProfile& source, const QuadratureConfig& cfg = {}) {
    classify_domain(t, s, horizon);
    const double lambda = eigenvalue(n);
    const double tau = std::fmax(t, s);
    if (tau >= horizon || !source.has(n)) {
        return 0.0;
    }
    auto integrand = [&](double eta) {
        return exp_neg((eta - tau) * lambda) * source.eval(n, horizon + t - eta, horizon + s - eta);
    };
    return adaptive_simpson(integrand, tau, horizon, cfg);
}

namespace detail {

inline ModeEvaluation grow_mode(std::int64_t n, double growth_exponent, double bracket) {
    ModeEvaluation out;
    out.n = n;
    if (bracket == 0.0) {
        return out;  // log_magnitude stays -inf
    }
    out.log_magnitude = growth_exponent + std::log(std::fabs(bracket));
    if (out.log_magnitude > kOverflowLogThreshold) {
        out.overflowed = true;
        out.value = std::copysign(std::numeric_limits<double>::infinity(), bracket);
    } else if (growth_exponent <= kOverflowLogThreshold) {
        out.value = std::exp(growth_exponent) * bracket;
    } else {
        // growth alone overflows but the product does not
        out.value = std::copysign(std::exp(out.log_magnitude), bracket);
    }
    return out;
}

}  // namespace detail

/// Unregularized backward solution, factored form. Diagonal points use the
/// D1 branch; overflow is data, never an exception.
inline std::vector<ModeEvaluation> backward_solve_naive(const ProblemSpec& spec, double t, double s,
                                                        const QuadratureConfig& cfg = {}) {
    spec.validate();
    const TimeDomainPoint point = classify_domain(t, s, spec.horizon);
    const bool d1 = point.region != Region::D2;
    const double tau = d1 ? t : s;
    const DataProfile& data = d1 ? spec.psi : spec.phi;
    const double data_arg = d1 ? spec.horizon + s - t : spec.horizon + t - s;

    std::vector<ModeEvaluation> out;
    for (std::int64_t n : spec.active_modes()) {
        const double bracket =
            data.eval(n, data_arg) - exp_kernel_integral(n, t, s, spec.horizon, spec.source, cfg);
        out.push_back(detail::grow_mode(n, (spec.horizon - tau) * eigenvalue(n), bracket));
    }
    return out;
}

/// Same solution with the growth factor kept inside the time integral
/// (integrand e^{(T-eta) n^2} f_n). Algebraically identical; the integrand
/// itself can overflow for large modes, so this exists as a cross-check for
/// small n rather than a production path.
inline std::vector<ModeEvaluation> backward_solve_unfactored(const ProblemSpec& spec, double t,
                                                             double s,
                                                             const QuadratureConfig& cfg = {}) {
    spec.validate();
    const TimeDomainPoint point = classify_domain(t, s, spec.horizon);
    const bool d1 = point.region != Region::D2;
    const double tau = d1 ? t : s;
    const DataProfile& data = d1 ? spec.psi : spec.phi;
    const double data_arg = d1 ? spec.horizon + s - t : spec.horizon + t - s;
    const double horizon = spec.horizon;

    std::vector<ModeEvaluation> out;
    for (std::int64_t n : spec.active_modes()) {
        const double lambda = eigenvalue(n);
        double integral = 0.0;
        if (tau < horizon && spec.source.has(n)) {
            auto integrand = [&](double eta) {
                return std::exp((horizon - eta) * lambda) *
                       spec.source.eval(n, horizon + t - eta, horizon + s - eta);
            };
            integral = adaptive_simpson(integrand, tau, horizon, cfg);
        }
        const double value = std::exp((horizon - tau) * lambda) * data.eval(n, data_arg) - integral;
        ModeEvaluation eval;
        eval.n = n;
        eval.value = value;
        eval.log_magnitude = value == 0.0 ? -std::numeric_limits<double>::infinity()
                                          : std::log(std::fabs(value));
        eval.overflowed = !std::isfinite(value);
        out.push_back(eval);
    }
    return out;
}

/// Well-posed forward solution of the initial-edge problem
/// u_t + u_s - u_xx = f, u(x,t,0) = phi(x,t), u(x,0,s) = psi(x,s):
///
///   D1:  e^{-n^2 s} phi_n(t-s) + integral_0^s e^{-n^2 (s-eta)} f_n(t-s+eta, eta) d eta
///   D2:  e^{-n^2 t} psi_n(s-t) + integral_0^t e^{-n^2 (t-eta)} f_n(eta, s-t+eta) d eta
///
/// All exponents are <= 0; no overflow is possible.
inline SineSpectrum forward_solve(const ProblemSpec& initial_spec, double t, double s,
                                  const QuadratureConfig& cfg = {}) {
    initial_spec.validate();
    const TimeDomainPoint point = classify_domain(t, s, initial_spec.horizon);
    const bool d1 = point.region != Region::D2;
    const double depth = d1 ? s : t;  // distance to the data edge

    std::vector<SineMode> entries;
    for (std::int64_t n : initial_spec.active_modes()) {
        const double lambda = eigenvalue(n);
        const double data_term =
            exp_neg(depth * lambda) * (d1 ? initial_spec.phi.eval(n, t - s)
                                          : initial_spec.psi.eval(n, s - t));
        double integral = 0.0;
        if (depth > 0.0 && initial_spec.source.has(n)) {
            auto integrand = [&](double eta) {
                const double decay = exp_neg((depth - eta) * lambda);
                return d1 ? decay * initial_spec.source.eval(n, t - s + eta, eta)
                          : decay * initial_spec.source.eval(n, eta, s - t + eta);
            };
            integral = adaptive_simpson(integrand, 0.0, depth, cfg);
        }
        const double c = data_term + integral;
        if (c != 0.0) {
            entries.push_back({n, c});
        }
    }
    return SineSpectrum(std::move(entries));
}

// ---------------------------------------------------------------------------
// Norms over mode evaluations, in log scale so blow-up is measurable.
// ---------------------------------------------------------------------------

/// ln of the Parseval norm sqrt((pi/2) sum c_n^2), finite even when the
/// individual values overflow double range.
inline double log_l2_norm(const std::vector<ModeEvaluation>& evals) {
    std::vector<double> doubled;
    doubled.reserve(evals.size());
    for (const ModeEvaluation& e : evals) {
        doubled.push_back(2.0 * e.log_magnitude);
    }
    return 0.5 * (std::log(kPi / 2.0) + log_sum_exp(doubled));
}

/// Non-overflowed evaluations as a plain spectrum; throws if any mode is
/// flagged, since its coefficient would be meaningless.
inline SineSpectrum spectrum_from(const std::vector<ModeEvaluation>& evals) {
    std::vector<SineMode> entries;
    for (const ModeEvaluation& e : evals) {
        if (e.overflowed) {
            throw std::invalid_argument("spectrum_from: mode " + std::to_string(e.n) +
                                        " overflowed; use the log-scale accessors");
        }
        if (e.value != 0.0) {
            entries.push_back({e.n, e.value});
        }
    }
    return SineSpectrum(std::move(entries));
}

// ---------------------------------------------------------------------------
// Instability measurement. By linearity, the gap between the naive solution
// with perturbed data and with exact data equals the naive solution of the
// perturbation-only problem (data sin(mx)/m on both edges, zero source), so
// the norm is computed from that single-mode problem in log scale.
// ---------------------------------------------------------------------------

inline double illposedness_log_norm(std::int64_t m, double t, double s, double horizon = 1.0) {
    PerturbationSpec pert{m};
    pert.validate();
    ProblemSpec gap;
    gap.horizon = horizon;
    gap.n_max = std::max<std::int64_t>(m, 1);
    const double c = 1.0 / static_cast<double>(m);
    gap.phi.set(m, ConstForm{c});
    gap.psi.set(m, ConstForm{c});
    return log_l2_norm(backward_solve_naive(gap, t, s));
}

/// ||u_m - u|| at (t, s); +inf once the blow-up leaves double range (the log
/// variant stays finite).
inline double illposedness_norm(std::int64_t m, double t, double s, double horizon = 1.0) {
    const double log_norm = illposedness_log_norm(m, t, s, horizon);
    return log_norm > kOverflowLogThreshold ? std::numeric_limits<double>::infinity()
                                            : std::exp(log_norm);
}

}  // namespace upde
