#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace upde {

/// Controls the successive-refinement Simpson integrator.
struct QuadratureConfig {
    std::size_t initial_subdivisions = 16;
    std::size_t max_refinements = 16;  // interval cap 16 * 2^16 = 2^20
    double relative_tolerance = 1e-10;

    void validate() const {
        if (initial_subdivisions < 1 || max_refinements < 1) {
            throw std::invalid_argument("QuadratureConfig: limits must be >= 1");
        }
        if (!(relative_tolerance > 0.0)) {
            throw std::invalid_argument("QuadratureConfig: tolerance must be > 0");
        }
    }
};

/// Raised when refinement hits its interval cap; carries the last two
/// estimates so callers can report the achieved accuracy.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double last, double previous)
        : std::runtime_error(
              "quadrature did not converge: last estimate " + std::to_string(last) +
              ", previous " + std::to_string(previous)),
          last_estimate(last),
          previous_estimate(previous) {}

    double last_estimate;
    double previous_estimate;
};

/// Composite Simpson with interval doubling until two successive estimates
/// agree to cfg.relative_tolerance. Trapezoid sums are refined in place so
/// every integrand evaluation is reused; Simpson values come out of the
/// standard (4 T_h - T_2h)/3 combination.
template <typename Fn>
double adaptive_simpson(Fn&& f, double lower, double upper, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (!(lower <= upper)) {
        throw std::invalid_argument("adaptive_simpson: lower > upper");
    }
    if (lower == upper) {
        return 0.0;
    }
    const double width = upper - lower;

    std::size_t intervals = cfg.initial_subdivisions;
    double endpoint_sum = 0.5 * (f(lower) + f(upper));
    double interior_sum = 0.0;
    for (std::size_t j = 1; j < intervals; ++j) {
        interior_sum += f(lower + width * static_cast<double>(j) / static_cast<double>(intervals));
    }
    double trapezoid = (endpoint_sum + interior_sum) * width / static_cast<double>(intervals);

    double simpson_prev = 0.0;
    double simpson_last = 0.0;
    bool have_prev = false;
    for (std::size_t level = 0; level <= cfg.max_refinements; ++level) {
        // refine: evaluate only the new midpoints
        const std::size_t doubled = intervals * 2;
        double midpoint_sum = 0.0;
        for (std::size_t j = 1; j < doubled; j += 2) {
            midpoint_sum += f(lower + width * static_cast<double>(j) / static_cast<double>(doubled));
        }
        const double trapezoid_fine =
            0.5 * trapezoid + midpoint_sum * width / static_cast<double>(doubled);
        const double simpson = (4.0 * trapezoid_fine - trapezoid) / 3.0;

        if (have_prev) {
            const double scale = std::fmax(std::fabs(simpson), std::fabs(simpson_last));
            if (scale == 0.0 || std::fabs(simpson - simpson_last) <= cfg.relative_tolerance * scale) {
                return simpson;
            }
        }
        simpson_prev = simpson_last;
        simpson_last = simpson;
        have_prev = true;
        trapezoid = trapezoid_fine;
        intervals = doubled;
    }
    throw QuadratureError(simpson_last, simpson_prev);
}

}  // namespace upde
