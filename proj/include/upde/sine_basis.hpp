#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "upde/numerics.hpp"

namespace upde {

/// Coefficients with magnitude below this are dropped from transform output,
/// keeping sparse spectra (the interesting problems have two active modes).
inline constexpr double kCoefficientDropTolerance = 1e-14;

/// One retained term c * sin(n x). Mode indices are 64-bit: perturbation
/// indices up to 1e10 appear as ordinary sparse entries.
struct SineMode {
    std::int64_t n = 0;
    double c = 0.0;
};

/// Sparse Fourier-sine representation of a function on [0, pi].
/// Entries are strictly increasing in n with finite coefficients; the empty
/// spectrum is the zero function. Immutable after construction.
class SineSpectrum {
public:
    SineSpectrum() = default;

    explicit SineSpectrum(std::vector<SineMode> entries) : entries_(std::move(entries)) {
        std::int64_t previous = 0;
        for (const SineMode& e : entries_) {
            if (e.n < 1) {
                throw std::invalid_argument("SineSpectrum: mode indices must be >= 1");
            }
            if (e.n <= previous) {
                throw std::invalid_argument("SineSpectrum: mode indices must be strictly increasing");
            }
            if (!std::isfinite(e.c)) {
                throw std::invalid_argument("SineSpectrum: coefficient for mode " +
                                            std::to_string(e.n) + " is not finite");
            }
            previous = e.n;
        }
    }

    static SineSpectrum single(std::int64_t n, double c) {
        return SineSpectrum(std::vector<SineMode>{{n, c}});
    }

    /// Dense convenience constructor: coefficients[i] belongs to mode i+1.
    /// Entries below the drop tolerance are omitted, so the result is the
    /// usual sparse form.
    static SineSpectrum from_dense(std::span<const double> coefficients) {
        std::vector<SineMode> entries;
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            if (std::fabs(coefficients[i]) >= kCoefficientDropTolerance) {
                entries.push_back({static_cast<std::int64_t>(i) + 1, coefficients[i]});
            }
        }
        return SineSpectrum(std::move(entries));
    }

    const std::vector<SineMode>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    /// Coefficient of mode n; absent modes are zero.
    double coefficient(std::int64_t n) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const SineMode& e, std::int64_t key) { return e.n < key; });
        return (it != entries_.end() && it->n == n) ? it->c : 0.0;
    }

private:
    std::vector<SineMode> entries_;
};

/// a*x + b*y as spectra; exact zeros produced by cancellation are dropped.
inline SineSpectrum combine(double a, const SineSpectrum& x, double b, const SineSpectrum& y) {
    std::vector<SineMode> out;
    out.reserve(x.size() + y.size());
    auto ix = x.entries().begin();
    auto iy = y.entries().begin();
    while (ix != x.entries().end() || iy != y.entries().end()) {
        SineMode m;
        if (iy == y.entries().end() || (ix != x.entries().end() && ix->n < iy->n)) {
            m = {ix->n, a * ix->c};
            ++ix;
        } else if (ix == x.entries().end() || iy->n < ix->n) {
            m = {iy->n, b * iy->c};
            ++iy;
        } else {
            m = {ix->n, a * ix->c + b * iy->c};
            ++ix;
            ++iy;
        }
        if (m.c != 0.0) {
            out.push_back(m);
        }
    }
    return SineSpectrum(std::move(out));
}

inline SineSpectrum scaled(const SineSpectrum& x, double a) {
    return combine(a, x, 0.0, SineSpectrum{});
}

inline SineSpectrum difference(const SineSpectrum& x, const SineSpectrum& y) {
    return combine(1.0, x, -1.0, y);
}

/// Dirichlet-Laplacian eigenvalue n^2 on (0, pi).
///
/// Returned as double: beyond n ~ 9.5e7 the square is no longer an exact
/// integer, which is irrelevant because e^{-p n^2} has underflowed to zero
/// long before the rounding matters.
inline double eigenvalue(std::int64_t n) {
    if (n < 1) {
        throw std::invalid_argument("eigenvalue: mode index must be >= 1");
    }
    const double nd = static_cast<double>(n);
    return nd * nd;
}

/// Parseval norm sqrt((pi/2) * sum c_n^2).
inline double l2_norm(const SineSpectrum& spectrum) {
    double sum = 0.0;
    for (const SineMode& e : spectrum.entries()) {
        sum += e.c * e.c;
    }
    return std::sqrt(0.5 * kPi * sum);
}

/// Uniform grid x_j = j pi / K on [0, pi].
///
/// K must be even (>= 2): the composite Simpson weights of the forward
/// transform require an even interval count, so odd K is rejected here at
/// the single entry point. Endpoint nodes are exactly 0 and pi.
///
/// The grid carries a sine table indexed by (n*j) mod 2K, which evaluates
/// sin(n x_j) exactly for arbitrarily large n -- the table's symmetries make
/// sin(m x_j) for m = 1e10 an integer lookup instead of a meaningless
/// floating-point reduction.
class SpaceGrid {
public:
    explicit SpaceGrid(int subdivisions) : k_(subdivisions) {
        if (k_ < 2 || k_ % 2 != 0) {
            throw std::invalid_argument("SpaceGrid: node count parameter K must be even and >= 2");
        }
        sin_table_.resize(static_cast<std::size_t>(2 * k_));
        for (int r = 0; r <= k_ / 2; ++r) {
            sin_table_[static_cast<std::size_t>(r)] = sin_pi_rational(1, r, k_);
        }
        for (int r = k_ / 2 + 1; r < k_; ++r) {
            sin_table_[static_cast<std::size_t>(r)] = sin_table_[static_cast<std::size_t>(k_ - r)];
        }
        for (int r = k_; r < 2 * k_; ++r) {
            sin_table_[static_cast<std::size_t>(r)] = -sin_table_[static_cast<std::size_t>(r - k_)];
        }
    }

    int subdivisions() const { return k_; }
    std::size_t node_count() const { return static_cast<std::size_t>(k_) + 1; }
    double spacing() const { return kPi / static_cast<double>(k_); }

    double node(int j) const {
        if (j < 0 || j > k_) {
            throw std::invalid_argument("SpaceGrid::node: index out of range");
        }
        if (j == 0) {
            return 0.0;
        }
        if (j == k_) {
            return kPi;
        }
        return static_cast<double>(j) * kPi / static_cast<double>(k_);
    }

    std::vector<double> nodes() const {
        std::vector<double> xs(node_count());
        for (int j = 0; j <= k_; ++j) {
            xs[static_cast<std::size_t>(j)] = node(j);
        }
        return xs;
    }

    /// Exact sin(n x_j) via the reduction (n*j) mod 2K.
    double sine_at(std::int64_t n, int j) const {
        if (n < 1 || j < 0 || j > k_) {
            throw std::invalid_argument("SpaceGrid::sine_at: argument out of range");
        }
        const std::int64_t two_k = 2 * static_cast<std::int64_t>(k_);
        const std::int64_t r = ((n % two_k) * static_cast<std::int64_t>(j)) % two_k;
        return sin_table_[static_cast<std::size_t>(r)];
    }

    /// Synthesize the spectrum on the grid nodes (exact sines).
    std::vector<double> sample(const SineSpectrum& spectrum) const {
        std::vector<double> values(node_count(), 0.0);
        for (const SineMode& e : spectrum.entries()) {
            for (int j = 1; j < k_; ++j) {
                values[static_cast<std::size_t>(j)] += e.c * sine_at(e.n, j);
            }
        }
        return values;
    }

private:
    int k_;
    std::vector<double> sin_table_;
};

/// Forward transform: c_n = (2/pi) * Simpson(samples * sin(n x)) for
/// n = 1..n_max, dropping magnitudes below kCoefficientDropTolerance.
///
/// Composite Simpson on the uniform grid integrates products of modes
/// exactly while n + k < K, so band-limited samples with n_max <= K/2 are
/// recovered to machine precision; general smooth samples see the usual
/// O(K^-4) quadrature error. n_max >= K is rejected as aliasing.
inline SineSpectrum sine_coefficients(std::span<const double> samples, const SpaceGrid& grid,
                                      std::int64_t n_max) {
    const int k = grid.subdivisions();
    if (samples.size() != grid.node_count()) {
        throw std::invalid_argument("sine_coefficients: expected " +
                                    std::to_string(grid.node_count()) + " samples, got " +
                                    std::to_string(samples.size()));
    }
    if (n_max < 1) {
        throw std::invalid_argument("sine_coefficients: n_max must be >= 1");
    }
    if (n_max >= k) {
        throw std::invalid_argument("sine_coefficients: n_max = " + std::to_string(n_max) +
                                    " aliases on a K = " + std::to_string(k) + " grid");
    }
    double scale = 1.0;
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("sine_coefficients: samples contain a non-finite value");
        }
        scale = std::fmax(scale, std::fabs(v));
    }
    // Dirichlet data must vanish at both walls (rounding-level slack only).
    if (std::fabs(samples.front()) > 1e-12 * scale || std::fabs(samples.back()) > 1e-12 * scale) {
        throw std::invalid_argument(
            "sine_coefficients: samples violate the Dirichlet boundary (nonzero at x=0 or x=pi)");
    }

    const double h = grid.spacing();
    std::vector<SineMode> entries;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double sum = 0.0;
        for (int j = 1; j < k; ++j) {
            const double weight = (j % 2 == 1) ? 4.0 : 2.0;  // endpoints excluded: samples are 0
            sum += weight * samples[static_cast<std::size_t>(j)] * grid.sine_at(n, j);
        }
        const double integral = sum * h / 3.0;
        const double c = integral * 2.0 / kPi;
        if (std::fabs(c) >= kCoefficientDropTolerance) {
            entries.push_back({n, c});
        }
    }
    return SineSpectrum(std::move(entries));
}

/// Evaluate sum c_n sin(n x) at one point of [0, pi].
inline double evaluate_series_at(const SineSpectrum& spectrum, double x) {
    if (!(x >= 0.0 && x <= kPi)) {
        throw std::invalid_argument("evaluate_series: point outside [0, pi]");
    }
    double value = 0.0;
    for (const SineMode& e : spectrum.entries()) {
        value += e.c * sin_of_multiple(e.n, x);
    }
    return value;
}

inline std::vector<double> evaluate_series(const SineSpectrum& spectrum,
                                           std::span<const double> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (double x : points) {
        out.push_back(evaluate_series_at(spectrum, x));
    }
    return out;
}

}  // namespace upde
