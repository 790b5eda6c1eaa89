#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace upde {

// ---------------------------------------------------------------------------
// Closed-form tags. Data profiles (one time argument) and source profiles
// (two time arguments) are stored per mode as one of a small set of symbolic
// forms -- which keeps problem files serializable -- or as sampled grids, or
// as opaque callables for in-memory use.
// ---------------------------------------------------------------------------

struct ConstForm {
    double value = 0.0;
};

/// scale * exp(rate * tau + offset)
struct ExpForm {
    double scale = 1.0;
    double rate = 0.0;
    double offset = 0.0;
};

/// scale * exp(rate_t * t + rate_s * s + offset)
struct ExpForm2 {
    double scale = 1.0;
    double rate_t = 0.0;
    double rate_s = 0.0;
    double offset = 0.0;
};

namespace detail {

// Piecewise cubic Lagrange interpolation on a uniform grid: O(h^4) on smooth
// data, exact at the nodes. Stencils are clamped at the boundaries.
inline double cubic_interpolate(const std::vector<double>& values, double step, double tau) {
    const std::size_t count = values.size();
    const std::size_t last = count - 1;
    double u = tau / step;
    auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
    cell = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(cell, static_cast<std::ptrdiff_t>(last) - 1));
    std::ptrdiff_t base = cell - 1;
    base = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(base, static_cast<std::ptrdiff_t>(last) - 3));
    const double local = u - static_cast<double>(base);
    double result = 0.0;
    for (int i = 0; i < 4; ++i) {
        double weight = 1.0;
        for (int j = 0; j < 4; ++j) {
            if (j != i) {
                weight *= (local - static_cast<double>(j)) / static_cast<double>(i - j);
            }
        }
        result += weight * values[static_cast<std::size_t>(base) + static_cast<std::size_t>(i)];
    }
    return result;
}

inline void check_time(double tau, double horizon, const char* what) {
    // a couple of ulp of slack for grid arithmetic at the endpoints
    const double slack = 16.0 * 1e-16 * (1.0 + horizon);
    if (!(tau >= -slack && tau <= horizon + slack)) {
        throw std::invalid_argument(std::string(what) + ": time argument outside [0, horizon]");
    }
}

}  // namespace detail

/// Samples on the uniform time grid 0, h, ..., horizon with cubic
/// interpolation between nodes.
class SampledSeries {
public:
    SampledSeries(double horizon, std::vector<double> values)
        : horizon_(horizon), values_(std::move(values)) {
        if (!(horizon_ > 0.0)) {
            throw std::invalid_argument("SampledSeries: horizon must be > 0");
        }
        if (values_.size() < 4) {
            throw std::invalid_argument("SampledSeries: need at least 4 samples");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("SampledSeries: non-finite sample");
            }
        }
    }

    double horizon() const { return horizon_; }
    double spacing() const { return horizon_ / static_cast<double>(values_.size() - 1); }
    const std::vector<double>& values() const { return values_; }

    double eval(double tau) const {
        detail::check_time(tau, horizon_, "SampledSeries");
        return detail::cubic_interpolate(values_, spacing(), std::fmin(std::fmax(tau, 0.0), horizon_));
    }

private:
    double horizon_;
    std::vector<double> values_;
};

/// Samples on the uniform lattice [0, horizon]^2, row-major in t, with
/// tensor-product cubic interpolation.
class SampledField {
public:
    SampledField(double horizon, std::size_t nodes_per_axis, std::vector<double> values)
        : horizon_(horizon), nodes_(nodes_per_axis), values_(std::move(values)) {
        if (!(horizon_ > 0.0)) {
            throw std::invalid_argument("SampledField: horizon must be > 0");
        }
        if (nodes_ < 4) {
            throw std::invalid_argument("SampledField: need at least 4 nodes per axis");
        }
        if (values_.size() != nodes_ * nodes_) {
            throw std::invalid_argument("SampledField: expected " + std::to_string(nodes_ * nodes_) +
                                        " lattice values");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("SampledField: non-finite sample");
            }
        }
    }

    double horizon() const { return horizon_; }
    std::size_t nodes_per_axis() const { return nodes_; }
    double spacing() const { return horizon_ / static_cast<double>(nodes_ - 1); }
    const std::vector<double>& values() const { return values_; }

    double eval(double t, double s) const {
        detail::check_time(t, horizon_, "SampledField");
        detail::check_time(s, horizon_, "SampledField");
        const double tc = std::fmin(std::fmax(t, 0.0), horizon_);
        const double sc = std::fmin(std::fmax(s, 0.0), horizon_);
        // interpolate along s within each needed t-row, then across t
        const double step = spacing();
        double u = tc / step;
        auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
        const auto last = static_cast<std::ptrdiff_t>(nodes_) - 1;
        cell = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(cell, last - 1));
        std::ptrdiff_t base = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(cell - 1, last - 3));
        std::vector<double> row_values(4);
        std::vector<double> column(nodes_);
        for (int i = 0; i < 4; ++i) {
            const std::size_t row = static_cast<std::size_t>(base) + static_cast<std::size_t>(i);
            for (std::size_t j = 0; j < nodes_; ++j) {
                column[j] = values_[row * nodes_ + j];
            }
            row_values[static_cast<std::size_t>(i)] = detail::cubic_interpolate(column, step, sc);
        }
        const double local = u - static_cast<double>(base);
        double result = 0.0;
        for (int i = 0; i < 4; ++i) {
            double weight = 1.0;
            for (int j = 0; j < 4; ++j) {
                if (j != i) {
                    weight *= (local - static_cast<double>(j)) / static_cast<double>(i - j);
                }
            }
            result += weight * row_values[static_cast<std::size_t>(i)];
        }
        return result;
    }

private:
    double horizon_;
    std::size_t nodes_;
    std::vector<double> values_;
};

using DataForm = std::variant<ConstForm, ExpForm, SampledSeries, std::function<double(double)>>;
using SourceForm =
    std::variant<ConstForm, ExpForm2, SampledField, std::function<double(double, double)>>;

/// Per-mode coefficient functions of one time variable (phi_n, psi_n).
/// Unlisted modes are identically zero. Value semantics: copy, then mutate
/// through set(); share freely once configured.
class DataProfile {
public:
    DataProfile& set(std::int64_t n, DataForm form) {
        require_mode(n);
        entries_[n] = std::move(form);
        return *this;
    }

    bool has(std::int64_t n) const { return entries_.count(n) != 0; }

    double eval(std::int64_t n, double tau) const {
        auto it = entries_.find(n);
        if (it == entries_.end()) {
            return 0.0;
        }
        const DataForm& form = it->second;
        if (const auto* c = std::get_if<ConstForm>(&form)) {
            return c->value;
        }
        if (const auto* e = std::get_if<ExpForm>(&form)) {
            return e->scale * std::exp(e->rate * tau + e->offset);
        }
        if (const auto* s = std::get_if<SampledSeries>(&form)) {
            return s->eval(tau);
        }
        return std::get<std::function<double(double)>>(form)(tau);
    }

    std::vector<std::int64_t> modes() const {
        std::vector<std::int64_t> out;
        out.reserve(entries_.size());
        for (const auto& [n, form] : entries_) {
            out.push_back(n);
        }
        return out;
    }

    const std::map<std::int64_t, DataForm>& entries() const { return entries_; }

    /// Copy with constant c added to mode n (stacks on any existing form).
    DataProfile with_added_constant(std::int64_t n, double c) const {
        DataProfile out = *this;
        auto it = out.entries_.find(n);
        if (it == out.entries_.end()) {
            out.entries_[n] = ConstForm{c};
            return out;
        }
        DataForm& form = it->second;
        if (auto* k = std::get_if<ConstForm>(&form)) {
            k->value += c;
        } else if (auto* s = std::get_if<SampledSeries>(&form)) {
            std::vector<double> shifted = s->values();
            for (double& v : shifted) {
                v += c;
            }
            form = SampledSeries(s->horizon(), std::move(shifted));
        } else if (const auto* e = std::get_if<ExpForm>(&form)) {
            const ExpForm base = *e;
            form = std::function<double(double)>(
                [base, c](double tau) { return base.scale * std::exp(base.rate * tau + base.offset) + c; });
        } else {
            auto base = std::get<std::function<double(double)>>(form);
            form = std::function<double(double)>([base, c](double tau) { return base(tau) + c; });
        }
        return out;
    }

private:
    static void require_mode(std::int64_t n) {
        if (n < 1) {
            throw std::invalid_argument("DataProfile: mode index must be >= 1");
        }
    }

    std::map<std::int64_t, DataForm> entries_;
};

/// Per-mode source coefficient functions f_n(t, s).
class SourceProfile {
public:
    SourceProfile& set(std::int64_t n, SourceForm form) {
        if (n < 1) {
            throw std::invalid_argument("SourceProfile: mode index must be >= 1");
        }
        entries_[n] = std::move(form);
        return *this;
    }

    bool has(std::int64_t n) const { return entries_.count(n) != 0; }

    double eval(std::int64_t n, double t, double s) const {
        auto it = entries_.find(n);
        if (it == entries_.end()) {
            return 0.0;
        }
        const SourceForm& form = it->second;
        if (const auto* c = std::get_if<ConstForm>(&form)) {
            return c->value;
        }
        if (const auto* e = std::get_if<ExpForm2>(&form)) {
            return e->scale * std::exp(e->rate_t * t + e->rate_s * s + e->offset);
        }
        if (const auto* f = std::get_if<SampledField>(&form)) {
            return f->eval(t, s);
        }
        return std::get<std::function<double(double, double)>>(form)(t, s);
    }

    std::vector<std::int64_t> modes() const {
        std::vector<std::int64_t> out;
        out.reserve(entries_.size());
        for (const auto& [n, form] : entries_) {
            out.push_back(n);
        }
        return out;
    }

    const std::map<std::int64_t, SourceForm>& entries() const { return entries_; }

private:
    std::map<std::int64_t, SourceForm> entries_;
};

}  // namespace upde
