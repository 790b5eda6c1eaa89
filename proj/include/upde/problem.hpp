#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "upde/sine_basis.hpp"
#include "upde/time_profile.hpp"

namespace upde {

// ---------------------------------------------------------------------------
// Time-square geometry. D1 is the triangle s <= t, D2 the triangle t <= s;
// the shared diagonal is a valid member of both closed sets and is resolved
// to the D1 evaluation branch by convention.
// ---------------------------------------------------------------------------

enum class Region { D1, D2, Diagonal };

struct TimeDomainPoint {
    double t = 0.0;
    double s = 0.0;
    Region region = Region::Diagonal;
};

inline TimeDomainPoint classify_domain(double t, double s, double horizon) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("classify_domain: horizon must be > 0");
    }
    if (!(t >= 0.0 && t <= horizon) || !(s >= 0.0 && s <= horizon)) {
        throw std::invalid_argument("classify_domain: point outside [0, T]^2");
    }
    Region region = Region::Diagonal;
    if (s < t) {
        region = Region::D1;
    } else if (t < s) {
        region = Region::D2;
    }
    return {t, s, region};
}

// ---------------------------------------------------------------------------
// Problem instance: u_t + u_s - u_xx = f on [0,pi] x [0,T]^2 with Dirichlet
// walls, final data u(x,T,s) = psi(x,s) and u(x,t,T) = phi(x,t), all stored
// mode-wise in the sine basis.
// ---------------------------------------------------------------------------

struct ProblemSpec {
    double horizon = 1.0;
    DataProfile phi;    // u(x, t, T), per-mode function of t
    DataProfile psi;    // u(x, T, s), per-mode function of s
    SourceProfile source;
    std::int64_t n_max = 32;

    void validate() const {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("ProblemSpec: horizon must be > 0");
        }
        if (n_max < 1) {
            throw std::invalid_argument("ProblemSpec: n_max must be >= 1");
        }
    }

    /// Modes carrying data or source terms, ascending.
    std::vector<std::int64_t> active_modes() const {
        std::set<std::int64_t> all;
        for (std::int64_t n : phi.modes()) all.insert(n);
        for (std::int64_t n : psi.modes()) all.insert(n);
        for (std::int64_t n : source.modes()) all.insert(n);
        return {all.begin(), all.end()};
    }
};

/// The worked data set: phi = e^{-2t-1} sin x, psi = e^{-2-s} sin x,
/// f = -2 e^{-2t-s} sin x on [0,pi] x [0,1]^2, whose solution is
/// u = e^{-2t-s} sin x.
inline ProblemSpec paper_example() {
    ProblemSpec spec;
    spec.horizon = 1.0;
    spec.n_max = 16;
    spec.phi.set(1, ExpForm{1.0, -2.0, -1.0});
    spec.psi.set(1, ExpForm{1.0, -1.0, -2.0});
    spec.source.set(1, ExpForm2{-2.0, -2.0, -1.0, 0.0});
    return spec;
}

// ---------------------------------------------------------------------------
// Compatibility: the corner values phi(T) and psi(T) must agree mode-wise
// for the final-value problem to be solvable. Failure is a report.
// ---------------------------------------------------------------------------

struct CompatibilityViolation {
    std::int64_t n = 0;
    double residual = 0.0;
};

struct CompatibilityReport {
    bool passed = true;
    double max_residual = 0.0;
    std::vector<CompatibilityViolation> violations;
};

/// Default tolerance: representation error of the profiles. Analytic forms
/// get 1e-9; sampled forms get 10 * dt^4 from the coarsest series involved.
inline double default_compatibility_tolerance(const ProblemSpec& spec) {
    double tol = 1e-9;
    auto widen = [&tol](double step) { tol = std::fmax(tol, 10.0 * step * step * step * step); };
    for (const auto& [n, form] : spec.phi.entries()) {
        if (const auto* s = std::get_if<SampledSeries>(&form)) widen(s->spacing());
    }
    for (const auto& [n, form] : spec.psi.entries()) {
        if (const auto* s = std::get_if<SampledSeries>(&form)) widen(s->spacing());
    }
    return tol;
}

inline CompatibilityReport compatibility_check(const ProblemSpec& spec, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("compatibility_check: tolerance must be > 0");
    }
    spec.validate();
    CompatibilityReport report;
    std::set<std::int64_t> modes;
    for (std::int64_t n : spec.phi.modes()) modes.insert(n);
    for (std::int64_t n : spec.psi.modes()) modes.insert(n);
    for (std::int64_t n : modes) {
        if (n > spec.n_max) {
            continue;
        }
        const double residual =
            std::fabs(spec.phi.eval(n, spec.horizon) - spec.psi.eval(n, spec.horizon));
        report.max_residual = std::fmax(report.max_residual, residual);
        if (residual > tol) {
            report.passed = false;
            report.violations.push_back({n, residual});
        }
    }
    return report;
}

inline CompatibilityReport compatibility_check(const ProblemSpec& spec) {
    return compatibility_check(spec, default_compatibility_tolerance(spec));
}

// ---------------------------------------------------------------------------
// Perturbation family: phi and psi each gain sin(mx)/m, constant in time.
// ---------------------------------------------------------------------------

struct PerturbationSpec {
    std::int64_t m = 1;

    void validate() const {
        if (m < 1) {
            throw std::invalid_argument("PerturbationSpec: m must be >= 1");
        }
    }
};

inline ProblemSpec perturb(const ProblemSpec& spec, const PerturbationSpec& pert) {
    spec.validate();
    pert.validate();
    const double c = 1.0 / static_cast<double>(pert.m);
    ProblemSpec out = spec;
    out.phi = spec.phi.with_added_constant(pert.m, c);
    out.psi = spec.psi.with_added_constant(pert.m, c);
    return out;
}

/// Exact L2 size of the perturbation: ||sin(mx)/m|| = sqrt(pi/2)/m. This is
/// the eps the worked example feeds the regularization filter.
inline double noise_level(const PerturbationSpec& pert) {
    pert.validate();
    return std::sqrt(kPi / 2.0) / static_cast<double>(pert.m);
}

/// Uniform-random spectrum for property tests (no modeling claim).
inline SineSpectrum random_perturbation(std::mt19937& rng, std::int64_t max_mode, double amplitude) {
    std::uniform_real_distribution<double> coef(-amplitude, amplitude);
    std::vector<SineMode> entries;
    for (std::int64_t n = 1; n <= max_mode; ++n) {
        entries.push_back({n, coef(rng)});
    }
    return SineSpectrum(std::move(entries));
}

// ---------------------------------------------------------------------------
// Key-value text serialization.
//
//   horizon = 1
//   n_max = 16
//   phi.1 = exp 1 -2 -1          # scale rate offset: 1*exp(-2*tau + -1)
//   psi.1 = exp 1 -1 -2
//   source.1 = exp2 -2 -2 -1 0   # scale rate_t rate_s offset
//   phi.5 = const 0.25
//   phi.file = phi_samples.csv     # columns: time, mode_<n>, ...
//   source.file = f_samples.csv    # columns: t, s, mode_<n>, ... (full lattice)
//
// The name `paper-example` loads the built-in worked data set instead of a
// file. Sampled CSVs must cover [0, horizon] on a uniform grid; source
// lattices are t-major over [0, horizon]^2.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& token, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("problem file: bad number '" + token + "' in " + context);
    }
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

struct SampledCsv {
    std::vector<std::int64_t> modes;
    std::vector<double> times;
    std::vector<std::vector<double>> columns;  // one per mode
};

inline SampledCsv read_sampled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("problem file: cannot open sampled CSV '" + path + "'");
    }
    SampledCsv csv;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("problem file: empty sampled CSV '" + path + "'");
    }
    std::istringstream header(line);
    std::string field;
    bool first = true;
    while (std::getline(header, field, ',')) {
        field = trim(field);
        if (first) {
            if (field != "time") {
                throw std::runtime_error("problem file: first column of '" + path + "' must be 'time'");
            }
            first = false;
            continue;
        }
        if (field.rfind("mode_", 0) != 0) {
            throw std::runtime_error("problem file: column '" + field + "' in '" + path +
                                     "' must be named mode_<n>");
        }
        try {
            csv.modes.push_back(std::stoll(field.substr(5)));
        } catch (const std::exception&) {
            throw std::runtime_error("problem file: bad mode column '" + field + "' in '" + path +
                                     "'");
        }
        csv.columns.emplace_back();
    }
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(row, cell, ',')) {
            const double v = parse_double(trim(cell), path);
            if (column == 0) {
                csv.times.push_back(v);
            } else if (column - 1 < csv.columns.size()) {
                csv.columns[column - 1].push_back(v);
            } else {
                throw std::runtime_error("problem file: ragged row in '" + path + "'");
            }
            ++column;
        }
        if (column != csv.columns.size() + 1) {
            throw std::runtime_error("problem file: ragged row in '" + path + "'");
        }
    }
    return csv;
}

inline void require_uniform(const std::vector<double>& times, double horizon,
                            const std::string& path) {
    if (times.size() < 4) {
        throw std::runtime_error("problem file: '" + path + "' needs at least 4 time samples");
    }
    const double step = horizon / static_cast<double>(times.size() - 1);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::fabs(times[i] - step * static_cast<double>(i)) > 1e-9 * (1.0 + horizon)) {
            throw std::runtime_error("problem file: '" + path +
                                     "' must sample a uniform grid covering [0, horizon]");
        }
    }
}

struct SourceCsv {
    std::vector<std::int64_t> modes;
    std::size_t nodes_per_axis = 0;
    std::vector<std::vector<double>> lattices;  // one row-major lattice per mode
};

// columns t,s,mode_<n>,... over the complete uniform lattice, t-major
inline SourceCsv read_source_csv(const std::string& path, double horizon) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("problem file: cannot open sampled CSV '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("problem file: empty sampled CSV '" + path + "'");
    }
    SourceCsv csv;
    {
        std::istringstream header(line);
        std::string field;
        int column = 0;
        while (std::getline(header, field, ',')) {
            field = trim(field);
            if (column == 0 || column == 1) {
                const char* expected = column == 0 ? "t" : "s";
                if (field != expected) {
                    throw std::runtime_error("problem file: '" + path +
                                             "' must start with columns t,s");
                }
            } else if (field.rfind("mode_", 0) == 0) {
                try {
                    csv.modes.push_back(std::stoll(field.substr(5)));
                } catch (const std::exception&) {
                    throw std::runtime_error("problem file: bad mode column '" + field + "' in '" +
                                             path + "'");
                }
            } else {
                throw std::runtime_error("problem file: column '" + field + "' in '" + path +
                                         "' must be named mode_<n>");
            }
            ++column;
        }
    }
    std::vector<double> ts;
    std::vector<double> ss;
    std::vector<std::vector<double>> values(csv.modes.size());
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(row, cell, ',')) {
            const double v = parse_double(trim(cell), path);
            if (column == 0) {
                ts.push_back(v);
            } else if (column == 1) {
                ss.push_back(v);
            } else if (column - 2 < values.size()) {
                values[column - 2].push_back(v);
            } else {
                throw std::runtime_error("problem file: ragged row in '" + path + "'");
            }
            ++column;
        }
        if (column != values.size() + 2) {
            throw std::runtime_error("problem file: ragged row in '" + path + "'");
        }
    }
    const std::size_t total = ts.size();
    const auto q = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(total))));
    if (q < 4 || q * q != total) {
        throw std::runtime_error("problem file: '" + path +
                                 "' must contain a complete square lattice of samples");
    }
    const double step = horizon / static_cast<double>(q - 1);
    for (std::size_t r = 0; r < total; ++r) {
        const double expect_t = step * static_cast<double>(r / q);
        const double expect_s = step * static_cast<double>(r % q);
        if (std::fabs(ts[r] - expect_t) > 1e-9 * (1.0 + horizon) ||
            std::fabs(ss[r] - expect_s) > 1e-9 * (1.0 + horizon)) {
            throw std::runtime_error("problem file: '" + path +
                                     "' lattice must be uniform over [0, horizon]^2, t-major");
        }
    }
    csv.nodes_per_axis = q;
    csv.lattices = std::move(values);
    return csv;
}

}  // namespace detail

inline ProblemSpec load_problem(const std::string& path_or_builtin) {
    if (path_or_builtin == "paper-example") {
        return paper_example();
    }
    std::ifstream in(path_or_builtin);
    if (!in) {
        throw std::runtime_error("problem file: cannot open '" + path_or_builtin + "'");
    }

    ProblemSpec spec;
    spec.n_max = 32;
    bool saw_horizon = false;
    struct PendingFile {
        std::string owner;  // "phi" | "psi" | "source"
        std::string path;
    };
    std::vector<PendingFile> pending;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("problem file: line " + std::to_string(line_no) +
                                     " is not 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const std::string context = path_or_builtin + ":" + std::to_string(line_no);

        if (key == "horizon") {
            spec.horizon = detail::parse_double(value, context);
            saw_horizon = true;
            continue;
        }
        if (key == "n_max") {
            spec.n_max = static_cast<std::int64_t>(detail::parse_double(value, context));
            continue;
        }
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            throw std::runtime_error("problem file: unknown key '" + key + "' at " + context);
        }
        const std::string owner = key.substr(0, dot);
        const std::string member = key.substr(dot + 1);
        if (owner != "phi" && owner != "psi" && owner != "source") {
            throw std::runtime_error("problem file: unknown section '" + owner + "' at " + context);
        }
        if (member == "file") {
            pending.push_back({owner, value});
            continue;
        }
        std::int64_t n = 0;
        try {
            n = std::stoll(member);
        } catch (const std::exception&) {
            throw std::runtime_error("problem file: bad mode index '" + member + "' at " + context);
        }
        const auto tokens = detail::split_ws(value);
        if (tokens.empty()) {
            throw std::runtime_error("problem file: empty form at " + context);
        }
        if (tokens[0] == "const" && tokens.size() == 2) {
            const ConstForm form{detail::parse_double(tokens[1], context)};
            if (owner == "phi") {
                spec.phi.set(n, form);
            } else if (owner == "psi") {
                spec.psi.set(n, form);
            } else {
                spec.source.set(n, form);
            }
        } else if (tokens[0] == "exp" && tokens.size() == 4 && owner != "source") {
            const ExpForm form{detail::parse_double(tokens[1], context),
                               detail::parse_double(tokens[2], context),
                               detail::parse_double(tokens[3], context)};
            (owner == "phi" ? spec.phi : spec.psi).set(n, form);
        } else if (tokens[0] == "exp2" && tokens.size() == 5 && owner == "source") {
            spec.source.set(n, ExpForm2{detail::parse_double(tokens[1], context),
                                        detail::parse_double(tokens[2], context),
                                        detail::parse_double(tokens[3], context),
                                        detail::parse_double(tokens[4], context)});
        } else {
            throw std::runtime_error("problem file: unrecognized form '" + value + "' at " + context);
        }
    }
    if (!saw_horizon) {
        throw std::runtime_error("problem file: missing 'horizon' in '" + path_or_builtin + "'");
    }

    for (const auto& [owner, file] : pending) {
        if (owner == "source") {
            const auto csv = detail::read_source_csv(file, spec.horizon);
            for (std::size_t i = 0; i < csv.modes.size(); ++i) {
                spec.source.set(csv.modes[i],
                                SampledField(spec.horizon, csv.nodes_per_axis, csv.lattices[i]));
            }
            continue;
        }
        const auto csv = detail::read_sampled_csv(file);
        detail::require_uniform(csv.times, spec.horizon, file);
        for (std::size_t i = 0; i < csv.modes.size(); ++i) {
            SampledSeries series(spec.horizon, csv.columns[i]);
            (owner == "phi" ? spec.phi : spec.psi).set(csv.modes[i], std::move(series));
        }
    }

    spec.validate();
    return spec;
}

inline void save_problem(const ProblemSpec& spec, const std::string& path) {
    spec.validate();
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("problem file: cannot write '" + path + "'");
    }
    out << "horizon = " << spec.horizon << "\n";
    out << "n_max = " << spec.n_max << "\n";
    auto write_data = [&out, &path](const char* owner, const DataProfile& profile) {
        for (const auto& [n, form] : profile.entries()) {
            if (const auto* c = std::get_if<ConstForm>(&form)) {
                out << owner << "." << n << " = const " << c->value << "\n";
            } else if (const auto* e = std::get_if<ExpForm>(&form)) {
                out << owner << "." << n << " = exp " << e->scale << " " << e->rate << " "
                    << e->offset << "\n";
            } else {
                throw std::runtime_error("save_problem: mode " + std::to_string(n) + " of " + owner +
                                         " has no closed form; cannot serialize to '" + path + "'");
            }
        }
    };
    write_data("phi", spec.phi);
    write_data("psi", spec.psi);
    for (const auto& [n, form] : spec.source.entries()) {
        if (const auto* c = std::get_if<ConstForm>(&form)) {
            out << "source." << n << " = const " << c->value << "\n";
        } else if (const auto* e = std::get_if<ExpForm2>(&form)) {
            out << "source." << n << " = exp2 " << e->scale << " " << e->rate_t << " " << e->rate_s
                << " " << e->offset << "\n";
        } else {
            throw std::runtime_error("save_problem: source mode " + std::to_string(n) +
                                     " has no closed form; cannot serialize to '" + path + "'");
        }
    }
    if (!out) {
        throw std::runtime_error("save_problem: write failure on '" + path + "'");
    }
}

}  // namespace upde
