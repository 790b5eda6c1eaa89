// Command-line front end: reproduces the comparison table, the blow-up
// demonstration and the convergence sweep, and runs one-shot regularized
// solves on problem files. All numeric output is CSV; diagnostics go to
// stderr and any failure exits nonzero.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "upde/upde.hpp"

namespace {

std::int64_t parse_index(const std::string& token) {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size() || !(value >= 1.0) || value > 9.2e18 ||
        value != std::floor(value)) {
        throw CLI::ValidationError("'" + token + "' is not a positive integer index");
    }
    return static_cast<std::int64_t>(value);
}

std::vector<std::int64_t> parse_index_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::size_t begin = 0;
    while (begin <= csv.size()) {
        const std::size_t comma = csv.find(',', begin);
        const std::string token =
            csv.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
        if (token.empty()) {
            throw CLI::ValidationError("empty entry in index list '" + csv + "'");
        }
        out.push_back(parse_index(token));
        if (comma == std::string::npos) {
            break;
        }
        begin = comma + 1;
    }
    return out;
}

void warn_on_incompatibility(const upde::ProblemSpec& spec) {
    const auto report = upde::compatibility_check(spec);
    if (!report.passed) {
        std::cerr << "warning: data fails the corner compatibility check (max residual "
                  << report.max_residual << "); the error estimates do not apply\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral regularization experiments for the final-value ultraparabolic problem"};
    app.require_subcommand(1);

    // table1
    auto* table = app.add_subcommand("table1", "reproduce the error comparison table");
    int table_k = 100;
    int table_m_sub = 80;
    double table_p = 10.0;
    std::string table_ms = "1e2,1e10";
    std::string table_out = "table1.csv";
    bool table_supplementary = false;
    table->add_option("--K", table_k, "space subdivisions (even)");
    table->add_option("--M", table_m_sub, "time subdivisions per axis");
    table->add_option("--p", table_p, "filter exponent");
    table->add_option("--m", table_ms, "comma-separated perturbation indices");
    table->add_option("--out", table_out, "output CSV path");
    table->add_flag("--supplementary", table_supplementary,
                    "add rows at x = pi/3 where the perturbation mode is visible");

    // diverge
    auto* diverge = app.add_subcommand("diverge", "blow-up of the unregularized solution");
    std::string diverge_ms = "1,2,3";
    std::string diverge_out = "diverge.csv";
    std::string diverge_profiles;
    diverge->add_option("--m", diverge_ms, "comma-separated perturbation indices");
    diverge->add_option("--out", diverge_out, "output CSV path (m, log_norm, norm)");
    diverge->add_option("--profiles", diverge_profiles,
                        "optional CSV path for the spatial profiles at (1/2, 1/2)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "convergence-rate regression against eps");
    double sweep_p = 10.0;
    std::string sweep_ms = "1e2,1e4,1e6,1e8";
    std::string sweep_point = "0,0";
    std::string sweep_out = "sweep.csv";
    sweep->add_option("--p", sweep_p, "filter exponent");
    sweep->add_option("--m", sweep_ms, "comma-separated perturbation indices");
    sweep->add_option("--point", sweep_point, "evaluation point t,s");
    sweep->add_option("--out", sweep_out, "output CSV path");

    // solve
    auto* solve = app.add_subcommand("solve", "one-shot regularized solve of a problem file");
    std::string solve_problem;
    double solve_eps = 0.0;
    double solve_p = 0.0;
    double solve_t = 0.0;
    double solve_s = 0.0;
    std::string solve_out;
    std::string solve_grid_out;
    int solve_k = 100;
    solve->add_option("--problem", solve_problem,
                      "problem file path, or the builtin name 'paper-example'")
        ->required();
    solve->add_option("--eps", solve_eps, "noise level fed to the filter")->required();
    solve->add_option("--p", solve_p, "filter exponent")->required();
    solve->add_option("--t", solve_t, "first time coordinate")->required();
    solve->add_option("--s", solve_s, "second time coordinate")->required();
    solve->add_option("--out", solve_out, "spectrum CSV path (default: stdout)");
    solve->add_option("--grid-out", solve_grid_out,
                      "also write x,value rows of the solution on the space grid");
    solve->add_option("--K", solve_k, "space subdivisions for --grid-out");

    CLI11_PARSE(app, argc, argv);

    try {
        if (table->parsed()) {
            const upde::GridConfig grid{table_k, table_m_sub, table_p};
            const auto rows =
                upde::run_table1(grid, parse_index_list(table_ms), table_supplementary);
            upde::emit_csv(rows, table_out);
            std::cerr << "wrote " << rows.size() << " rows to " << table_out << "\n";
        } else if (diverge->parsed()) {
            const auto result = upde::run_divergence(parse_index_list(diverge_ms));
            upde::emit_divergence_csv(result, diverge_out);
            std::cerr << "wrote " << result.entries.size() << " entries to " << diverge_out
                      << "\n";
            if (!diverge_profiles.empty()) {
                upde::emit_profiles_csv(result, diverge_profiles);
                std::cerr << "wrote profiles to " << diverge_profiles << "\n";
            }
        } else if (sweep->parsed()) {
            double t = 0.0;
            double s = 0.0;
            if (std::sscanf(sweep_point.c_str(), "%lf,%lf", &t, &s) != 2) {
                std::cerr << "error: --point expects 't,s'\n";
                return 1;
            }
            const auto result = upde::run_convergence_sweep(sweep_p, parse_index_list(sweep_ms),
                                                            t, s);
            upde::emit_sweep_csv(result, sweep_out);
            std::cout << "slope=" << upde::format_value(result.slope)
                      << " residual=" << upde::format_value(result.residual) << "\n";
        } else if (solve->parsed()) {
            const upde::ProblemSpec spec = upde::load_problem(solve_problem);
            warn_on_incompatibility(spec);
            const upde::RegularizationParams params(solve_p, solve_eps, spec.horizon);
            const upde::SineSpectrum v = upde::regularized_solve(spec, params, solve_t, solve_s);
            std::ostream* sink = &std::cout;
            std::ofstream file;
            if (!solve_out.empty()) {
                file.open(solve_out, std::ios::binary);
                if (!file) {
                    std::cerr << "error: cannot write " << solve_out << "\n";
                    return 1;
                }
                sink = &file;
            }
            (*sink) << "n,c\n";
            for (const auto& mode : v.entries()) {
                (*sink) << mode.n << ',' << upde::format_value(mode.c) << '\n';
            }
            if (!solve_grid_out.empty()) {
                const upde::SpaceGrid grid(solve_k);
                const auto values = grid.sample(v);
                std::ofstream curve(solve_grid_out, std::ios::binary);
                if (!curve) {
                    std::cerr << "error: cannot write " << solve_grid_out << "\n";
                    return 1;
                }
                curve << "x,value\n";
                for (std::size_t j = 0; j < values.size(); ++j) {
                    curve << upde::format_value(grid.node(static_cast<int>(j))) << ','
                          << upde::format_value(values[j]) << '\n';
                }
            }
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
