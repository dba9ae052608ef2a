#pragma once

// Orchestration behind the command-line tool: builds the mesh, runs the
// configured study and writes CSV / JSON results.
//
// Exit codes: 0 success, 1 invalid input (arguments, configuration, mesh
// file contents, unsupported setup), 2 numerical or internal failure
// (solver did not converge, not enough data for the decay fit), 3 I/O failure.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dampwave/assembly.hpp"
#include "dampwave/config.hpp"
#include "dampwave/energy.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/scheme.hpp"
#include "dampwave/verification.hpp"

namespace dampwave {

enum ExitCode : int { kExitOk = 0, kExitInvalidInput = 1, kExitNumerical = 2, kExitIo = 3 };

/// Named initial conditions. "mixed" excites several modes in both fields.
inline InitialData initial_preset(const std::string& name, int dim) {
    using std::numbers::pi;
    const auto mode = [dim](int p, int q) -> ScalarField {
        return [=](const Point& x) {
            const double s = std::sin(p * pi * x[0]);
            return dim == 2 ? s * std::sin(q * pi * x[1]) : s;
        };
    };
    const ScalarField zero = [](const Point&) { return 0.0; };
    if (name == "zero") return InitialData::zero();
    if (name == "fundamental") return {mode(1, 1), zero, zero, zero};
    if (name == "mixed") {
        const ScalarField m11 = mode(1, 1), m21 = mode(2, 1), m12 = mode(1, 2), m32 = mode(3, 2);
        return {[=](const Point& x) { return m11(x) + 0.25 * m32(x); }, zero,
                [=](const Point& x) { return 0.5 * m21(x); }, m12};
    }
    throw InvalidArgument("unknown initial-condition preset '" + name + "'");
}

inline Mesh build_mesh(const RunConfig& cfg) {
    if (cfg.domain_is_file()) return read_mesh_file(cfg.mesh_path());
    if (cfg.domain == "interval") return generate_unit_interval(cfg.n_per_side);
    if (cfg.domain == "square") return generate_unit_square(cfg.n_per_side);
    throw InvalidArgument("unknown domain '" + cfg.domain + "'");
}

/// One energy CSV row.
struct EnergyRow {
    EnergyRecord record;
    /// E^n - E^{n-1}; absent on the first record.
    std::optional<double> dE;
    std::optional<double> identity_residual;
    std::optional<double> lyapunov;
};

struct SimulationSummary {
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::optional<DecayFit> fit;
    double max_identity_residual = 0.0;
    bool monotone = true;
    std::size_t steps = 0;
};

struct SimulationResult {
    std::vector<EnergyRow> rows;
    SimulationSummary summary;
};

/// Runs the homogeneous scheme and records energy, dissipation balance and
/// (when configured) the Lyapunov functional at every level.
inline SimulationResult simulate(const Mesh& mesh, const SchemeParams& params, const InitialData& data,
                                 const SolverConfig& solver, const std::optional<LyapunovParams>& lyapunov_params,
                                 double window) {
    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const Operators ops{mass, stiffness};

    SimulationResult result;
    std::optional<State> previous;
    const auto observe = [&](const State& s) {
        EnergyRow row;
        row.record = energy(s, ops, params);
        if (previous) {
            const LevelTriple lv = LevelTriple::of(*previous, s);
            row.record.dissipation = dissipation_terms(lv, ops, params);
            row.dE = row.record.E - result.rows.back().record.E;
            double rhs = 0.0;
            for (double term : *row.record.dissipation) rhs += term;
            row.identity_residual = std::abs(*row.dE - rhs);
        }
        if (lyapunov_params) row.lyapunov = lyapunov(LevelPair::of(s), ops, params, *lyapunov_params);
        result.rows.push_back(row);
        previous = s;
    };
    run(mesh, params, data, solver, observe);

    SimulationSummary& sum = result.summary;
    sum.steps = params.steps;
    sum.initial_energy = result.rows.front().record.E;
    sum.final_energy = result.rows.back().record.E;
    const double slack = 1e-12 * std::max(sum.initial_energy, 1.0);
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        sum.max_identity_residual = std::max(sum.max_identity_residual, *result.rows[i].identity_residual);
        if (result.rows[i].record.E > result.rows[i - 1].record.E + slack) sum.monotone = false;
    }
    std::vector<EnergyRecord> history;
    history.reserve(result.rows.size());
    for (const auto& row : result.rows) history.push_back(row.record);
    try {
        sum.fit = fit_decay_rate(history, window);
    } catch (const InsufficientData&) {
        sum.fit.reset();
    }
    return result;
}

inline SimulationResult simulate(const RunConfig& cfg) {
    const Mesh mesh = build_mesh(cfg);
    return simulate(mesh, cfg.scheme_params(), initial_preset(cfg.initial, mesh.dim), cfg.solver, cfg.lyapunov,
                    cfg.window);
}

namespace detail {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string csv_number(double value) {
    if (std::isnan(value)) return "nan";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

inline std::string csv_number(const std::optional<double>& value) {
    return csv_number(value.value_or(std::numeric_limits<double>::quiet_NaN()));
}

}  // namespace detail

inline void write_energy_csv(std::ostream& out, const SimulationResult& result) {
    std::string text = "n,t,E,kinetic_u,kinetic_v,elastic_u,elastic_v,coupling,dE,identity_residual,lyapunov\n";
    for (const auto& row : result.rows) {
        const EnergyRecord& r = row.record;
        text += std::to_string(r.n);
        for (double v : {r.t, r.E, r.kinetic_u, r.kinetic_v, r.elastic_u, r.elastic_v, r.coupling})
            text += "," + detail::csv_number(v);
        text += "," + detail::csv_number(row.dE);
        text += "," + detail::csv_number(row.identity_residual);
        text += "," + detail::csv_number(row.lyapunov);
        text += '\n';
    }
    out << text;
}

inline nlohmann::json summary_json(const SimulationSummary& s, const SchemeParams& params, RunMode mode) {
    nlohmann::json j;
    j["mode"] = to_string(mode);
    j["steps"] = s.steps;
    j["initial_energy"] = s.initial_energy;
    j["final_energy"] = s.final_energy;
    j["fitted_gamma"] = s.fit ? nlohmann::json(s.fit->gamma) : nlohmann::json(nullptr);
    j["fit_residual"] = s.fit ? nlohmann::json(s.fit->residual) : nlohmann::json(nullptr);
    j["max_identity_residual"] = s.max_identity_residual;
    j["monotone"] = s.monotone;
    if (mode == RunMode::DecayStudy && s.fit) {
        const double ratio = s.initial_energy > 0.0 ? s.final_energy / s.initial_energy : 0.0;
        const double bound = std::exp(-s.fit->gamma * params.T / 2.0);
        j["fit_window"] = {s.fit->n_start, s.fit->n_end};
        j["fit_log_C"] = s.fit->log_C;
        j["energy_ratio"] = ratio;
        j["decay_bound"] = bound;
        j["decay_bound_holds"] = s.fit->gamma > 0.0 && ratio <= bound;
    }
    return j;
}

inline void write_convergence_csv(std::ostream& out, const ErrorReport& report) {
    std::string text = "level,h,k,error,order\n";
    for (const auto& e : report.levels) {
        text += std::to_string(e.level) + "," + detail::csv_number(e.h) + "," + detail::csv_number(e.k) + "," +
                detail::csv_number(e.error) + "," + detail::csv_number(e.order) + "\n";
    }
    out << text;
}

inline ErrorReport run_convergence(const RunConfig& cfg) {
    const Mesh mesh = build_mesh(cfg);
    const SchemeParams params = cfg.scheme_params();
    const ManufacturedCase mc = build_case(cfg.case_name, params);
    return convergence_study(mc, mesh, cfg.k, cfg.levels, params, cfg.solver);
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline int execute(const std::string& config_path, const std::string& out_dir, bool quiet, std::ostream& out) {
    const RunConfig cfg = parse_config(read_file(config_path));
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    const std::filesystem::path dir(out_dir);

    if (cfg.mode == RunMode::Convergence) {
        const ErrorReport report = run_convergence(cfg);
        std::ostringstream csv;
        write_convergence_csv(csv, report);
        write_file(dir / cfg.convergence_csv, csv.str());
        nlohmann::json j;
        j["mode"] = to_string(cfg.mode);
        j["case"] = report.case_name;
        j["fitted_order"] = report.fitted_order;
        j["errors"] = nlohmann::json::array();
        for (const auto& e : report.levels) j["errors"].push_back(e.error);
        write_file(dir / cfg.summary_json, j.dump(2) + "\n");
        if (!quiet) out << "fitted order " << detail::csv_number(report.fitted_order) << '\n';
        return kExitOk;
    }

    const SimulationResult result = simulate(cfg);
    if (cfg.mode == RunMode::DecayStudy && !result.summary.fit)
        throw InsufficientData("decay study: fewer than 3 positive energy records in the fit window");
    std::ostringstream csv;
    write_energy_csv(csv, result);
    write_file(dir / cfg.energy_csv, csv.str());
    write_file(dir / cfg.summary_json, summary_json(result.summary, cfg.scheme_params(), cfg.mode).dump(2) + "\n");
    if (!quiet) {
        out << "final energy " << detail::csv_number(result.summary.final_energy) << ", max identity residual "
            << detail::csv_number(result.summary.max_identity_residual)
            << (result.summary.monotone ? ", monotone" : ", NOT monotone") << '\n';
        if (result.summary.fit) out << "fitted gamma " << detail::csv_number(result.summary.fit->gamma) << '\n';
    }
    return kExitOk;
}

}  // namespace detail

/// `dampwave --config <path> [--out-dir <path>] [--quiet]`; args[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coupled damped wave solver with energy and convergence diagnostics", "dampwave"};
    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;
    app.add_option("--config", config_path, "Run configuration (key = value)")->required();
    app.add_option("--out-dir", out_dir, "Directory for CSV and JSON results");
    app.add_flag("--quiet", quiet, "Suppress the progress summary");

    // CLI11 consumes a reversed argument list without the program name.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }

    try {
        return detail::execute(config_path, out_dir, quiet, out);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InsufficientData& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace dampwave
