#pragma once

// Flat `key = value` run configuration with '#' comments.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <locale>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dampwave/energy.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/solver.hpp"
#include "dampwave/verification.hpp"

namespace dampwave {

enum class RunMode { Simulate, Convergence, DecayStudy };

struct RunConfig {
    RunMode mode = RunMode::Simulate;
    /// "interval", "square" or "file:<path>".
    std::string domain = "square";
    std::size_t n_per_side = 0;
    double c = 1.0;
    double eps_u = 0.0;
    double eps_v = 0.0;
    double alpha = 1.0;
    double k = 0.0;
    double T = 0.0;
    std::string initial = "fundamental";
    SolverConfig solver;
    std::optional<LyapunovParams> lyapunov;
    double window = 0.5;
    std::string case_name;
    std::size_t levels = 3;
    std::string energy_csv = "energy.csv";
    std::string summary_json = "summary.json";
    std::string convergence_csv = "convergence.csv";

    [[nodiscard]] bool domain_is_file() const { return domain.rfind("file:", 0) == 0; }
    [[nodiscard]] std::string mesh_path() const { return domain_is_file() ? domain.substr(5) : std::string{}; }

    /// Physical and time parameters; T must be a multiple of k.
    [[nodiscard]] SchemeParams scheme_params() const {
        return SchemeParams::with_step_size(c, eps_u, eps_v, alpha, k, T);
    }

    bool operator==(const RunConfig&) const = default;
};

inline std::vector<std::string> initial_presets() { return {"zero", "fundamental", "mixed"}; }

inline const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Simulate: return "simulate";
        case RunMode::Convergence: return "convergence";
        case RunMode::DecayStudy: return "decay-study";
    }
    return "";
}

inline const char* to_string(SolverMethod method) {
    return method == SolverMethod::ConjugateGradient ? "cg" : "cholesky";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view key, std::string_view text, std::size_t line) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value))
        throw ConfigError(line, "value of '" + std::string(key) + "' is not a finite number: '" + std::string(text) + "'");
    return value;
}

inline std::size_t parse_count(std::string_view key, std::string_view text, std::size_t line) {
    unsigned long long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(line, "value of '" + std::string(key) + "' is not a non-negative integer: '" +
                                    std::string(text) + "'");
    return static_cast<std::size_t>(value);
}

inline bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace detail

/// Parses and validates a configuration. Errors carry the offending line.
inline RunConfig parse_config(std::string_view text) {
    static const std::vector<std::string> known = {
        "mode",   "domain", "n",        "c",           "eps_u",         "eps_v",  "alpha",
        "k",      "T",      "initial",  "solver",      "rel_tol",       "max_iter", "lyapunov_N",
        "lyapunov_beta",    "window",   "case",        "levels",        "energy_csv", "summary_json",
        "convergence_csv"};

    std::map<std::string, std::pair<std::string, std::size_t>> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (!detail::contains(known, key)) throw ConfigError(line_no, "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has an empty value");
        if (!entries.emplace(key, std::pair{value, line_no}).second)
            throw ConfigError(line_no, "duplicate key '" + key + "'");
    }

    const auto line_of = [&](const std::string& key) { return entries.count(key) ? entries.at(key).second : 0; };
    const auto require = [&](const std::string& key) {
        if (!entries.count(key)) throw ConfigError(0, "missing required key '" + key + "'");
    };
    const auto number = [&](const std::string& key, double& out) {
        if (auto it = entries.find(key); it != entries.end())
            out = detail::parse_double(key, it->second.first, it->second.second);
    };
    const auto count = [&](const std::string& key, std::size_t& out) {
        if (auto it = entries.find(key); it != entries.end())
            out = detail::parse_count(key, it->second.first, it->second.second);
    };
    const auto text_value = [&](const std::string& key, std::string& out) {
        if (auto it = entries.find(key); it != entries.end()) out = it->second.first;
    };
    const auto fail = [&](const std::string& key, const std::string& why) {
        throw ConfigError(line_of(key), "invalid '" + key + "': " + why);
    };

    RunConfig cfg;
    require("mode");
    const std::string mode = entries.at("mode").first;
    if (mode == "simulate") cfg.mode = RunMode::Simulate;
    else if (mode == "convergence") cfg.mode = RunMode::Convergence;
    else if (mode == "decay-study") cfg.mode = RunMode::DecayStudy;
    else fail("mode", "expected simulate, convergence or decay-study");

    require("domain");
    text_value("domain", cfg.domain);
    if (!cfg.domain_is_file() && cfg.domain != "interval" && cfg.domain != "square")
        fail("domain", "expected interval, square or file:<path>");
    if (cfg.domain_is_file() && cfg.mesh_path().empty()) fail("domain", "empty mesh path");
    if (!cfg.domain_is_file()) {
        require("n");
        count("n", cfg.n_per_side);
        if (cfg.n_per_side < 1) fail("n", "must be at least 1");
    } else {
        count("n", cfg.n_per_side);
    }

    require("k");
    require("T");
    number("c", cfg.c);
    number("eps_u", cfg.eps_u);
    number("eps_v", cfg.eps_v);
    number("alpha", cfg.alpha);
    number("k", cfg.k);
    number("T", cfg.T);
    if (!(cfg.c > 0.0)) fail("c", "must be positive");
    if (!(cfg.eps_u >= 0.0)) fail("eps_u", "must be non-negative");
    if (!(cfg.eps_v >= 0.0)) fail("eps_v", "must be non-negative");
    if (!(cfg.alpha > 0.0)) fail("alpha", "must be positive");
    if (!(cfg.k > 0.0)) fail("k", "must be positive");
    if (!(cfg.T > 0.0)) fail("T", "must be positive");
    try {
        (void)cfg.scheme_params();
    } catch (const InvalidArgument& e) {
        fail("T", e.what());
    }

    text_value("initial", cfg.initial);
    if (!detail::contains(initial_presets(), cfg.initial)) fail("initial", "unknown preset '" + cfg.initial + "'");

    if (auto it = entries.find("solver"); it != entries.end()) {
        if (it->second.first == "cg") cfg.solver.method = SolverMethod::ConjugateGradient;
        else if (it->second.first == "cholesky") cfg.solver.method = SolverMethod::DenseCholesky;
        else fail("solver", "expected cg or cholesky");
    }
    number("rel_tol", cfg.solver.rel_tol);
    if (!(cfg.solver.rel_tol > 0.0 && cfg.solver.rel_tol < 1.0)) fail("rel_tol", "must lie in (0, 1)");
    if (entries.count("max_iter")) {
        std::size_t max_iter = 0;
        count("max_iter", max_iter);
        if (max_iter < 1) fail("max_iter", "must be at least 1");
        cfg.solver.max_iter = max_iter;
    }

    if (entries.count("lyapunov_N") != entries.count("lyapunov_beta"))
        fail(entries.count("lyapunov_N") ? "lyapunov_N" : "lyapunov_beta",
             "lyapunov_N and lyapunov_beta must be given together");
    if (entries.count("lyapunov_N")) {
        LyapunovParams lp;
        number("lyapunov_N", lp.N_weight);
        number("lyapunov_beta", lp.beta);
        if (!(lp.N_weight > 0.0)) fail("lyapunov_N", "must be positive");
        if (!(lp.beta > 0.0)) fail("lyapunov_beta", "must be positive");
        cfg.lyapunov = lp;
    }

    number("window", cfg.window);
    if (!(cfg.window > 0.0 && cfg.window <= 1.0)) fail("window", "must lie in (0, 1]");

    text_value("case", cfg.case_name);
    count("levels", cfg.levels);
    if (cfg.mode == RunMode::Convergence) {
        require("case");
        if (!detail::contains(case_names(), cfg.case_name)) fail("case", "unknown manufactured case '" + cfg.case_name + "'");
        const int dim = build_case(cfg.case_name, {}).dim;
        if (dim != 0 && !cfg.domain_is_file() && dim != (cfg.domain == "interval" ? 1 : 2))
            fail("case", "case '" + cfg.case_name + "' does not match domain '" + cfg.domain + "'");
        if (cfg.levels < 3) fail("levels", "must be at least 3");
    } else if (entries.count("case") && !detail::contains(case_names(), cfg.case_name)) {
        fail("case", "unknown manufactured case '" + cfg.case_name + "'");
    }

    text_value("energy_csv", cfg.energy_csv);
    text_value("summary_json", cfg.summary_json);
    text_value("convergence_csv", cfg.convergence_csv);
    return cfg;
}

/// Text that parse_config maps back to an equal RunConfig.
inline std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "mode = " << to_string(cfg.mode) << '\n';
    out << "domain = " << cfg.domain << '\n';
    if (!cfg.domain_is_file() || cfg.n_per_side != 0) out << "n = " << cfg.n_per_side << '\n';
    out << "c = " << detail::format_double(cfg.c) << '\n';
    out << "eps_u = " << detail::format_double(cfg.eps_u) << '\n';
    out << "eps_v = " << detail::format_double(cfg.eps_v) << '\n';
    out << "alpha = " << detail::format_double(cfg.alpha) << '\n';
    out << "k = " << detail::format_double(cfg.k) << '\n';
    out << "T = " << detail::format_double(cfg.T) << '\n';
    out << "initial = " << cfg.initial << '\n';
    out << "solver = " << to_string(cfg.solver.method) << '\n';
    out << "rel_tol = " << detail::format_double(cfg.solver.rel_tol) << '\n';
    if (cfg.solver.max_iter) out << "max_iter = " << *cfg.solver.max_iter << '\n';
    if (cfg.lyapunov) {
        out << "lyapunov_N = " << detail::format_double(cfg.lyapunov->N_weight) << '\n';
        out << "lyapunov_beta = " << detail::format_double(cfg.lyapunov->beta) << '\n';
    }
    out << "window = " << detail::format_double(cfg.window) << '\n';
    if (!cfg.case_name.empty()) out << "case = " << cfg.case_name << '\n';
    out << "levels = " << cfg.levels << '\n';
    out << "energy_csv = " << cfg.energy_csv << '\n';
    out << "summary_json = " << cfg.summary_json << '\n';
    out << "convergence_csv = " << cfg.convergence_csv << '\n';
    return out.str();
}

}  // namespace dampwave
