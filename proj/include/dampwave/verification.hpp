#pragma once

// Manufactured-solution convergence studies. A case supplies closed-form
// u, v with their time derivatives and Laplacians; the sources that make
// them exact solutions of the coupled system follow from those.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dampwave/assembly.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/scheme.hpp"
#include "dampwave/solver.hpp"

namespace dampwave {

using SpaceTimeField = std::function<double(const Point&, double)>;

struct ManufacturedCase {
    std::string name;
    /// Mesh dimension the case is built for; 0 accepts either.
    int dim = 0;
    SchemeParams params;
    SpaceTimeField u, v;
    SpaceTimeField u_t, v_t;
    SpaceTimeField u_tt, v_tt;
    SpaceTimeField lap_u, lap_v;

    /// u_tt - c^2 Lap u + eps_u u_t + alpha (u - v)
    [[nodiscard]] double source_u(const Point& x, double t) const {
        const double c2 = params.c * params.c;
        return u_tt(x, t) - c2 * lap_u(x, t) + params.eps_u * u_t(x, t) + params.alpha * (u(x, t) - v(x, t));
    }

    /// v_tt - c^2 Lap v + eps_v v_t + alpha (v - u)
    [[nodiscard]] double source_v(const Point& x, double t) const {
        const double c2 = params.c * params.c;
        return v_tt(x, t) - c2 * lap_v(x, t) + params.eps_v * v_t(x, t) + params.alpha * (v(x, t) - u(x, t));
    }

    [[nodiscard]] Forcing forcing() const {
        return {[self = *this](const Point& x, double t) { return self.source_u(x, t); },
                [self = *this](const Point& x, double t) { return self.source_v(x, t); }};
    }

    /// u(., 0), u_t(., 0), v(., 0), v_t(., 0) as scheme start-up data.
    [[nodiscard]] InitialData initial_data() const {
        return {[f = u](const Point& x) { return f(x, 0.0); }, [f = u_t](const Point& x) { return f(x, 0.0); },
                [f = v](const Point& x) { return f(x, 0.0); }, [f = v_t](const Point& x) { return f(x, 0.0); }};
    }
};

namespace detail {

/// u = a e^{-t} S(x), v = b e^{-t} S(x), S a product of sin(pi x_i) so that
/// Lap S = -dim pi^2 S and S vanishes on the boundary of the unit cube.
inline ManufacturedCase separable_case(std::string name, int dim, double a, double b, const SchemeParams& params) {
    const auto shape = [dim](const Point& x) {
        const double s = std::sin(std::numbers::pi * x[0]);
        return dim == 2 ? s * std::sin(std::numbers::pi * x[1]) : s;
    };
    const double lap_factor = -static_cast<double>(dim) * std::numbers::pi * std::numbers::pi;
    const auto field = [shape](double amp, double sign, double lap) -> SpaceTimeField {
        return [=](const Point& x, double t) { return amp * sign * lap * std::exp(-t) * shape(x); };
    };
    ManufacturedCase c;
    c.name = std::move(name);
    c.dim = dim;
    c.params = params;
    c.u = field(a, 1.0, 1.0);
    c.v = field(b, 1.0, 1.0);
    c.u_t = field(a, -1.0, 1.0);
    c.v_t = field(b, -1.0, 1.0);
    c.u_tt = field(a, 1.0, 1.0);
    c.v_tt = field(b, 1.0, 1.0);
    c.lap_u = field(a, 1.0, lap_factor);
    c.lap_v = field(b, 1.0, lap_factor);
    return c;
}

}  // namespace detail

/// Built-in cases: "separable-decay" (2D, v = 2u), "separable-decay-1d",
/// "symmetric" (2D, u = v), "symmetric-1d" and "zero" (any dimension).
inline ManufacturedCase build_case(const std::string& name, const SchemeParams& params) {
    if (name == "separable-decay") return detail::separable_case(name, 2, 1.0, 2.0, params);
    if (name == "separable-decay-1d") return detail::separable_case(name, 1, 1.0, 2.0, params);
    if (name == "symmetric") return detail::separable_case(name, 2, 1.0, 1.0, params);
    if (name == "symmetric-1d") return detail::separable_case(name, 1, 1.0, 1.0, params);
    if (name == "zero") {
        ManufacturedCase c = detail::separable_case(name, 0, 0.0, 0.0, params);
        const SpaceTimeField zero = [](const Point&, double) { return 0.0; };
        c.u = c.v = c.u_t = c.v_t = c.u_tt = c.v_tt = c.lap_u = c.lap_v = zero;
        return c;
    }
    throw InvalidArgument("unknown manufactured case '" + name + "'");
}

inline std::vector<std::string> case_names() {
    return {"separable-decay", "separable-decay-1d", "symmetric", "symmetric-1d", "zero"};
}

/// Which discretization parameters are halved from one level to the next.
enum class Refinement { Lockstep, TimeOnly, SpaceOnly };

enum ErrorComponent : std::size_t { kVelocityU, kVelocityV, kGradientU, kGradientV, kCouplingDifference, kErrorComponents };

struct LevelError {
    std::size_t level = 0;
    double h = 0.0;
    double k = 0.0;
    std::size_t unknowns = 0;
    /// sqrt of max over n of the five-term sum.
    double error = 0.0;
    /// sqrt of max over n of each term separately.
    std::array<double, kErrorComponents> components{};
    /// sqrt of the five-term sum at the final time.
    double final_error = 0.0;
    /// Observed order against the previous level; NaN on level 0.
    double order = std::numeric_limits<double>::quiet_NaN();
};

struct ErrorReport {
    std::string case_name;
    Refinement refinement = Refinement::Lockstep;
    std::vector<LevelError> levels;
    /// Least-squares slope of log(error) against log(h), or log(k) for time-only refinement.
    double fitted_order = std::numeric_limits<double>::quiet_NaN();
};

/// Runs one discretization of the case and measures the composite error
/// against the nodal interpolant of the exact solution, with velocities
/// compared through the same backward difference the scheme uses.
inline LevelError measure_error(const ManufacturedCase& mc, const Mesh& mesh, const SchemeParams& params,
                                const SolverConfig& cfg) {
    if (mc.dim != 0 && mc.dim != mesh.dim)
        throw InvalidArgument("case '" + mc.name + "' needs a " + std::to_string(mc.dim) + "D mesh");
    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const auto at_time = [&mesh](const SpaceTimeField& f, double t) {
        return interpolate(mesh, [&](const Point& x) { return f(x, t); });
    };

    ManufacturedCase local = mc;
    local.params = params;

    LevelError out;
    out.h = mesh.h;
    out.k = params.k;
    out.unknowns = mass.rows();
    double worst = 0.0;
    std::array<double, kErrorComponents> worst_parts{};
    Vector u_exact_prev = at_time(local.u, 0.0);
    Vector v_exact_prev = at_time(local.v, 0.0);

    const auto observe = [&](const State& s) {
        const double t = params.time(s.n);
        const Vector u_exact = at_time(local.u, t);
        const Vector v_exact = at_time(local.v, t);
        const std::size_t n = u_exact.size();
        Vector vel_u(n), vel_v(n), grad_u(n), grad_v(n), coupling(n);
        for (std::size_t i = 0; i < n; ++i) {
            vel_u[i] = ((u_exact[i] - u_exact_prev[i]) - (s.u_curr[i] - s.u_prev[i])) / params.k;
            vel_v[i] = ((v_exact[i] - v_exact_prev[i]) - (s.v_curr[i] - s.v_prev[i])) / params.k;
            grad_u[i] = u_exact[i] - s.u_curr[i];
            grad_v[i] = v_exact[i] - s.v_curr[i];
            coupling[i] = (u_exact[i] - v_exact[i]) - (s.u_curr[i] - s.v_curr[i]);
        }
        const std::array<double, kErrorComponents> parts{mass.inner(vel_u, vel_u), mass.inner(vel_v, vel_v),
                                                         stiffness.inner(grad_u, grad_u),
                                                         stiffness.inner(grad_v, grad_v),
                                                         mass.inner(coupling, coupling)};
        double sum = 0.0;
        for (std::size_t c = 0; c < kErrorComponents; ++c) {
            sum += parts[c];
            worst_parts[c] = std::max(worst_parts[c], parts[c]);
        }
        worst = std::max(worst, sum);
        if (s.n == params.steps) out.final_error = std::sqrt(sum);
        u_exact_prev = u_exact;
        v_exact_prev = v_exact;
    };

    // Level 0 of the exact solution is the start of the first observed difference.
    run(mesh, params, local.initial_data(), cfg, observe, local.forcing());
    out.error = std::sqrt(worst);
    for (std::size_t c = 0; c < kErrorComponents; ++c) out.components[c] = std::sqrt(worst_parts[c]);
    return out;
}

/// Level j uses h_0 / 2^j and/or k_0 / 2^j depending on `refinement`.
inline ErrorReport convergence_study(const ManufacturedCase& mc, const Mesh& base_mesh, double base_k,
                                     std::size_t levels, const SchemeParams& params, const SolverConfig& cfg,
                                     Refinement refinement = Refinement::Lockstep) {
    if (levels < 3) throw InvalidArgument("a convergence study needs at least 3 levels");
    const SchemeParams base =
        SchemeParams::with_step_size(params.c, params.eps_u, params.eps_v, params.alpha, base_k, params.T);

    ErrorReport report;
    report.case_name = mc.name;
    report.refinement = refinement;
    Mesh mesh = base_mesh;
    std::size_t steps = base.steps;
    for (std::size_t j = 0; j < levels; ++j) {
        if (j > 0) {
            if (refinement != Refinement::TimeOnly) mesh = refine_uniform(mesh);
            if (refinement != Refinement::SpaceOnly) steps *= 2;
        }
        const SchemeParams level_params =
            SchemeParams::with_steps(base.c, base.eps_u, base.eps_v, base.alpha, base.T, steps);
        LevelError e;
        try {
            e = measure_error(mc, mesh, level_params, cfg);
        } catch (const SolverFailure& failure) {
            throw SolverFailure("convergence level " + std::to_string(j) + ": " + failure.what(), failure.residual(),
                                failure.iterations());
        }
        e.level = j;
        if (j > 0) {
            const LevelError& prev = report.levels.back();
            const double scale = refinement == Refinement::TimeOnly ? prev.k / e.k : prev.h / e.h;
            e.order = std::log(prev.error / e.error) / std::log(scale);
        }
        report.levels.push_back(e);
    }

    std::vector<double> xs, ys;
    for (const auto& e : report.levels) {
        if (e.error > 0.0) {
            xs.push_back(std::log(refinement == Refinement::TimeOnly ? e.k : e.h));
            ys.push_back(std::log(e.error));
        }
    }
    if (xs.size() >= 2) {
        const double m = static_cast<double>(xs.size());
        double x_mean = 0.0, y_mean = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            x_mean += xs[i] / m;
            y_mean += ys[i] / m;
        }
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
            sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
        }
        if (sxx > 0.0) report.fitted_order = sxy / sxx;
    }
    return report;
}

}  // namespace dampwave
