#pragma once

// Discrete energy of the coupled scheme, its exact per-step dissipation
// balance, the perturbed Lyapunov functional, and log-linear decay fits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "dampwave/errors.hpp"
#include "dampwave/scheme.hpp"
#include "dampwave/sparse.hpp"

namespace dampwave {

/// Mass and stiffness on interior unknowns.
struct Operators {
    const SparseMatrix& mass;
    const SparseMatrix& stiffness;
};

/// Indices into EnergyRecord::dissipation.
enum DissipationTerm : std::size_t {
    kSecondDifferenceU,
    kSecondDifferenceV,
    kGradientIncrementU,
    kGradientIncrementV,
    kFrictionU,
    kFrictionV,
    kCouplingIncrement,
    kDissipationTerms
};

struct EnergyRecord {
    std::size_t n = 0;
    double t = 0.0;
    double E = 0.0;
    double kinetic_u = 0.0;
    double kinetic_v = 0.0;
    double elastic_u = 0.0;
    double elastic_v = 0.0;
    double coupling = 0.0;
    /// Non-positive terms whose sum is E^n - E^{n-1}; only for n >= 2.
    std::optional<std::array<double, kDissipationTerms>> dissipation;

    [[nodiscard]] double component_sum() const { return kinetic_u + kinetic_v + elastic_u + elastic_v + coupling; }
};

/// Two consecutive levels (old, new) of both unknowns.
struct LevelPair {
    std::span<const double> u_old, u_new, v_old, v_new;

    static LevelPair of(const State& s) { return {s.u_prev, s.u_curr, s.v_prev, s.v_curr}; }
};

/// Three consecutive levels n-1, n, n+1.
struct LevelTriple {
    std::span<const double> u_prev, u_curr, u_next, v_prev, v_curr, v_next;

    static LevelTriple of(const State& before, const State& after) {
        return {before.u_prev, before.u_curr, after.u_curr, before.v_prev, before.v_curr, after.v_curr};
    }
};

namespace detail {

inline void check_sizes(std::size_t n, std::initializer_list<std::span<const double>> vs) {
    for (const auto& v : vs)
        if (v.size() != n) throw InvalidArgument("level vector does not match the operator size");
}

/// (a - b) * scale, elementwise.
inline Vector scaled_difference(std::span<const double> a, std::span<const double> b, double scale) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] - b[i]) * scale;
    return d;
}

inline double norm_sq(const SparseMatrix& A, std::span<const double> x) { return A.inner(x, x); }

}  // namespace detail

/// E^{n+1} = 1/2 [ |du|_M^2 + |dv|_M^2 + c^2 |u^{n+1}|_K^2 + c^2 |v^{n+1}|_K^2
///                 + alpha |u^{n+1} - v^{n+1}|_M^2 ],  du = (u^{n+1} - u^n) / k.
inline EnergyRecord energy(const LevelPair& levels, const Operators& ops, const SchemeParams& params,
                           std::size_t n_new = 0) {
    const std::size_t n = ops.mass.rows();
    detail::check_sizes(n, {levels.u_old, levels.u_new, levels.v_old, levels.v_new});
    if (ops.stiffness.rows() != n) throw InvalidArgument("stiffness size does not match mass size");
    const double inv_k = 1.0 / params.k;
    const double c2 = params.c * params.c;

    EnergyRecord r;
    r.n = n_new;
    r.t = params.time(n_new);
    r.kinetic_u = 0.5 * detail::norm_sq(ops.mass, detail::scaled_difference(levels.u_new, levels.u_old, inv_k));
    r.kinetic_v = 0.5 * detail::norm_sq(ops.mass, detail::scaled_difference(levels.v_new, levels.v_old, inv_k));
    r.elastic_u = 0.5 * c2 * detail::norm_sq(ops.stiffness, levels.u_new);
    r.elastic_v = 0.5 * c2 * detail::norm_sq(ops.stiffness, levels.v_new);
    r.coupling = 0.5 * params.alpha * detail::norm_sq(ops.mass, detail::scaled_difference(levels.u_new, levels.v_new, 1.0));
    r.E = r.component_sum();
    return r;
}

inline EnergyRecord energy(const State& s, const Operators& ops, const SchemeParams& params) {
    return energy(LevelPair::of(s), ops, params, s.n);
}

/// The seven non-positive terms balancing E^{n+1} - E^n:
///   -1/2 |(w^{n+1} - 2 w^n + w^{n-1}) / k|_M^2        (w = u, v)
///   -c^2/2 |w^{n+1} - w^n|_K^2
///   -eps_w / k |w^{n+1} - w^n|_M^2
///   -alpha/2 |(u^{n+1} - v^{n+1}) - (u^n - v^n)|_M^2
inline std::array<double, kDissipationTerms> dissipation_terms(const LevelTriple& lv, const Operators& ops,
                                                               const SchemeParams& params) {
    const std::size_t n = ops.mass.rows();
    detail::check_sizes(n, {lv.u_prev, lv.u_curr, lv.u_next, lv.v_prev, lv.v_curr, lv.v_next});
    const double inv_k = 1.0 / params.k;
    const auto second_difference = [&](std::span<const double> prev, std::span<const double> curr,
                                       std::span<const double> next) {
        Vector d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = (next[i] - 2.0 * curr[i] + prev[i]) * inv_k;
        return d;
    };
    const Vector du = detail::scaled_difference(lv.u_next, lv.u_curr, 1.0);
    const Vector dv = detail::scaled_difference(lv.v_next, lv.v_curr, 1.0);
    const Vector dw = detail::scaled_difference(du, dv, 1.0);

    std::array<double, kDissipationTerms> terms{};
    terms[kSecondDifferenceU] = -0.5 * detail::norm_sq(ops.mass, second_difference(lv.u_prev, lv.u_curr, lv.u_next));
    terms[kSecondDifferenceV] = -0.5 * detail::norm_sq(ops.mass, second_difference(lv.v_prev, lv.v_curr, lv.v_next));
    terms[kGradientIncrementU] = -0.5 * params.c * params.c * detail::norm_sq(ops.stiffness, du);
    terms[kGradientIncrementV] = -0.5 * params.c * params.c * detail::norm_sq(ops.stiffness, dv);
    terms[kFrictionU] = -params.eps_u * inv_k * detail::norm_sq(ops.mass, du);
    terms[kFrictionV] = -params.eps_v * inv_k * detail::norm_sq(ops.mass, dv);
    terms[kCouplingIncrement] = -0.5 * params.alpha * detail::norm_sq(ops.mass, dw);
    return terms;
}

/// |(E^{n+1} - E^n) - sum of dissipation terms|. Zero up to round-off
/// whenever the three levels come from an exact step without sources.
inline double dissipation_identity_residual(const LevelTriple& lv, const Operators& ops, const SchemeParams& params) {
    const double e_old = energy(LevelPair{lv.u_prev, lv.u_curr, lv.v_prev, lv.v_curr}, ops, params).E;
    const double e_new = energy(LevelPair{lv.u_curr, lv.u_next, lv.v_curr, lv.v_next}, ops, params).E;
    const auto terms = dissipation_terms(lv, ops, params);
    const double rhs = std::accumulate(terms.begin(), terms.end(), 0.0);
    return std::abs((e_new - e_old) - rhs);
}

struct LyapunovParams {
    double N_weight = 1.0;
    double beta = 0.0;

    void validate() const {
        if (!(N_weight > 0.0) || !(beta > 0.0)) throw InvalidArgument("Lyapunov weights must be positive");
    }

    bool operator==(const LyapunovParams&) const = default;
};

/// L = N E + beta ((u^{n+1} - u^n)/k, u^{n+1})_M + beta ((v^{n+1} - v^n)/k, v^{n+1})_M
inline double lyapunov(const LevelPair& levels, const Operators& ops, const SchemeParams& params,
                       const LyapunovParams& lp) {
    const double E = energy(levels, ops, params).E;
    const double inv_k = 1.0 / params.k;
    const double f = lp.beta * ops.mass.inner(detail::scaled_difference(levels.u_new, levels.u_old, inv_k), levels.u_new) +
                     lp.beta * ops.mass.inner(detail::scaled_difference(levels.v_new, levels.v_old, inv_k), levels.v_new);
    return lp.N_weight * E + f;
}

struct DecayFit {
    /// ln E ~ log_C - gamma t
    double gamma = 0.0;
    double log_C = 0.0;
    std::size_t n_start = 0;
    std::size_t n_end = 0;
    /// RMS of the log-linear fit residual.
    double residual = 0.0;
    std::size_t samples = 0;
};

/// Least-squares fit of ln E against t over the trailing `window_fraction`
/// of the history. Records with E <= 0 are skipped.
inline DecayFit fit_decay_rate(std::span<const EnergyRecord> history, double window_fraction = 0.5) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw InvalidArgument("window fraction must lie in (0, 1]");
    const auto positive = std::count_if(history.begin(), history.end(), [](const EnergyRecord& r) { return r.E > 0.0; });
    if (positive < 3) throw InsufficientData("decay fit needs at least 3 records with positive energy");

    const std::size_t count = history.size();
    const auto first = static_cast<std::size_t>(std::floor((1.0 - window_fraction) * static_cast<double>(count)));
    std::vector<double> ts, ys;
    for (std::size_t i = first; i < count; ++i) {
        if (history[i].E > 0.0) {
            ts.push_back(history[i].t);
            ys.push_back(std::log(history[i].E));
        }
    }
    if (ts.size() < 3) throw InsufficientData("fewer than 3 positive energy records in the fit window");

    const double m = static_cast<double>(ts.size());
    const double t_mean = std::accumulate(ts.begin(), ts.end(), 0.0) / m;
    const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - t_mean) * (ts[i] - t_mean);
        sty += (ts[i] - t_mean) * (ys[i] - y_mean);
    }
    if (!(stt > 0.0)) throw InsufficientData("fit window has no spread in time");
    const double slope = sty / stt;

    DecayFit fit;
    fit.gamma = -slope;
    fit.log_C = y_mean - slope * t_mean;
    fit.n_start = history[first].n;
    fit.n_end = history[count - 1].n;
    fit.samples = ts.size();
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ys[i] - (fit.log_C + slope * ts[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    return fit;
}

}  // namespace dampwave
