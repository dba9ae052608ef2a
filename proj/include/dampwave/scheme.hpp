#pragma once

// Fully implicit two-level-history scheme for the weakly coupled damped
// wave system
//
//   u_tt - c^2 Lap u + eps_u u_t + alpha (u - v) = f_u
//   v_tt - c^2 Lap v + eps_v v_t + alpha (v - u) = f_v
//
// with homogeneous Dirichlet data. Each step solves one monolithic SPD
// system for (u^{n+1}, v^{n+1}).

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dampwave/assembly.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/solver.hpp"
#include "dampwave/sparse.hpp"

namespace dampwave {

struct SchemeParams {
    double c = 1.0;
    double eps_u = 0.0;
    double eps_v = 0.0;
    double alpha = 1.0;
    double k = 0.0;
    double T = 0.0;
    std::size_t steps = 0;

    /// k = T / steps.
    static SchemeParams with_steps(double c, double eps_u, double eps_v, double alpha, double T, std::size_t steps) {
        if (steps == 0) throw InvalidArgument("number of time steps must be positive");
        SchemeParams p{c, eps_u, eps_v, alpha, T / static_cast<double>(steps), T, steps};
        p.validate();
        return p;
    }

    /// Picks steps = round(T / k); T must be an integer multiple of k.
    static SchemeParams with_step_size(double c, double eps_u, double eps_v, double alpha, double k, double T) {
        if (!(k > 0.0) || !(T > 0.0)) throw InvalidArgument("k and T must be positive");
        const double ratio = std::round(T / k);
        if (ratio < 1.0 || std::abs(ratio * k - T) > 1e-12 * T)
            throw InvalidArgument("T must be an integer multiple of k");
        return with_steps(c, eps_u, eps_v, alpha, T, static_cast<std::size_t>(ratio));
    }

    void validate() const {
        if (!(c > 0.0)) throw InvalidArgument("wave speed c must be positive");
        if (!(eps_u >= 0.0)) throw InvalidArgument("eps_u must be non-negative");
        if (!(eps_v >= 0.0)) throw InvalidArgument("eps_v must be non-negative");
        if (!(alpha > 0.0)) throw InvalidArgument("coupling alpha must be positive");
        if (!(k > 0.0) || !(T > 0.0)) throw InvalidArgument("k and T must be positive");
        if (steps == 0 || std::abs(static_cast<double>(steps) * k - T) > 1e-12 * T)
            throw InvalidArgument("steps * k must equal T");
    }

    [[nodiscard]] double time(std::size_t n) const { return static_cast<double>(n) * k; }

    bool operator==(const SchemeParams&) const = default;
};

/// Levels n-1 and n of both unknowns.
struct State {
    std::size_t n = 0;
    Vector u_prev, u_curr, v_prev, v_curr;

    [[nodiscard]] std::size_t size() const noexcept { return u_curr.size(); }
    bool operator==(const State&) const = default;
};

/// The 2N x 2N step matrix [[A_u, -alpha M], [-alpha M, A_v]] with
/// A_w = (1/k^2 + eps_w/k + alpha) M + c^2 K.
class BlockOperator {
public:
    BlockOperator(const SparseMatrix& mass, const SparseMatrix& stiffness, const SchemeParams& params)
        : n_(mass.rows()), params_(params) {
        params.validate();
        if (mass.rows() != stiffness.rows() || mass.cols() != stiffness.cols() || mass.rows() != mass.cols())
            throw InvalidArgument("mass and stiffness dimensions disagree");
        const double k = params.k;
        const SparseMatrix a_u =
            linear_combination(1.0 / (k * k) + params.eps_u / k + params.alpha, mass, params.c * params.c, stiffness);
        const SparseMatrix a_v =
            linear_combination(1.0 / (k * k) + params.eps_v / k + params.alpha, mass, params.c * params.c, stiffness);

        std::vector<Triplet> t;
        t.reserve(2 * a_u.nonzeros() + 2 * mass.nonzeros());
        const auto append = [&t](const SparseMatrix& block, double scale, std::size_t row0, std::size_t col0) {
            const auto rp = block.row_ptr();
            const auto ci = block.col_idx();
            const auto v = block.values();
            for (std::size_t i = 0; i < block.rows(); ++i)
                for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) t.push_back({row0 + i, col0 + ci[p], scale * v[p]});
        };
        append(a_u, 1.0, 0, 0);
        append(mass, -params.alpha, 0, n_);
        append(mass, -params.alpha, n_, 0);
        append(a_v, 1.0, n_, n_);
        matrix_ = SparseMatrix::from_triplets(2 * n_, 2 * n_, std::move(t));
    }

    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] std::size_t block_size() const noexcept { return n_; }
    [[nodiscard]] const SchemeParams& params() const noexcept { return params_; }

private:
    std::size_t n_;
    SchemeParams params_;
    SparseMatrix matrix_;
};

struct InitialData {
    ScalarField u0, u1, v0, v1;

    static InitialData zero() {
        const ScalarField z = [](const Point&) { return 0.0; };
        return {z, z, z, z};
    }
};

/// u^0 = I u0, u^1 = u^0 + k I u1, and likewise for v. Returns n = 1.
inline State initialize(const Mesh& mesh, const SchemeParams& params, const InitialData& data) {
    State s;
    s.n = 1;
    s.u_prev = interpolate(mesh, data.u0);
    s.v_prev = interpolate(mesh, data.v0);
    const Vector du = interpolate(mesh, data.u1);
    const Vector dv = interpolate(mesh, data.v1);
    s.u_curr.resize(s.u_prev.size());
    s.v_curr.resize(s.v_prev.size());
    for (std::size_t i = 0; i < s.u_prev.size(); ++i) {
        s.u_curr[i] = s.u_prev[i] + params.k * du[i];
        s.v_curr[i] = s.v_prev[i] + params.k * dv[i];
    }
    return s;
}

/// Load vectors added to the right-hand side of one step.
struct StepSources {
    std::span<const double> f_u;
    std::span<const double> f_v;
};

/// Advances (n-1, n) -> (n, n+1).
inline State step(const State& state, const BlockOperator& op, const SparseMatrix& mass, const SolverConfig& cfg,
                  std::optional<StepSources> sources = std::nullopt) {
    const std::size_t n = op.block_size();
    if (state.n < 1) throw InvalidArgument("stepping needs levels 0 and 1");
    if (state.u_prev.size() != n || state.u_curr.size() != n || state.v_prev.size() != n || state.v_curr.size() != n)
        throw InvalidArgument("state size does not match the operator");
    if (mass.rows() != n) throw InvalidArgument("mass matrix size does not match the operator");
    if (sources && (sources->f_u.size() != n || sources->f_v.size() != n))
        throw InvalidArgument("source vectors do not match the operator size");

    const SchemeParams& p = op.params();
    const double inv_k2 = 1.0 / (p.k * p.k);
    Vector wu(n), wv(n);
    for (std::size_t i = 0; i < n; ++i) {
        wu[i] = (2.0 * state.u_curr[i] - state.u_prev[i]) * inv_k2 + p.eps_u / p.k * state.u_curr[i];
        wv[i] = (2.0 * state.v_curr[i] - state.v_prev[i]) * inv_k2 + p.eps_v / p.k * state.v_curr[i];
    }
    Vector rhs(2 * n);
    mass.multiply(wu, std::span<double>(rhs).first(n));
    mass.multiply(wv, std::span<double>(rhs).subspan(n));
    if (sources) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] += sources->f_u[i];
            rhs[n + i] += sources->f_v[i];
        }
    }

    const Vector x = solve_spd(op.matrix(), rhs, cfg);
    State next;
    next.n = state.n + 1;
    next.u_prev = state.u_curr;
    next.v_prev = state.v_curr;
    next.u_curr.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    next.v_curr.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    return next;
}

/// Space-time source fields; loads are assembled at the new time level.
struct Forcing {
    std::function<double(const Point&, double)> f_u;
    std::function<double(const Point&, double)> f_v;
};

/// Raised by run() with the index of the step that failed.
class StepFailure : public SolverFailure {
public:
    StepFailure(const SolverFailure& cause, std::size_t step_index)
        : SolverFailure("step " + std::to_string(step_index) + ": " + cause.what(), cause.residual(),
                        cause.iterations()),
          step_index_(step_index) {}

    [[nodiscard]] std::size_t step_index() const noexcept { return step_index_; }

private:
    std::size_t step_index_;
};

using StateObserver = std::function<void(const State&)>;

/// Observes the initial state (n = 1), then every state up to n = steps.
inline State run(const Mesh& mesh, const SchemeParams& params, const InitialData& data, const SolverConfig& cfg,
                 const StateObserver& observer, const std::optional<Forcing>& forcing = std::nullopt) {
    params.validate();
    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const BlockOperator op(mass, stiffness, params);
    std::optional<LoadAssembler> loads;
    if (forcing) loads.emplace(mesh);

    State state = initialize(mesh, params, data);
    if (observer) observer(state);
    while (state.n < params.steps) {
        const double t_next = params.time(state.n + 1);
        try {
            if (forcing) {
                const Vector f_u = (*loads)([&](const Point& x) { return forcing->f_u(x, t_next); });
                const Vector f_v = (*loads)([&](const Point& x) { return forcing->f_v(x, t_next); });
                state = step(state, op, mass, cfg, StepSources{f_u, f_v});
            } else {
                state = step(state, op, mass, cfg);
            }
        } catch (const SolverFailure& e) {
            throw StepFailure(e, state.n + 1);
        }
        if (observer) observer(state);
    }
    return state;
}

}  // namespace dampwave
