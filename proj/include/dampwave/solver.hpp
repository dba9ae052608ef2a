#pragma once

// SPD solves for the implicit step: Jacobi-preconditioned conjugate
// gradients, with a dense Cholesky factorization as the small-system
// fallback and cross-check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dampwave/errors.hpp"
#include "dampwave/sparse.hpp"

namespace dampwave {

enum class SolverMethod { ConjugateGradient, DenseCholesky };

struct SolverConfig {
    double rel_tol = 1e-12;
    /// Unset means 10 * n.
    std::optional<std::size_t> max_iter;
    SolverMethod method = SolverMethod::ConjugateGradient;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must lie in (0, 1)");
        if (max_iter && *max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    }

    [[nodiscard]] std::size_t iteration_limit(std::size_t n) const { return max_iter.value_or(10 * n); }

    bool operator==(const SolverConfig&) const = default;
};

struct SolveReport {
    Vector x;
    std::size_t iterations = 0;
    /// ||Ax - b||_2 of the returned x.
    double residual = 0.0;
};

/// ||A x - b||_2
inline double residual_norm(const SparseMatrix& A, std::span<const double> x, std::span<const double> b) {
    if (A.rows() != A.cols() || x.size() != A.cols() || b.size() != A.rows())
        throw InvalidArgument("residual dimension mismatch");
    Vector r = A * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return norm2(r);
}

namespace detail {

inline SolveReport conjugate_gradient(const SparseMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
    const std::size_t n = b.size();
    const double target = cfg.rel_tol * norm2(b);
    const std::size_t limit = cfg.iteration_limit(n);

    Vector inv_diag = A.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0.0)) throw SolverFailure("non-positive diagonal entry; matrix is not SPD", INFINITY, 0);
        d = 1.0 / d;
    }

    SolveReport out;
    out.x.assign(n, 0.0);
    Vector r(b.begin(), b.end());
    Vector z(n), p(n), q(n);
    std::size_t it = 0;

    // Outer loop restarts from the true residual whenever the recursively
    // updated one has drifted below target but the true one has not.
    while (true) {
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = dot(r, z);
        while (norm2(r) > target && it < limit) {
            A.multiply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) throw SolverFailure("matrix is not positive definite", norm2(r), it);
            const double step = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                out.x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            ++it;
            for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        out.residual = residual_norm(A, out.x, b);
        out.iterations = it;
        if (out.residual <= target) return out;
        if (it >= limit)
            throw SolverFailure("conjugate gradients did not converge in " + std::to_string(limit) +
                                    " iterations (residual " + std::to_string(out.residual) + ")",
                                out.residual, it);
        r = A * out.x;
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    }
}

inline SolveReport dense_cholesky(const SparseMatrix& A, std::span<const double> b) {
    const std::size_t n = b.size();
    std::vector<double> L = A.to_dense();
    for (std::size_t j = 0; j < n; ++j) {
        double d = L[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (!(d > 0.0)) throw SolverFailure("Cholesky factorization hit a non-positive pivot", INFINITY, 0);
        d = std::sqrt(d);
        L[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = L[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = s / d;
        }
    }
    SolveReport out;
    out.x.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) out.x[i] -= L[i * n + k] * out.x[k];
        out.x[i] /= L[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) out.x[i] -= L[k * n + i] * out.x[k];
        out.x[i] /= L[i * n + i];
    }
    out.residual = residual_norm(A, out.x, b);
    return out;
}

}  // namespace detail

/// Solves A x = b for symmetric positive definite A, with iteration and
/// residual bookkeeping. A zero right-hand side returns exactly zero.
inline SolveReport solve_spd_report(const SparseMatrix& A, std::span<const double> b, const SolverConfig& cfg = {}) {
    cfg.validate();
    if (A.rows() != A.cols() || b.size() != A.rows()) throw InvalidArgument("solve_spd: dimension mismatch");
    if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) return {Vector(b.size(), 0.0), 0, 0.0};
    if (cfg.method == SolverMethod::DenseCholesky) {
        SolveReport out = detail::dense_cholesky(A, b);
        if (out.residual > cfg.rel_tol * norm2(b))
            throw SolverFailure("Cholesky solve residual above tolerance", out.residual, 0);
        return out;
    }
    return detail::conjugate_gradient(A, b, cfg);
}

inline Vector solve_spd(const SparseMatrix& A, std::span<const double> b, const SolverConfig& cfg = {}) {
    return solve_spd_report(A, b, cfg).x;
}

}  // namespace dampwave
