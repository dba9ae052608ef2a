#pragma once

// P1 mass and stiffness assembly on interior (Dirichlet-eliminated)
// unknowns, nodal interpolation and load vectors.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dampwave/errors.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/sparse.hpp"

namespace dampwave {

template <int Dim>
using CellGeometry = std::array<Point, Dim + 1>;

template <int Dim>
using ElementMatrix = std::array<std::array<double, Dim + 1>, Dim + 1>;

using ScalarField = std::function<double(const Point&)>;

namespace detail {

template <int Dim>
double checked_measure(const CellGeometry<Dim>& g) {
    double measure = 0.0;
    if constexpr (Dim == 1) {
        measure = std::abs(g[1][0] - g[0][0]);
    } else {
        measure = std::abs(signed_area(g[0], g[1], g[2]));
    }
    if (!(measure > 0.0) || !std::isfinite(measure)) throw AssemblyError("degenerate cell (zero measure)");
    return measure;
}

}  // namespace detail

/// Exact integrals of products of barycentric basis functions:
/// |K| / ((d+1)(d+2)) * (1 + delta_ij).
template <int Dim>
ElementMatrix<Dim> element_mass(const CellGeometry<Dim>& g) {
    static_assert(Dim == 1 || Dim == 2);
    const double measure = detail::checked_measure<Dim>(g);
    const double scale = measure / ((Dim + 1) * (Dim + 2));
    ElementMatrix<Dim> m{};
    for (int i = 0; i <= Dim; ++i)
        for (int j = 0; j <= Dim; ++j) m[i][j] = scale * (i == j ? 2.0 : 1.0);
    return m;
}

/// Gradients of the barycentric basis functions (constant on the cell).
template <int Dim>
std::array<std::array<double, Dim>, Dim + 1> barycentric_gradients(const CellGeometry<Dim>& g) {
    std::array<std::array<double, Dim>, Dim + 1> grad{};
    if constexpr (Dim == 1) {
        const double length = g[1][0] - g[0][0];
        if (!(length != 0.0)) throw AssemblyError("degenerate cell (zero measure)");
        grad[1][0] = 1.0 / length;
        grad[0][0] = -grad[1][0];
    } else {
        const double twice_area = 2.0 * detail::signed_area(g[0], g[1], g[2]);
        if (!(twice_area != 0.0)) throw AssemblyError("degenerate cell (zero measure)");
        // grad(lambda_i) is the rotated opposite edge over twice the area.
        for (int i = 1; i <= 2; ++i) {
            const Point& a = g[(i + 1) % 3];
            const Point& b = g[(i + 2) % 3];
            grad[i] = {(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area};
        }
        grad[0] = {-(grad[1][0] + grad[2][0]), -(grad[1][1] + grad[2][1])};
    }
    return grad;
}

/// |K| * grad(phi_i) . grad(phi_j)
template <int Dim>
ElementMatrix<Dim> element_stiffness(const CellGeometry<Dim>& g) {
    static_assert(Dim == 1 || Dim == 2);
    const double measure = detail::checked_measure<Dim>(g);
    const auto grad = barycentric_gradients<Dim>(g);
    ElementMatrix<Dim> k{};
    for (int i = 0; i <= Dim; ++i) {
        for (int j = 0; j <= Dim; ++j) {
            double s = 0.0;
            for (int d = 0; d < Dim; ++d) s += grad[i][d] * grad[j][d];
            k[i][j] = measure * s;
        }
    }
    return k;
}

template <int Dim>
CellGeometry<Dim> cell_geometry(const Mesh& mesh, const Cell& cell) {
    CellGeometry<Dim> g{};
    for (int i = 0; i <= Dim; ++i) g[i] = mesh.vertices[cell[static_cast<std::size_t>(i)]];
    return g;
}

enum class Restriction { Interior, Full };

namespace detail {

template <int Dim, typename ElementFn>
SparseMatrix assemble(const Mesh& mesh, Restriction restriction, ElementFn element) {
    const DofMap dofs(mesh);
    const std::size_t n = restriction == Restriction::Interior ? dofs.size() : mesh.num_vertices();
    if (n == 0) throw AssemblyError("system has no interior degrees of freedom");
    std::vector<Triplet> triplets;
    triplets.reserve(mesh.num_cells() * (Dim + 1) * (Dim + 1));
    for (const auto& cell : mesh.cells) {
        const ElementMatrix<Dim> local = element(cell_geometry<Dim>(mesh, cell));
        for (int i = 0; i <= Dim; ++i) {
            const std::size_t vi = cell[static_cast<std::size_t>(i)];
            const std::size_t row = restriction == Restriction::Interior ? dofs[vi] : vi;
            if (row == DofMap::kBoundary) continue;
            for (int j = 0; j <= Dim; ++j) {
                const std::size_t vj = cell[static_cast<std::size_t>(j)];
                const std::size_t col = restriction == Restriction::Interior ? dofs[vj] : vj;
                if (col == DofMap::kBoundary) continue;
                triplets.push_back({row, col, local[i][j]});
            }
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

}  // namespace detail

/// Consistent P1 mass matrix. Interior restriction eliminates Dirichlet rows and columns.
inline SparseMatrix assemble_mass(const Mesh& mesh, Restriction restriction = Restriction::Interior) {
    if (mesh.dim == 1) return detail::assemble<1>(mesh, restriction, element_mass<1>);
    if (mesh.dim == 2) return detail::assemble<2>(mesh, restriction, element_mass<2>);
    throw InvalidArgument("unsupported mesh dimension " + std::to_string(mesh.dim));
}

inline SparseMatrix assemble_stiffness(const Mesh& mesh, Restriction restriction = Restriction::Interior) {
    if (mesh.dim == 1) return detail::assemble<1>(mesh, restriction, element_stiffness<1>);
    if (mesh.dim == 2) return detail::assemble<2>(mesh, restriction, element_stiffness<2>);
    throw InvalidArgument("unsupported mesh dimension " + std::to_string(mesh.dim));
}

/// Values of g at the interior vertices, in DOF order.
inline Vector interpolate(const Mesh& mesh, const ScalarField& g) {
    const DofMap dofs(mesh);
    Vector out(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        out[i] = g(mesh.vertices[dofs.vertex(i)]);
        if (!std::isfinite(out[i])) throw InvalidArgument("field is not finite at interior vertex " + std::to_string(i));
    }
    return out;
}

/// Values of g at every vertex.
inline Vector interpolate_all(const Mesh& mesh, const ScalarField& g) {
    Vector out(mesh.num_vertices());
    for (std::size_t v = 0; v < out.size(); ++v) {
        out[v] = g(mesh.vertices[v]);
        if (!std::isfinite(out[v])) throw InvalidArgument("field is not finite at vertex " + std::to_string(v));
    }
    return out;
}

/// Precomputed pieces for repeated load assembly on one mesh.
class LoadAssembler {
public:
    explicit LoadAssembler(const Mesh& mesh)
        : mesh_(&mesh), dofs_(mesh), full_mass_(assemble_mass(mesh, Restriction::Full)) {}

    /// (f_h, phi_i) for interior i, f_h the P1 interpolant of f over all vertices.
    [[nodiscard]] Vector operator()(const ScalarField& f) const {
        const Vector nodal = interpolate_all(*mesh_, f);
        const Vector full = full_mass_ * nodal;
        Vector out(dofs_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = full[dofs_.vertex(i)];
        return out;
    }

private:
    const Mesh* mesh_;
    DofMap dofs_;
    SparseMatrix full_mass_;
};

inline Vector assemble_load(const Mesh& mesh, const ScalarField& f) { return LoadAssembler(mesh)(f); }

}  // namespace dampwave
