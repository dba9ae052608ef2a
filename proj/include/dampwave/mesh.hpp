#pragma once

// Conforming simplicial meshes of [0,1] and of polygons: structured
// generators, midpoint refinement, validation and a plain-text format.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dampwave/errors.hpp"

namespace dampwave {

/// Vertex coordinates; the second component is 0 for interval meshes.
using Point = std::array<double, 2>;

/// Vertex indices of a cell; only the first dim+1 entries are used.
using Cell = std::array<std::size_t, 3>;

struct Mesh {
    int dim = 0;
    std::vector<Point> vertices;
    std::vector<Cell> cells;
    std::vector<bool> boundary;
    double h = 0.0;

    [[nodiscard]] std::size_t num_vertices() const noexcept { return vertices.size(); }
    [[nodiscard]] std::size_t num_cells() const noexcept { return cells.size(); }
    [[nodiscard]] std::size_t vertices_per_cell() const noexcept { return static_cast<std::size_t>(dim) + 1; }

    bool operator==(const Mesh&) const = default;
};

namespace detail {

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

inline double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

inline std::pair<std::size_t, std::size_t> edge_key(std::size_t a, std::size_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

/// Length (1D) or area (2D) of a cell; signed in 2D.
inline double cell_measure(const Mesh& mesh, const Cell& cell) {
    const auto& v = mesh.vertices;
    if (mesh.dim == 1) return v[cell[1]][0] - v[cell[0]][0];
    return detail::signed_area(v[cell[0]], v[cell[1]], v[cell[2]]);
}

inline double cell_diameter(const Mesh& mesh, const Cell& cell) {
    const auto& v = mesh.vertices;
    if (mesh.dim == 1) return std::abs(v[cell[1]][0] - v[cell[0]][0]);
    return std::max({detail::distance(v[cell[0]], v[cell[1]]), detail::distance(v[cell[1]], v[cell[2]]),
                     detail::distance(v[cell[2]], v[cell[0]])});
}

/// h_K / rho_K with rho_K the inscribed-circle diameter. Intervals give 1.
inline double cell_shape_ratio(const Mesh& mesh, const Cell& cell) {
    if (mesh.dim == 1) return 1.0;
    const auto& v = mesh.vertices;
    const double a = detail::distance(v[cell[0]], v[cell[1]]);
    const double b = detail::distance(v[cell[1]], v[cell[2]]);
    const double c = detail::distance(v[cell[2]], v[cell[0]]);
    const double area = std::abs(cell_measure(mesh, cell));
    const double inscribed_diameter = 4.0 * area / (a + b + c);
    return std::max({a, b, c}) / inscribed_diameter;
}

/// max over cells of h_K / rho_K.
inline double shape_ratio(const Mesh& mesh) {
    double ratio = 0.0;
    for (const auto& cell : mesh.cells) ratio = std::max(ratio, cell_shape_ratio(mesh, cell));
    return ratio;
}

inline double total_measure(const Mesh& mesh) {
    double sum = 0.0;
    for (const auto& cell : mesh.cells) sum += std::abs(cell_measure(mesh, cell));
    return sum;
}

inline double max_diameter(const Mesh& mesh) {
    double h = 0.0;
    for (const auto& cell : mesh.cells) h = std::max(h, cell_diameter(mesh, cell));
    return h;
}

inline std::size_t count_boundary(const Mesh& mesh) {
    return static_cast<std::size_t>(std::count(mesh.boundary.begin(), mesh.boundary.end(), true));
}

/// Checks index ranges, distinctness, positive orientation and
/// combinatorial conformity. Throws MeshError on the first violation.
inline void validate(const Mesh& mesh) {
    if (mesh.dim != 1 && mesh.dim != 2) throw MeshError("mesh dimension must be 1 or 2");
    const std::size_t nv = mesh.num_vertices();
    const std::size_t nc = mesh.vertices_per_cell();
    if (mesh.boundary.size() != nv) throw MeshError("boundary flag count does not match vertex count");
    if (mesh.cells.empty()) throw MeshError("mesh has no cells");

    std::map<std::pair<std::size_t, std::size_t>, int> facet_use;
    std::map<std::array<std::size_t, 3>, std::size_t> seen;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const Cell& cell = mesh.cells[c];
        for (std::size_t i = 0; i < nc; ++i) {
            if (cell[i] >= nv) throw MeshError("cell " + std::to_string(c) + " references vertex out of range");
            for (std::size_t j = 0; j < i; ++j)
                if (cell[i] == cell[j]) throw MeshError("cell " + std::to_string(c) + " repeats a vertex");
        }
        if (!(cell_measure(mesh, cell) > 0.0))
            throw MeshError("cell " + std::to_string(c) + " is degenerate or negatively oriented");

        std::array<std::size_t, 3> sorted{cell[0], cell[1], mesh.dim == 2 ? cell[2] : SIZE_MAX};
        std::sort(sorted.begin(), sorted.end());
        if (!seen.emplace(sorted, c).second) throw MeshError("cell " + std::to_string(c) + " duplicates another cell");

        if (mesh.dim == 2) {
            for (std::size_t i = 0; i < 3; ++i) {
                if (++facet_use[detail::edge_key(cell[i], cell[(i + 1) % 3])] > 2)
                    throw MeshError("edge shared by more than two cells near cell " + std::to_string(c));
            }
        } else {
            for (std::size_t i = 0; i < 2; ++i) {
                if (++facet_use[{cell[i], cell[i]}] > 2)
                    throw MeshError("vertex shared by more than two intervals near cell " + std::to_string(c));
            }
        }
    }
    // Every vertex of a boundary facet has to be flagged.
    for (const auto& [facet, uses] : facet_use) {
        if (uses == 1 && !(mesh.boundary[facet.first] && mesh.boundary[facet.second]))
            throw MeshError("vertex on the domain boundary is not flagged as boundary");
    }
}

/// Uniform partition of [0,1] into n_segments intervals.
inline Mesh generate_unit_interval(std::size_t n_segments) {
    if (n_segments == 0) throw InvalidArgument("unit interval needs at least one segment");
    Mesh mesh;
    mesh.dim = 1;
    const auto n = static_cast<double>(n_segments);
    for (std::size_t i = 0; i <= n_segments; ++i) {
        mesh.vertices.push_back({static_cast<double>(i) / n, 0.0});
        mesh.boundary.push_back(i == 0 || i == n_segments);
    }
    for (std::size_t i = 0; i < n_segments; ++i) mesh.cells.push_back({i, i + 1, 0});
    mesh.h = max_diameter(mesh);
    return mesh;
}

/// (n+1)^2 grid on [0,1]^2, every square cut along its (0,0)-(1,1) diagonal.
inline Mesh generate_unit_square(std::size_t n_per_side) {
    if (n_per_side == 0) throw InvalidArgument("unit square needs at least one cell per side");
    Mesh mesh;
    mesh.dim = 2;
    const std::size_t n = n_per_side;
    const auto nd = static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i <= n; ++i) {
            mesh.vertices.push_back({static_cast<double>(i) / nd, static_cast<double>(j) / nd});
            mesh.boundary.push_back(i == 0 || j == 0 || i == n || j == n);
        }
    }
    const auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    mesh.h = max_diameter(mesh);
    return mesh;
}

/// Splits every interval in two, every triangle into four congruent
/// children through its edge midpoints. Orientation is preserved.
inline Mesh refine_uniform(const Mesh& mesh) {
    validate(mesh);
    Mesh fine;
    fine.dim = mesh.dim;
    fine.vertices = mesh.vertices;
    fine.boundary = mesh.boundary;

    std::map<std::pair<std::size_t, std::size_t>, int> edge_cells;
    if (mesh.dim == 2) {
        for (const auto& cell : mesh.cells)
            for (std::size_t i = 0; i < 3; ++i) ++edge_cells[detail::edge_key(cell[i], cell[(i + 1) % 3])];
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint_of;
    const auto midpoint = [&](std::size_t a, std::size_t b) {
        const auto key = detail::edge_key(a, b);
        if (auto it = midpoint_of.find(key); it != midpoint_of.end()) return it->second;
        const Point& pa = mesh.vertices[key.first];
        const Point& pb = mesh.vertices[key.second];
        fine.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
        fine.boundary.push_back(mesh.dim == 2 && edge_cells[key] == 1);
        const std::size_t id = fine.vertices.size() - 1;
        midpoint_of.emplace(key, id);
        return id;
    };

    for (const auto& cell : mesh.cells) {
        if (mesh.dim == 1) {
            const std::size_t m = midpoint(cell[0], cell[1]);
            fine.cells.push_back({cell[0], m, 0});
            fine.cells.push_back({m, cell[1], 0});
        } else {
            const std::size_t a = cell[0], b = cell[1], c = cell[2];
            const std::size_t ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
            fine.cells.push_back({a, ab, ca});
            fine.cells.push_back({ab, b, bc});
            fine.cells.push_back({ca, bc, c});
            fine.cells.push_back({ab, bc, ca});
        }
    }
    fine.h = max_diameter(fine);
    return fine;
}

/// Maps vertices to interior unknowns; boundary vertices map to kBoundary.
class DofMap {
public:
    static constexpr std::size_t kBoundary = SIZE_MAX;

    explicit DofMap(const Mesh& mesh) : index_(mesh.num_vertices(), kBoundary) {
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            if (!mesh.boundary[v]) {
                index_[v] = interior_.size();
                interior_.push_back(v);
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return interior_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t vertex) const { return index_.at(vertex); }
    [[nodiscard]] bool is_boundary(std::size_t vertex) const { return index_.at(vertex) == kBoundary; }
    /// Vertex index of interior unknown i.
    [[nodiscard]] std::size_t vertex(std::size_t dof) const { return interior_.at(dof); }

private:
    std::vector<std::size_t> index_;
    std::vector<std::size_t> interior_;
};

inline DofMap interior_dof_map(const Mesh& mesh) { return DofMap(mesh); }

// Plain-text mesh format:
//   dim Nv Nc
//   Nv lines: coordinates (dim values) then boundary flag 0/1
//   Nc lines: dim+1 zero-based vertex indices

/// Parses the text mesh format. Triangles are reoriented counter-clockwise.
inline Mesh read_mesh(std::istream& in) {
    Mesh mesh;
    std::size_t nv = 0, nc = 0;
    if (!(in >> mesh.dim >> nv >> nc)) throw MeshError("mesh header must be 'dim Nv Nc'");
    if (mesh.dim != 1 && mesh.dim != 2) throw MeshError("mesh dimension must be 1 or 2");
    mesh.vertices.resize(nv, Point{0.0, 0.0});
    mesh.boundary.resize(nv, false);
    for (std::size_t v = 0; v < nv; ++v) {
        int flag = 0;
        for (int d = 0; d < mesh.dim; ++d)
            if (!(in >> mesh.vertices[v][static_cast<std::size_t>(d)]))
                throw MeshError("bad coordinate for vertex " + std::to_string(v));
        if (!(in >> flag) || (flag != 0 && flag != 1))
            throw MeshError("boundary flag of vertex " + std::to_string(v) + " must be 0 or 1");
        mesh.boundary[v] = flag == 1;
    }
    mesh.cells.resize(nc, Cell{0, 0, 0});
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t i = 0; i < mesh.vertices_per_cell(); ++i) {
            long long idx = 0;
            if (!(in >> idx) || idx < 0) throw MeshError("bad vertex index in cell " + std::to_string(c));
            mesh.cells[c][i] = static_cast<std::size_t>(idx);
        }
        if (mesh.cells[c][0] < nv && mesh.cells[c][1] < nv && (mesh.dim == 1 || mesh.cells[c][2] < nv) &&
            cell_measure(mesh, mesh.cells[c]) < 0.0) {
            if (mesh.dim == 1) std::swap(mesh.cells[c][0], mesh.cells[c][1]);
            else std::swap(mesh.cells[c][1], mesh.cells[c][2]);
        }
    }
    validate(mesh);
    mesh.h = max_diameter(mesh);
    return mesh;
}

inline Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const Mesh& mesh) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << mesh.dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        for (int d = 0; d < mesh.dim; ++d) buf << mesh.vertices[v][static_cast<std::size_t>(d)] << ' ';
        buf << (mesh.boundary[v] ? 1 : 0) << '\n';
    }
    for (const auto& cell : mesh.cells) {
        for (std::size_t i = 0; i < mesh.vertices_per_cell(); ++i) buf << (i ? " " : "") << cell[i];
        buf << '\n';
    }
    out << buf.str();
}

}  // namespace dampwave
