#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinrod/errors.hpp"
#include "thinrod/geometry.hpp"

namespace thinrod {

enum class FaceTag { Base0, Base1, Lateral };

inline std::string to_string(FaceTag t) {
    switch (t) {
    case FaceTag::Base0: return "base0";
    case FaceTag::Base1: return "base1";
    case FaceTag::Lateral: return "lateral";
    }
    return "unknown";
}

struct BoundaryFace {
    int cell;
    int local_face; // 0..5 = -y1, +y1, -y2, +y2, -y3, +y3
    FaceTag tag;
};

// Reference-cube corners in VTK_HEXAHEDRON order.
inline constexpr std::array<std::array<int, 3>, 8> kCorner{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

// Outward-oriented corner lists per local face.
inline constexpr std::array<std::array<int, 4>, 6> kFaceCorners{{
    {0, 4, 7, 3}, {1, 2, 6, 5}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 3, 2, 1}, {4, 5, 6, 7},
}};

inline constexpr std::array<std::array<int, 2>, 12> kEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

/// Structured trilinear hexahedral mesh of the stretched domain G.
struct HexMesh {
    std::vector<Point3> nodes;
    std::vector<std::array<int, 8>> cells;
    std::vector<BoundaryFace> boundary_faces;
    std::array<int, 3> resolution{0, 0, 0};

    std::vector<double> axial;    // y1 of every node layer, size n1 + 1
    std::vector<int> node_layer;  // axial layer of each node
    std::vector<int> cell_layer;  // axial slab of each cell

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_cells() const { return cells.size(); }

    std::size_t count_faces(FaceTag t) const {
        return static_cast<std::size_t>(std::count_if(
            boundary_faces.begin(), boundary_faces.end(),
            [t](const BoundaryFace& f) { return f.tag == t; }));
    }

    /// Sorted node ids touching any boundary face whose tag is in `tags`.
    std::vector<int> boundary_nodes(std::span<const FaceTag> tags) const {
        std::vector<char> mark(nodes.size(), 0);
        for (const auto& f : boundary_faces) {
            if (std::find(tags.begin(), tags.end(), f.tag) == tags.end()) continue;
            for (int c : kFaceCorners[f.local_face]) mark[cells[f.cell][c]] = 1;
        }
        std::vector<int> out;
        for (std::size_t i = 0; i < mark.size(); ++i)
            if (mark[i]) out.push_back(static_cast<int>(i));
        return out;
    }

    std::vector<int> boundary_nodes() const {
        const std::array<FaceTag, 3> all{FaceTag::Base0, FaceTag::Base1, FaceTag::Lateral};
        return boundary_nodes(all);
    }

    Point3 centroid(int cell) const {
        Point3 c{0, 0, 0};
        for (int n : cells[cell])
            for (int d = 0; d < 3; ++d) c[d] += nodes[n][d] / 8.0;
        return c;
    }
};

namespace detail {

/// d x / d xi at reference point xi for the trilinear map of one cell.
inline std::array<std::array<double, 3>, 3> cell_jacobian(const HexMesh& m, int cell,
                                                          const std::array<double, 3>& xi) {
    std::array<std::array<double, 3>, 3> J{};
    for (int a = 0; a < 8; ++a) {
        const auto& c = kCorner[a];
        std::array<double, 3> f, df;
        for (int d = 0; d < 3; ++d) {
            f[d] = c[d] ? xi[d] : 1.0 - xi[d];
            df[d] = c[d] ? 1.0 : -1.0;
        }
        const std::array<double, 3> dN{df[0] * f[1] * f[2], f[0] * df[1] * f[2],
                                       f[0] * f[1] * df[2]};
        const Point3& x = m.nodes[m.cells[cell][a]];
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) J[r][s] += x[r] * dN[s];
    }
    return J;
}

inline double det3(const std::array<std::array<double, 3>, 3>& J) {
    return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
           J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
           J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

inline std::vector<double> axial_layers(const RodDomain& d, int n1) {
    const double L = d.length();
    std::vector<double> y(n1 + 1);
    for (int i = 0; i <= n1; ++i) y[i] = d.ell0() + L * i / n1;
    y[n1] = d.ell1();
    for (double x : d.discontinuities()) {
        const double pos = (x - d.ell0()) / L * n1;
        const double r = std::round(pos);
        if (std::abs(pos - r) > 1e-9 * n1)
            throw ConfigError("build_mesh: n1 does not place a node layer on the jump at x1 = " +
                              std::to_string(x));
        y[static_cast<int>(r)] = x;
    }
    return y;
}

} // namespace detail

/// Conforming structured mesh of G. Profiled kinds map a reference box node-wise
/// through the bound functions; TwoPrism activates the sub-grid of the narrow square
/// beyond the junction.
inline HexMesh build_mesh(const RodDomain& d, std::array<int, 3> res) {
    const auto [n1, n2, n3] = res;
    if (n1 < 1 || n2 < 1 || n3 < 1) throw ConfigError("build_mesh: resolution must be >= 1");
    if (d.kind() != DomainKind::TwoPrism && !d.discontinuities().empty())
        throw GeometryError("build_mesh: discontinuous profiles are only meshable as two_prism");

    const TwoPrismSection* tp = std::get_if<TwoPrismSection>(&d.section());
    int inner2_lo = 0, inner2_hi = n2, inner3_lo = 0, inner3_hi = n3;
    if (tp) {
        auto inner_index = [&](int n, int& lo, int& hi) {
            const double q = (1.0 - tp->inner_half / tp->outer_half) * 0.5 * n;
            const double r = std::round(q);
            if (std::abs(q - r) > 1e-9 * n || r < 1)
                throw ConfigError("build_mesh: transverse resolution must put nodes on the inner "
                                  "square (multiples of 4 for the standard junction)");
            lo = static_cast<int>(r);
            hi = n - lo;
        };
        inner_index(n2, inner2_lo, inner2_hi);
        inner_index(n3, inner3_lo, inner3_hi);
    }

    HexMesh m;
    m.resolution = res;
    m.axial = detail::axial_layers(d, n1);

    auto cell_active = [&](int i, int j, int k) {
        if (!tp) return true;
        if (0.5 * (m.axial[i] + m.axial[i + 1]) < tp->junction) return true;
        return j >= inner2_lo && j < inner2_hi && k >= inner3_lo && k < inner3_hi;
    };

    const int s2 = n3 + 1, s1 = (n2 + 1) * (n3 + 1);
    auto sidx = [&](int i, int j, int k) { return i * s1 + j * s2 + k; };
    std::vector<int> id(static_cast<std::size_t>(n1 + 1) * s1, -1);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k)
                if (cell_active(i, j, k))
                    for (const auto& c : kCorner) id[sidx(i + c[0], j + c[1], k + c[2])] = 0;

    for (int i = 0; i <= n1; ++i) {
        const double y1 = m.axial[i];
        const Rect r = d.rect_at(y1);
        if (!(r.hi2 > r.lo2 && r.hi3 > r.lo3))
            throw GeometryError("build_mesh: degenerate section at x1 = " + std::to_string(y1));
        for (int j = 0; j <= n2; ++j)
            for (int k = 0; k <= n3; ++k) {
                int& slot = id[sidx(i, j, k)];
                if (slot < 0) continue;
                slot = static_cast<int>(m.nodes.size());
                Point3 p;
                p[0] = y1;
                if (tp) {
                    const double o = tp->outer_half;
                    p[1] = -o + 2.0 * o * j / n2;
                    p[2] = -o + 2.0 * o * k / n3;
                } else {
                    p[1] = j == n2 ? r.hi2 : r.lo2 + (r.hi2 - r.lo2) * j / n2;
                    p[2] = k == n3 ? r.hi3 : r.lo3 + (r.hi3 - r.lo3) * k / n3;
                }
                m.nodes.push_back(p);
                m.node_layer.push_back(i);
            }
    }

    const int c2 = n3, c1 = n2 * n3;
    std::vector<int> cid(static_cast<std::size_t>(n1) * c1, -1);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) {
                if (!cell_active(i, j, k)) continue;
                std::array<int, 8> cell;
                for (int a = 0; a < 8; ++a)
                    cell[a] = id[sidx(i + kCorner[a][0], j + kCorner[a][1], k + kCorner[a][2])];
                cid[i * c1 + j * c2 + k] = static_cast<int>(m.cells.size());
                m.cells.push_back(cell);
                m.cell_layer.push_back(i);
            }

    auto active_cell = [&](int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i >= n1 || j >= n2 || k >= n3) return false;
        return cid[i * c1 + j * c2 + k] >= 0;
    };
    static constexpr std::array<std::array<int, 3>, 6> kNbr{
        {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) {
                const int c = cid[i * c1 + j * c2 + k];
                if (c < 0) continue;
                for (int f = 0; f < 6; ++f) {
                    if (active_cell(i + kNbr[f][0], j + kNbr[f][1], k + kNbr[f][2])) continue;
                    FaceTag tag = FaceTag::Lateral;
                    if (f == 0 && i == 0) tag = FaceTag::Base0;
                    if (f == 1 && i == n1 - 1) tag = FaceTag::Base1;
                    m.boundary_faces.push_back({c, f, tag});
                }
            }

    for (std::size_t c = 0; c < m.cells.size(); ++c)
        for (const auto& k : kCorner) {
            const std::array<double, 3> xi{double(k[0]), double(k[1]), double(k[2])};
            if (!(detail::det3(detail::cell_jacobian(m, static_cast<int>(c), xi)) > 0.0))
                throw GeometryError("build_mesh: non-positive Jacobian in cell " +
                                    std::to_string(c));
        }
    return m;
}

struct MeshQuality {
    double min_jacobian;
    double max_aspect;
};

inline MeshQuality mesh_quality(const HexMesh& m) {
    MeshQuality q{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
        for (const auto& k : kCorner) {
            const std::array<double, 3> xi{double(k[0]), double(k[1]), double(k[2])};
            q.min_jacobian = std::min(
                q.min_jacobian, detail::det3(detail::cell_jacobian(m, static_cast<int>(c), xi)));
        }
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& e : kEdges) {
            const Point3& a = m.nodes[m.cells[c][e[0]]];
            const Point3& b = m.nodes[m.cells[c][e[1]]];
            const double len = std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
            lo = std::min(lo, len);
            hi = std::max(hi, len);
        }
        q.max_aspect = std::max(q.max_aspect, hi / lo);
    }
    return q;
}

/// Sum of cell volumes (2x2x2 Gauss on det J; exact for the trilinear maps used here).
inline double mesh_volume(const HexMesh& m) {
    const double g = 0.5 / std::sqrt(3.0);
    double vol = 0.0;
    for (std::size_t c = 0; c < m.cells.size(); ++c)
        for (int q = 0; q < 8; ++q) {
            const std::array<double, 3> xi{0.5 + (kCorner[q][0] ? g : -g),
                                           0.5 + (kCorner[q][1] ? g : -g),
                                           0.5 + (kCorner[q][2] ? g : -g)};
            vol += detail::det3(detail::cell_jacobian(m, static_cast<int>(c), xi)) / 8.0;
        }
    return vol;
}

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Legacy ASCII VTK 3.0 unstructured grid; optional point scalar field.
inline void write_vtk(std::ostream& os, const HexMesh& m, std::span<const double> point_data = {},
                      const std::string& name = "u", const std::string& title = "thinrod mesh") {
    if (!point_data.empty() && point_data.size() != m.nodes.size())
        throw ConfigError("write_vtk: point data size does not match node count");
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << m.nodes.size() << " double\n";
    for (const auto& p : m.nodes)
        os << format_g17(p[0]) << ' ' << format_g17(p[1]) << ' ' << format_g17(p[2]) << '\n';
    os << "CELLS " << m.cells.size() << ' ' << m.cells.size() * 9 << '\n';
    for (const auto& c : m.cells) {
        os << 8;
        for (int n : c) os << ' ' << n;
        os << '\n';
    }
    os << "CELL_TYPES " << m.cells.size() << '\n';
    for (std::size_t c = 0; c < m.cells.size(); ++c) os << "12\n";
    if (!point_data.empty()) {
        os << "POINT_DATA " << m.nodes.size() << "\nSCALARS " << name
           << " double 1\nLOOKUP_TABLE default\n";
        for (double v : point_data) os << format_g17(v) << '\n';
    }
}

inline void write_vtk(const std::string& path, const HexMesh& m,
                      std::span<const double> point_data = {}, const std::string& name = "u") {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_vtk: cannot open " + path);
    write_vtk(os, m, point_data, name);
    if (!os) throw std::runtime_error("write_vtk: write failed for " + path);
}

} // namespace thinrod
