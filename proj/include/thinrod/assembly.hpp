#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thinrod/errors.hpp"
#include "thinrod/mesh.hpp"

namespace thinrod {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Mat8 = Eigen::Matrix<double, 8, 8>;

enum class BcMode { Mixed, Neumann, Dirichlet };

inline std::string to_string(BcMode bc) {
    switch (bc) {
    case BcMode::Mixed: return "mixed";
    case BcMode::Neumann: return "neumann";
    case BcMode::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

inline BcMode parse_bc(const std::string& s) {
    if (s == "mixed") return BcMode::Mixed;
    if (s == "neumann") return BcMode::Neumann;
    if (s == "dirichlet") return BcMode::Dirichlet;
    throw ConfigError("unknown boundary condition '" + s + "' (mixed|neumann|dirichlet)");
}

/// Boundary tags carrying u = 0 under each regime.
inline std::vector<FaceTag> constrained_tags(BcMode bc) {
    switch (bc) {
    case BcMode::Mixed: return {FaceTag::Base0, FaceTag::Base1};
    case BcMode::Neumann: return {};
    case BcMode::Dirichlet: return {FaceTag::Base0, FaceTag::Base1, FaceTag::Lateral};
    }
    return {};
}

struct ElementMatrices {
    Mat8 axial;      // int d_y1 N_a d_y1 N_b
    Mat8 transverse; // int (d_y2 N_a d_y2 N_b + d_y3 N_a d_y3 N_b), no eps factor
    Mat8 mass;       // int N_a N_b
};

/// Trilinear element integrals with 2x2x2 Gauss quadrature.
inline ElementMatrices element_matrices(const HexMesh& m, int cell) {
    ElementMatrices e;
    e.axial.setZero();
    e.transverse.setZero();
    e.mass.setZero();
    const double g = 0.5 / std::sqrt(3.0);
    for (int q = 0; q < 8; ++q) {
        const std::array<double, 3> xi{0.5 + (kCorner[q][0] ? g : -g),
                                       0.5 + (kCorner[q][1] ? g : -g),
                                       0.5 + (kCorner[q][2] ? g : -g)};
        Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
        Eigen::Matrix<double, 8, 1> N;
        Eigen::Matrix<double, 8, 3> dNdxi;
        for (int a = 0; a < 8; ++a) {
            std::array<double, 3> f, df;
            for (int d = 0; d < 3; ++d) {
                f[d] = kCorner[a][d] ? xi[d] : 1.0 - xi[d];
                df[d] = kCorner[a][d] ? 1.0 : -1.0;
            }
            N(a) = f[0] * f[1] * f[2];
            dNdxi(a, 0) = df[0] * f[1] * f[2];
            dNdxi(a, 1) = f[0] * df[1] * f[2];
            dNdxi(a, 2) = f[0] * f[1] * df[2];
            const Point3& x = m.nodes[m.cells[cell][a]];
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) J(r, s) += x[r] * dNdxi(a, s);
        }
        const double detJ = J.determinant();
        if (!(detJ > 0.0)) throw GeometryError("element_matrices: non-positive Jacobian");
        // grad_y N = J^{-T} grad_xi N
        const Eigen::Matrix<double, 8, 3> G = dNdxi * J.inverse();
        const double w = detJ / 8.0; // reference cube volume 1, eight equal weights
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                e.axial(a, b) += w * (G(a, 0) * G(b, 0));
                e.transverse(a, b) += w * (G(a, 1) * G(b, 1) + G(a, 2) * G(b, 2));
                e.mass(a, b) += w * (N(a) * N(b));
            }
    }
    return e;
}

/// Unconstrained matrices over every mesh node; eps-independent.
struct FullSystem {
    SpMat axial;
    SpMat transverse;
    SpMat mass;
    std::vector<int> boundary_nodes; // sorted
    std::vector<int> node_tag_mask;  // bit t set when node touches a face tagged t
};

inline FullSystem assemble_full(const HexMesh& m) {
    const int n = static_cast<int>(m.num_nodes());
    std::vector<Eigen::Triplet<double>> ta, tt, tm;
    ta.reserve(m.num_cells() * 64);
    tt.reserve(m.num_cells() * 64);
    tm.reserve(m.num_cells() * 64);
    // fixed element order and fixed within-element order keep the sums reproducible
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const ElementMatrices e = element_matrices(m, static_cast<int>(c));
        const auto& nodes = m.cells[c];
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                ta.emplace_back(nodes[a], nodes[b], e.axial(a, b));
                tt.emplace_back(nodes[a], nodes[b], e.transverse(a, b));
                tm.emplace_back(nodes[a], nodes[b], e.mass(a, b));
            }
    }
    FullSystem fs;
    fs.axial.resize(n, n);
    fs.transverse.resize(n, n);
    fs.mass.resize(n, n);
    fs.axial.setFromTriplets(ta.begin(), ta.end());
    fs.transverse.setFromTriplets(tt.begin(), tt.end());
    fs.mass.setFromTriplets(tm.begin(), tm.end());
    fs.boundary_nodes = m.boundary_nodes();
    fs.node_tag_mask.assign(n, 0);
    for (const auto& f : m.boundary_faces)
        for (int c : kFaceCorners[f.local_face])
            fs.node_tag_mask[m.cells[f.cell][c]] |= 1 << static_cast<int>(f.tag);
    return fs;
}

/// Reduced generalized eigenproblem K u = lambda M u on the free DOFs.
struct SparsePair {
    SpMat K;
    SpMat M;
    SpMat K_axial;      // u^T K_axial u = ||d_y1 u||^2
    SpMat K_transverse; // u^T K_transverse u = eps^-2 (||d_y2 u||^2 + ||d_y3 u||^2)
    bool has_blocks = false;
    std::vector<int> free_to_node;
    std::vector<int> node_to_free; // -1 for constrained nodes
    double eps = 1.0;
    BcMode bc = BcMode::Mixed;

    int size() const { return static_cast<int>(free_to_node.size()); }

    /// Nodal field over the whole mesh with constrained nodes set to zero.
    std::vector<double> expand(const Vec& u) const {
        std::vector<double> out(node_to_free.size(), 0.0);
        for (std::size_t i = 0; i < node_to_free.size(); ++i)
            if (node_to_free[i] >= 0) out[i] = u(node_to_free[i]);
        return out;
    }
};

namespace detail {

inline SpMat restrict_to(const SpMat& A, const std::vector<int>& node_to_free, int nf) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A.nonZeros());
    for (int r = 0; r < A.outerSize(); ++r) {
        const int fr = node_to_free[r];
        if (fr < 0) continue;
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            const int fc = node_to_free[it.col()];
            if (fc >= 0) t.emplace_back(fr, fc, it.value());
        }
    }
    SpMat R(nf, nf);
    R.setFromTriplets(t.begin(), t.end());
    return R;
}

} // namespace detail

/// Removes the rows and columns of constrained nodes. K = K_axial + eps^-2 K_transverse.
inline SparsePair eliminate_dirichlet(const FullSystem& fs, std::span<const int> constrained,
                                      double eps, BcMode bc, bool retain_blocks = true) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("assemble: eps must lie in (0, 1]");
    const int n = static_cast<int>(fs.mass.rows());
    SparsePair p;
    p.eps = eps;
    p.bc = bc;
    p.node_to_free.assign(n, 0);
    for (int c : constrained) {
        if (c < 0 || c >= n || !std::binary_search(fs.boundary_nodes.begin(),
                                                   fs.boundary_nodes.end(), c))
            throw std::logic_error("eliminate_dirichlet: constrained node " + std::to_string(c) +
                                   " is not a boundary node");
        p.node_to_free[c] = -1;
    }
    for (int i = 0; i < n; ++i)
        if (p.node_to_free[i] == 0) {
            p.node_to_free[i] = static_cast<int>(p.free_to_node.size());
            p.free_to_node.push_back(i);
        }
    const int nf = p.size();
    if (nf == 0) throw ConfigError("assemble: no free degrees of freedom remain");

    const double coef = 1.0 / (eps * eps);
    SpMat ka = detail::restrict_to(fs.axial, p.node_to_free, nf);
    SpMat kt = detail::restrict_to(fs.transverse, p.node_to_free, nf);
    kt *= coef;
    p.M = detail::restrict_to(fs.mass, p.node_to_free, nf);
    p.K = ka + kt;
    if (retain_blocks) {
        p.K_axial = std::move(ka);
        p.K_transverse = std::move(kt);
        p.has_blocks = true;
    }
    return p;
}

inline std::vector<int> constrained_nodes(const FullSystem& fs, BcMode bc) {
    int mask = 0;
    for (FaceTag t : constrained_tags(bc)) mask |= 1 << static_cast<int>(t);
    std::vector<int> out;
    for (std::size_t i = 0; i < fs.node_tag_mask.size(); ++i)
        if (fs.node_tag_mask[i] & mask) out.push_back(static_cast<int>(i));
    return out;
}

inline SparsePair assemble(const FullSystem& fs, BcMode bc, double eps,
                           bool retain_blocks = true) {
    return eliminate_dirichlet(fs, constrained_nodes(fs, bc), eps, bc, retain_blocks);
}

inline SparsePair assemble(const HexMesh& m, BcMode bc, double eps, bool retain_blocks = true) {
    return assemble(assemble_full(m), bc, eps, retain_blocks);
}

/// Matrix Market coordinate real symmetric, lower triangle, 1-based.
inline void write_matrix_market(std::ostream& os, const SpMat& A,
                                const std::string& comment = "") {
    std::size_t nnz = 0;
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it)
            if (it.col() <= r) ++nnz;
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    if (!comment.empty()) os << "% " << comment << '\n';
    os << A.rows() << ' ' << A.cols() << ' ' << nnz << '\n';
    char buf[64];
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it)
            if (it.col() <= r) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1,
                              static_cast<int>(it.col()) + 1, it.value());
                os << buf;
            }
}

inline void write_matrix_market(const std::string& path, const SpMat& A,
                                const std::string& comment = "") {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_matrix_market: cannot open " + path);
    write_matrix_market(os, A, comment);
}

} // namespace thinrod
