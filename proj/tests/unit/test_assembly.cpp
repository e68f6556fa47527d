#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "thinrod/assembly.hpp"

using namespace thinrod;

TEST(Assembly, UnitCubeElement) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 1.0), {1, 1, 1});
    const ElementMatrices e = element_matrices(m, 0);
    EXPECT_NEAR(e.mass.sum(), 1.0, 1e-15);
    for (int a = 0; a < 8; ++a) {
        EXPECT_NEAR(e.mass(a, a), 1.0 / 27.0, 1e-15);
        EXPECT_NEAR(e.axial(a, a), 1.0 / 9.0, 1e-15);
        EXPECT_NEAR(e.transverse(a, a), 2.0 / 9.0, 1e-15);
        EXPECT_NEAR(e.axial.row(a).sum(), 0.0, 1e-15);
        EXPECT_NEAR(e.transverse.row(a).sum(), 0.0, 1e-15);
    }
    EXPECT_TRUE(e.axial.isApprox(e.axial.transpose()));
}

TEST(Assembly, BlocksAndSymmetry) {
    const HexMesh m = build_mesh(
        RodDomain::profiled_height(0, 1, 0.2, Profile::sin_bump(1.5, 0.4)), {6, 2, 3});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.2);
    ASSERT_TRUE(p.has_blocks);
    const SpMat diff = p.K - p.K_axial - p.K_transverse;
    EXPECT_LT(diff.norm(), 1e-12 * p.K.norm());
    const SpMat kt = SpMat(p.K.transpose());
    EXPECT_LT((p.K - kt).norm(), 1e-14 * p.K.norm());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        Vec u(p.size());
        for (int i = 0; i < u.size(); ++i) u(i) = g(rng);
        EXPECT_GT(u.dot(p.K * u), 0.0);
        EXPECT_GT(u.dot(p.M * u), 0.0);
        EXPECT_GE(u.dot(p.K_transverse * u), -1e-12);
    }
}

TEST(Assembly, TransverseScalesWithEpsSquared) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {3, 2, 2});
    const FullSystem fs = assemble_full(m);
    const SparsePair a = assemble(fs, BcMode::Mixed, 0.5);
    const SparsePair b = assemble(fs, BcMode::Mixed, 0.25);
    EXPECT_LT((b.K_transverse - 4.0 * a.K_transverse).norm(), 1e-12 * b.K_transverse.norm());
    EXPECT_LT((b.K_axial - a.K_axial).norm(), 1e-15);
    EXPECT_LT((b.M - a.M).norm(), 1e-15);
}

TEST(Assembly, ConstrainedNodeCounts) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {4, 2, 3});
    const FullSystem fs = assemble_full(m);
    EXPECT_EQ(assemble(fs, BcMode::Mixed, 0.1).size(), 60 - 2 * 12);
    EXPECT_EQ(assemble(fs, BcMode::Neumann, 0.1).size(), 60);
    EXPECT_EQ(assemble(fs, BcMode::Dirichlet, 0.1).size(), 3 * 1 * 2);
    // the Neumann matrices annihilate constants
    const SparsePair n = assemble(fs, BcMode::Neumann, 0.1);
    EXPECT_LT((n.K * Vec::Ones(n.size())).norm(), 1e-12);
}

TEST(Assembly, EliminationErrors) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {2, 2, 2});
    const FullSystem fs = assemble_full(m);
    // node (1,1,1) is interior
    const std::vector<int> interior{1 * 9 + 1 * 3 + 1};
    EXPECT_THROW(eliminate_dirichlet(fs, interior, 0.1, BcMode::Mixed), std::logic_error);
    EXPECT_THROW(assemble(fs, BcMode::Mixed, 0.0), ConfigError);
    const HexMesh tiny = build_mesh(RodDomain::prism(0, 1, 0.1), {1, 1, 1});
    EXPECT_THROW(assemble(tiny, BcMode::Dirichlet, 0.1), ConfigError);
}

TEST(Assembly, CellOrderInvariance) {
    HexMesh m = build_mesh(RodDomain::two_prism(0, 1, 0.1), {4, 4, 4});
    const SparsePair a = assemble(m, BcMode::Mixed, 0.1);
    std::reverse(m.cells.begin(), m.cells.end());
    const int last = static_cast<int>(m.num_cells()) - 1;
    for (auto& f : m.boundary_faces) f.cell = last - f.cell;
    const SparsePair b = assemble(m, BcMode::Mixed, 0.1);
    EXPECT_LT((a.K - b.K).norm(), 1e-13 * a.K.norm());
    EXPECT_LT((a.M - b.M).norm(), 1e-13 * a.M.norm());
}

TEST(Assembly, ExpandReinsertsZeros) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {2, 1, 1});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.1);
    const auto full = p.expand(Vec::Ones(p.size()));
    int zeros = 0;
    for (double v : full) zeros += v == 0.0;
    EXPECT_EQ(zeros, 8);
    EXPECT_EQ(full.size(), m.num_nodes());
}

TEST(Assembly, MatrixMarketLowerTriangle) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {2, 1, 1});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.1);
    std::ostringstream os;
    write_matrix_market(os, p.M, "mass");
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "%%MatrixMarket matrix coordinate real symmetric");
    std::getline(is, line);
    EXPECT_EQ(line, "% mass");
    int rows, cols, nnz;
    is >> rows >> cols >> nnz;
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(cols, 4);
    EXPECT_EQ(nnz, 10); // dense 4x4 lower triangle
    double sum = 0.0;
    for (int k = 0; k < nnz; ++k) {
        int r, c;
        double v;
        is >> r >> c >> v;
        EXPECT_GE(r, c);
        EXPECT_GE(c, 1);
        sum += r == c ? v : 2 * v;
    }
    EXPECT_NEAR(sum, p.M.sum(), 1e-15);
}
