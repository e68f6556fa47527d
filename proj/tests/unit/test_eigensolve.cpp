#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "thinrod/eigensolve.hpp"

using namespace thinrod;

namespace {

// consistent-mass P1 eigenvalue of the mode k on a uniform 1D grid of width h
double p1_eig(double k, double h) {
    const double c = std::cos(k * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

std::vector<double> dense_eigs(const SparsePair& p) {
    const Eigen::MatrixXd K(p.K), M(p.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + K.rows());
    return v;
}

} // namespace

TEST(Eigensolve, MatchesDenseSolver) {
    const HexMesh m = build_mesh(
        RodDomain::profiled_height(0, 1, 0.3, Profile::sin_bump(1.5, 0.4)), {10, 2, 3});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.3);
    const auto ref = dense_eigs(p);
    const auto got = solve_lowest(p, 10, 1e-10);
    ASSERT_EQ(got.size(), 10u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(got[i].lambda, ref[i], 1e-9 * ref[i]) << i;
        EXPECT_LE(got[i].residual, 1e-10);
        EXPECT_EQ(got[i].index, i + 1);
    }
}

TEST(Eigensolve, TensorProductPrismSpectrum) {
    // discrete prism eigenvalues are sums of 1D consistent-mass P1 eigenvalues
    const int n1 = 12, n2 = 3, n3 = 2;
    const double eps = 0.5;
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, eps), {n1, n2, n3});
    const SparsePair p = assemble(m, BcMode::Mixed, eps);
    std::vector<double> expect;
    for (int a = 1; a < n1; ++a)
        for (int r = 0; r <= n2; ++r)
            for (int s = 0; s <= n3; ++s)
                expect.push_back(p1_eig(a * std::numbers::pi, 1.0 / n1) +
                                 (p1_eig(r * std::numbers::pi, 1.0 / n2) +
                                  p1_eig(s * std::numbers::pi, 1.0 / n3)) /
                                     (eps * eps));
    std::sort(expect.begin(), expect.end());
    const auto got = solve_lowest(p, 12);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(got[i].lambda, expect[i], 1e-8 * expect[i]) << i;
}

TEST(Eigensolve, DegenerateCopiesFound) {
    // n2 = n3 makes every (r, s) / (s, r) pair an exact double eigenvalue
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.5), {6, 3, 3});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.5);
    const auto ref = dense_eigs(p);
    const auto got = solve_lowest(p, 14);
    for (int i = 0; i < 14; ++i) EXPECT_NEAR(got[i].lambda, ref[i], 1e-8 * ref[i]) << i;
    const auto cl = clusters(got, 1e-8);
    bool pair_seen = false;
    for (const auto& c : cl) pair_seen = pair_seen || c.size() == 2;
    EXPECT_TRUE(pair_seen);
}

TEST(Eigensolve, MOrthonormalAndSigned) {
    const HexMesh m = build_mesh(RodDomain::two_prism(0, 1, 0.2), {8, 4, 4});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.2);
    const auto got = solve_lowest(p, 6);
    for (std::size_t i = 0; i < got.size(); ++i) {
        for (std::size_t j = 0; j < got.size(); ++j) {
            const double g = got[i].vector.dot(p.M * got[j].vector);
            EXPECT_NEAR(g, i == j ? 1.0 : 0.0, 1e-9);
        }
        Eigen::Index k;
        got[i].vector.cwiseAbs().maxCoeff(&k);
        EXPECT_GT(got[i].vector(k), 0.0);
    }
    // first mode of a connected domain does not change sign
    EXPECT_GE(got[0].vector.minCoeff(), -1e-10);
}

TEST(Eigensolve, NeumannZeroMode) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.2), {8, 2, 2});
    const SparsePair p = assemble(m, BcMode::Neumann, 0.2);
    const auto got = solve_lowest(p, 5);
    ASSERT_EQ(got.size(), 6u);
    EXPECT_EQ(got[0].index, 0);
    EXPECT_LE(std::abs(got[0].lambda), 1e-8 * got[1].lambda);
    const auto ref = dense_eigs(p);
    for (int i = 1; i <= 5; ++i) EXPECT_NEAR(got[i].lambda, ref[i], 1e-8 * ref[i]);
    for (int i = 1; i <= 5; ++i) EXPECT_NEAR(got[0].vector.dot(p.M * got[i].vector), 0.0, 1e-9);
}

TEST(Eigensolve, Deterministic) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {16, 4, 4});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.1);
    const auto a = solve_lowest(p, 8);
    const auto b = solve_lowest(p, 8);
    for (int i = 0; i < 8; ++i) {
        EXPECT_EQ(a[i].lambda, b[i].lambda);
        EXPECT_EQ((a[i].vector - b[i].vector).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Eigensolve, TooManyModes) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {2, 1, 1});
    const SparsePair p = assemble(m, BcMode::Mixed, 0.1);
    EXPECT_THROW(solve_lowest(p, 5), ConfigError);
    EXPECT_EQ(solve_lowest(p, 4).size(), 4u);
}

TEST(Eigensolve, SubspaceAngle) {
    const int n = 6;
    SpMat M(n, n);
    M.setIdentity();
    std::vector<Vec> a{Vec::Unit(n, 0), Vec::Unit(n, 1)};
    std::vector<Vec> rot{(Vec::Unit(n, 0) + Vec::Unit(n, 1)) / std::sqrt(2.0),
                         (Vec::Unit(n, 0) - Vec::Unit(n, 1)) / std::sqrt(2.0)};
    std::vector<Vec> orth{Vec::Unit(n, 2), Vec::Unit(n, 3)};
    EXPECT_NEAR(subspace_angle(a, rot, M), 0.0, 1e-12);
    EXPECT_NEAR(subspace_angle(a, orth, M), std::numbers::pi / 2, 1e-12);
    std::vector<Vec> tilt{std::cos(0.1) * Vec::Unit(n, 0) + std::sin(0.1) * Vec::Unit(n, 4),
                          Vec::Unit(n, 1)};
    EXPECT_NEAR(subspace_angle(a, tilt, M), 0.1, 1e-12);
    EXPECT_THROW(subspace_angle(a, std::vector<Vec>{Vec::Unit(n, 0)}, M), ConfigError);
}
