#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "thinrod/limit1d.hpp"

using namespace thinrod;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

int sign_changes(const std::vector<double>& v) {
    int n = 0;
    double last = 0.0;
    for (double x : v) {
        if (x == 0.0) continue;
        if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++n;
        last = x;
    }
    return n;
}

} // namespace

TEST(Limit1D, ConstantWeight) {
    const auto p = solve_limit(Weight1D::constant(1.0, 0, 1), 0, 1, 3, 1000);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_NEAR(p[n - 1].lambda0, n * n * kPi2, 1e-3 * n * n * kPi2);
        EXPECT_GE(p[n - 1].lambda0, n * n * kPi2);
        EXPECT_EQ(p[n - 1].index, n);
    }
}

TEST(Limit1D, UniformP1ClosedForm) {
    // consistent-mass P1 on a uniform grid: (6/h^2)(1 - cos kh)/(2 + cos kh)
    const int E = 64;
    const auto p = solve_limit(Weight1D::constant(2.5, 0, 2), 0, 2, 5, E);
    const double h = 2.0 / E;
    for (int n = 1; n <= 5; ++n) {
        const double c = std::cos(n * std::numbers::pi / 2.0 * h);
        EXPECT_NEAR(p[n - 1].lambda0, 6.0 / (h * h) * (1 - c) / (2 + c), 1e-9 * p[n - 1].lambda0);
    }
}

TEST(Limit1D, StepWeight) {
    const auto w = Weight1D::pieces({0, 0.5, 1}, {4, 1});
    const auto p = solve_limit(w, 0, 1, 1, 1000);
    EXPECT_NEAR(p[0].lambda0, kPi2, 1e-3 * kPi2);
    const auto o = shooting_oracle(w, 0, 1, 3);
    EXPECT_NEAR(o[0], kPi2, 1e-9);
}

TEST(Limit1D, OracleSinglePiece) {
    const auto o = shooting_oracle(Weight1D::constant(1.0, 0, 1), 0, 1, 6);
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(o[n - 1], n * n * kPi2, 1e-9);
}

TEST(Limit1D, OracleMirrorSymmetry) {
    const auto a = shooting_oracle(Weight1D::pieces({0, 0.5, 1}, {4, 1}), 0, 1, 6);
    const auto b = shooting_oracle(Weight1D::pieces({0, 0.5, 1}, {1, 4}), 0, 1, 6);
    for (int n = 0; n < 6; ++n) EXPECT_NEAR(a[n], b[n], 1e-9);
    const auto c = shooting_oracle(Weight1D::pieces({0, 0.3, 0.6, 1}, {2, 1, 5}), 0, 1, 5);
    const auto d = shooting_oracle(Weight1D::pieces({0, 0.4, 0.7, 1}, {5, 1, 2}), 0, 1, 5);
    for (int n = 0; n < 5; ++n) EXPECT_NEAR(c[n], d[n], 1e-9);
}

TEST(Limit1D, FemAboveOracleWithSecondOrderConvergence) {
    for (const auto& w : {Weight1D::pieces({0, 0.5, 1}, {4, 1}),
                          Weight1D::pieces({0, 0.3, 0.6, 1}, {2, 1, 5}),
                          Weight1D::pieces({-1, 0.25, 2}, {0.5, 3})}) {
        const double a = w.breaks.front(), b = w.breaks.back();
        const auto o = shooting_oracle(w, a, b, 4);
        const auto f1 = solve_limit(w, a, b, 4, 200);
        const auto f2 = solve_limit(w, a, b, 4, 400);
        for (int n = 0; n < 4; ++n) {
            EXPECT_GT(f1[n].lambda0, o[n]);
            EXPECT_GT(f2[n].lambda0, o[n]);
            EXPECT_GE((f1[n].lambda0 - o[n]) / (f2[n].lambda0 - o[n]), 3.5) << n;
        }
    }
}

TEST(Limit1D, ScalingInvariance) {
    const auto w = Weight1D::pieces({0, 0.3, 0.6, 1}, {2, 1, 5});
    const auto a = solve_limit(w, 0, 1, 4, 300);
    const auto b = solve_limit(w.scaled(7.5), 0, 1, 4, 300);
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(a[n].lambda0, b[n].lambda0, 1e-11 * a[n].lambda0);
    const auto c = solve_limit(Weight1D::constant(4, 0, 1), 0, 1, 3, 200);
    const auto d = solve_limit(Weight1D::constant(1, 0, 1), 0, 1, 3, 200);
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(c[n].lambda0, d[n].lambda0, 1e-11 * c[n].lambda0);
}

TEST(Limit1D, EigenfunctionProperties) {
    const auto d = RodDomain::profiled_height(0, 1, 0.1, Profile::sin_bump(1.5, 0.4));
    const Weight1D w = weight_from_domain(d);
    const auto p = solve_limit(w, 0, 1, 5, 1000);
    for (const auto& e : p) {
        EXPECT_EQ(e.values.front(), 0.0);
        EXPECT_EQ(e.values.back(), 0.0);
        EXPECT_EQ(sign_changes(e.values), e.index - 1);
        // int w U^2 with 3-point Gauss on each element
        const double g = std::sqrt(0.6);
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < e.nodes.size(); ++i) {
            const double h = e.nodes[i + 1] - e.nodes[i];
            for (auto [t, wt] : {std::pair{-g, 5.0 / 9}, {0.0, 8.0 / 9}, {g, 5.0 / 9}}) {
                const double tt = 0.5 * (1 + t);
                const double u = (1 - tt) * e.values[i] + tt * e.values[i + 1];
                s += 0.5 * h * wt * w(e.nodes[i] + tt * h) * u * u;
            }
        }
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
    for (std::size_t i = 1; i < p.size(); ++i) EXPECT_LT(p[i - 1].lambda0, p[i].lambda0);
}

TEST(Limit1D, NodesOnDiscontinuities) {
    const auto w = Weight1D::pieces({0, 1.0 / 3.0, 1}, {3, 1});
    const auto p = solve_limit(w, 0, 1, 2, 10);
    bool hit = false;
    for (double x : p[0].nodes) hit = hit || x == 1.0 / 3.0;
    EXPECT_TRUE(hit);
    EXPECT_EQ(p[0].nodes.size(), 11u);
}

TEST(Limit1D, WeightFromDomain) {
    const Weight1D prism = weight_from_domain(RodDomain::prism(0, 1, 0.1));
    EXPECT_TRUE(prism.piecewise_constant());
    EXPECT_EQ(prism(0.4), 1.0);
    const Weight1D tp = weight_from_domain(RodDomain::two_prism(0, 1, 0.1));
    ASSERT_EQ(tp.values.size(), 2u);
    EXPECT_EQ(tp.values[0], 4.0);
    EXPECT_EQ(tp.values[1], 1.0);
    EXPECT_EQ(tp(0.5), 1.0);
    EXPECT_EQ(tp.c0, 1.0);
    EXPECT_EQ(tp.c1, 4.0);
    const auto box = RodDomain::profiled_box(
        0, 1, 0.1, {Profile::constant(0.5), Profile::sin_bump(0.6, 0.2), Profile::constant(0.4),
                    Profile::constant(0.7)});
    const Weight1D bw = weight_from_domain(box);
    EXPECT_NEAR(bw(0.5), (0.5 + 0.8) * (0.4 + 0.7), 1e-15);
}

TEST(Limit1D, Errors) {
    const auto w = Weight1D::constant(1, 0, 1);
    EXPECT_THROW(solve_limit(w, 0, 1, 0, 100), ConfigError);
    EXPECT_THROW(solve_limit(w, 0, 1, 5, 19), ConfigError);
    EXPECT_THROW(solve_limit(w, 0, 1, 1, 7), ConfigError);
    const auto many = Weight1D::pieces({0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1},
                                       {1, 2, 1, 2, 1, 2, 1, 2, 1, 2});
    EXPECT_THROW(solve_limit(many, 0, 1, 1, 8), ConfigError);
    EXPECT_THROW(Weight1D::pieces({0, 1}, {-1}), ConfigError);
    Weight1D smooth = weight_from_domain(
        RodDomain::profiled_height(0, 1, 0.1, Profile::sin_bump(1.5, 0.4)));
    EXPECT_THROW(shooting_oracle(smooth, 0, 1, 2), ConfigError);
}
