#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "thinrod/geometry.hpp"

using namespace thinrod;

namespace {

RodDomain bump_height() {
    return RodDomain::profiled_height(0.0, 1.0, 0.1, Profile::sin_bump(1.5, 0.4));
}

std::vector<RodDomain> catalog() {
    return {RodDomain::prism(0.0, 1.0, 0.1),
            RodDomain::prism(-0.5, 2.0, 0.3, 2.0, 0.5),
            RodDomain::two_prism(0.0, 1.0, 0.1),
            bump_height(),
            RodDomain::profiled_width(0.0, 2.0, 0.2, Profile::sin_bump(1.0, -0.3, 2.0, 0.4)),
            RodDomain::profiled_box(0.0, 1.0, 0.05,
                                    {Profile::constant(0.5), Profile::sin_bump(0.6, 0.2),
                                     Profile::sin_bump(0.4, 0.1, 3.0), Profile::constant(0.7)})};
}

} // namespace

TEST(Geometry, AreaProfileExamples) {
    EXPECT_DOUBLE_EQ(area_profile(RodDomain::prism(0, 1, 0.1), 0.3), 1.0);
    const auto tp = RodDomain::two_prism(0, 1, 0.1);
    EXPECT_DOUBLE_EQ(area_profile(tp, 0.25), 4.0);
    EXPECT_DOUBLE_EQ(area_profile(tp, 0.75), 1.0);
    EXPECT_NEAR(area_profile(bump_height(), 0.5), 1.9, 1e-15);
}

TEST(Geometry, JunctionIsRightContinuous) {
    const auto tp = RodDomain::two_prism(0, 1, 0.1);
    EXPECT_DOUBLE_EQ(area_profile(tp, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(tp.rect_left_of(0.5).area(), 4.0);
    ASSERT_EQ(tp.discontinuities().size(), 1u);
    EXPECT_DOUBLE_EQ(tp.discontinuities()[0], 0.5);
    EXPECT_TRUE(tp.piecewise_constant());
}

TEST(Geometry, AreaOutsideRangeThrows) {
    const auto d = RodDomain::prism(0, 1, 0.1);
    EXPECT_THROW(area_profile(d, -0.01), DomainError);
    EXPECT_THROW(area_profile(d, 1.01), DomainError);
}

TEST(Geometry, AreaBoundsExamples) {
    auto [a0, a1] = area_bounds(RodDomain::prism(0, 1, 0.1));
    EXPECT_DOUBLE_EQ(a0, 1.0);
    EXPECT_DOUBLE_EQ(a1, 1.0);
    std::tie(a0, a1) = area_bounds(RodDomain::two_prism(0, 1, 0.1));
    EXPECT_DOUBLE_EQ(a0, 1.0);
    EXPECT_DOUBLE_EQ(a1, 4.0);
    std::tie(a0, a1) = area_bounds(bump_height());
    EXPECT_NEAR(a0, 1.5, 1e-14);
    EXPECT_NEAR(a1, 1.9, 1e-14);
}

TEST(Geometry, AreaBoundsBracketSamples) {
    for (const auto& d : catalog()) {
        const auto [c0, c1] = area_bounds(d);
        ASSERT_GT(c0, 0.0);
        for (int i = 0; i <= 1000; ++i) {
            const double x = d.ell0() + d.length() * i / 1000.0;
            const double a = area_profile(d, x);
            EXPECT_LE(c0, a * (1 + 1e-14)) << to_string(d.kind()) << " x=" << x;
            EXPECT_GE(c1, a * (1 - 1e-14)) << to_string(d.kind()) << " x=" << x;
        }
    }
}

TEST(Geometry, StretchExamples) {
    const auto d = RodDomain::prism(0, 1, 0.1);
    const Point3 y = stretch(d, {0.5, 0.05, 0.02});
    EXPECT_DOUBLE_EQ(y[0], 0.5);
    EXPECT_NEAR(y[1], 0.5, 1e-15);
    EXPECT_NEAR(y[2], 0.2, 1e-15);
    const auto d1 = RodDomain::prism(0, 1, 1.0);
    const Point3 x{0.3, 0.7, 0.1};
    EXPECT_EQ(stretch(d1, x), x);
}

TEST(Geometry, StretchRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& d : catalog()) {
        for (int i = 0; i < 100; ++i) {
            const double y1 = d.ell0() + d.length() * (0.001 + 0.998 * u(rng));
            const Rect r = d.rect_at(y1);
            const Point3 y{y1, r.lo2 + (r.hi2 - r.lo2) * u(rng), r.lo3 + (r.hi3 - r.lo3) * u(rng)};
            const Point3 back = stretch(d, unstretch(d, y));
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], y[k], 1e-14 * (1 + std::abs(y[k])));
        }
    }
}

TEST(Geometry, StretchOutsideThrows) {
    const auto d = RodDomain::prism(0, 1, 0.1);
    EXPECT_THROW(stretch(d, {0.5, 0.2, 0.05}), DomainError);
    EXPECT_THROW(unstretch(d, {1.5, 0.5, 0.5}), DomainError);
    // narrow prism beyond the junction excludes the outer corner
    const auto tp = RodDomain::two_prism(0, 1, 0.1);
    EXPECT_NO_THROW(unstretch(tp, {0.25, 0.9, -0.9}));
    EXPECT_THROW(unstretch(tp, {0.75, 0.9, -0.9}), DomainError);
}

TEST(Geometry, ConstructionValidation) {
    EXPECT_THROW(RodDomain::prism(1, 0, 0.1), GeometryError);
    EXPECT_THROW(RodDomain::prism(0, 1, 0.0), GeometryError);
    EXPECT_THROW(RodDomain::prism(0, 1, 1.5), GeometryError);
    EXPECT_THROW(RodDomain::prism(0, 1, 0.1, -1.0), GeometryError);
    EXPECT_THROW(RodDomain::two_prism(0, 1, 0.1, 1.0, 1.5), GeometryError);
    EXPECT_THROW(RodDomain::two_prism(0, 1, 0.1, 1.0, 0.5, 1.0), GeometryError);
    EXPECT_THROW(RodDomain::profiled_height(0, 1, 0.1, Profile::sin_bump(0.2, -0.4)), GeometryError);
}

TEST(Geometry, ProfileBoundsAreExact) {
    const Profile p = Profile::sin_bump(1.0, 0.5, 2.0 * std::numbers::pi, 0.3);
    const auto [lo, hi] = p.bounds(0.0, 1.0);
    EXPECT_NEAR(lo, 0.5, 1e-14);
    EXPECT_NEAR(hi, 1.5, 1e-14);
    const Profile s = Profile::step(2.0, 1.0, 0.4);
    EXPECT_DOUBLE_EQ(s(0.4), 1.0);
    EXPECT_DOUBLE_EQ(s.left_limit(0.4), 2.0);
}
