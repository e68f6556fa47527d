#include <cmath>

#include <gtest/gtest.h>

#include "thinrod/analytic.hpp"
#include "thinrod/modes.hpp"

using namespace thinrod;

namespace {

EigenPair from_vector(Vec u, const SparsePair& sp, int index = 1) {
    u /= std::sqrt(u.dot(sp.M * u));
    EigenPair p;
    p.vector = u;
    p.lambda = u.dot(sp.K * u);
    p.index = index;
    return p;
}

} // namespace

TEST(Modes, ClassifyDefaults) {
    EXPECT_EQ(classify(0.0), ModeClass::Longitudinal);
    EXPECT_EQ(classify(100.0 / 101.0), ModeClass::Transverse);
    EXPECT_EQ(classify(0.3), ModeClass::Mixed);
    EXPECT_EQ(classify(0.1), ModeClass::Mixed);
    EXPECT_EQ(classify(0.5), ModeClass::Mixed);
    EXPECT_EQ(classify(0.05, {0.01, 0.2}), ModeClass::Mixed);
}

TEST(Modes, ThresholdValidation) {
    EXPECT_THROW(classify(0.2, {0.0, 0.5}), ConfigError);
    EXPECT_THROW(classify(0.2, {0.5, 0.5}), ConfigError);
    EXPECT_THROW(classify(0.2, {0.1, 1.0}), ConfigError);
}

TEST(Modes, AxialAnalyticModeHasNoTransverseEnergy) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {32, 4, 4});
    const SparsePair sp = assemble(m, BcMode::Mixed, 0.1);
    const auto p = from_vector(interpolate(make_mode(BcMode::Mixed, 1, 0.1, 1, 0, 0), m, sp), sp);
    const auto [ax, tr] = energy_split(p, sp);
    EXPECT_LE(tr, 1e-6 * p.lambda);
    EXPECT_NEAR(ax + tr, p.lambda, 1e-12 * p.lambda);
}

TEST(Modes, TransverseAnalyticMode) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {64, 8, 8});
    const SparsePair sp = assemble(m, BcMode::Mixed, 0.1);
    const auto p = from_vector(interpolate(make_mode(BcMode::Mixed, 1, 0.1, 1, 1, 0), m, sp), sp);
    const double f = transverse_fraction(energy_split(p, sp));
    EXPECT_NEAR(f, 100.0 / 101.0, 0.02 * 100.0 / 101.0);
    EXPECT_EQ(classify(f), ModeClass::Transverse);
}

TEST(Modes, NeumannConstantMode) {
    const HexMesh m = build_mesh(RodDomain::two_prism(0, 1, 0.1), {8, 4, 4});
    const SparsePair sp = assemble(m, BcMode::Neumann, 0.1);
    const auto p = from_vector(Vec::Ones(sp.size()), sp, 0);
    const auto [ax, tr] = energy_split(p, sp);
    EXPECT_NEAR(ax, 0.0, 1e-12);
    EXPECT_NEAR(tr, 0.0, 1e-10);
    // stretched volumes 4 * 1/2 and 1 * 1/2
    const auto [mass, part] = localization(p, m, sp, {0.5});
    ASSERT_EQ(mass.size(), 2u);
    EXPECT_NEAR(mass[0], 0.8, 1e-12);
    EXPECT_NEAR(mass[1], 0.2, 1e-12);
    EXPECT_NEAR(part, 1.0 / (0.64 + 0.04), 1e-10);
}

TEST(Modes, ParticipationExamples) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {8, 2, 2});
    const SparsePair sp = assemble(m, BcMode::Neumann, 0.1);
    // supported on y1 <= 0.5 only
    Vec u = Vec::Zero(sp.size());
    for (int i = 0; i < sp.size(); ++i)
        if (m.nodes[sp.free_to_node[i]][0] <= 0.25) u(i) = 1.0;
    auto [mass, part] = localization(from_vector(u, sp), m, sp, {0.5});
    EXPECT_NEAR(mass[0], 1.0, 1e-14);
    EXPECT_NEAR(part, 1.0, 1e-12);
    std::tie(mass, part) = localization(from_vector(Vec::Ones(sp.size()), sp), m, sp, {0.5});
    EXPECT_NEAR(mass[0] + mass[1], 1.0, 1e-12);
    EXPECT_NEAR(part, 2.0, 1e-10);
}

TEST(Modes, LocalizationErrors) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {4, 2, 2});
    const SparsePair sp = assemble(m, BcMode::Neumann, 0.1);
    const auto p = from_vector(Vec::Ones(sp.size()), sp);
    EXPECT_THROW(localization(p, m, sp, {0.6, 0.4}), ConfigError);
    EXPECT_THROW(localization(p, m, sp, {1.0}), ConfigError);
    EXPECT_THROW(localization(p, m, sp, {0.4, 0.45}), ConfigError); // no centroid in (0.4, 0.45]
}

TEST(Modes, BlocksRequired) {
    const HexMesh m = build_mesh(RodDomain::prism(0, 1, 0.1), {4, 2, 2});
    const SparsePair sp = assemble(m, BcMode::Mixed, 0.1, false);
    const auto p = from_vector(Vec::Ones(sp.size()), sp);
    EXPECT_THROW(energy_split(p, sp), ConfigError);
}

TEST(Modes, FractionsSumToOne) {
    const HexMesh m = build_mesh(RodDomain::two_prism(0, 1, 0.2), {16, 4, 4});
    const SparsePair sp = assemble(m, BcMode::Mixed, 0.2);
    for (const auto& p : solve_lowest(sp, 6)) {
        const ModeReport r = make_report(p, m, sp, {0.5});
        EXPECT_NEAR(r.axial_energy + r.transverse_energy, p.lambda, 1e-7 * p.lambda);
        double s = 0.0;
        for (double f : r.axial_mass) s += f;
        EXPECT_NEAR(s, 1.0, 1e-10);
        EXPECT_GE(r.participation, 1.0 - 1e-12);
        EXPECT_LE(r.participation, 2.0 + 1e-12);
    }
}
