#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "thinrod/assembly.hpp"
#include "thinrod/errors.hpp"
#include "thinrod/geometry.hpp"

namespace thinrod {

/// Separable eigenpair of the prism (0, ell1) x (0, eps)^2, indexed by (m, r, s).
///
/// Eigenvalues are stored as exact multiples of pi^2 built from integers and the
/// reciprocals 1/ell1, 1/eps, so that e.g. eps = 0.1 yields 101 exactly.
struct AnalyticMode {
    int m = 0, r = 0, s = 0;
    BcMode bc = BcMode::Mixed;
    double ell1 = 1.0;
    double eps = 1.0;
    double pi2_multiple = 0.0;           // lambda / pi^2
    std::array<double, 3> mu_pi2{0, 0, 0}; // separation constants / pi^2
    double lambda = 0.0;
    std::array<double, 3> mu{0, 0, 0};
    double amplitude = 0.0; // int_G U^2 dy = 1 in stretched coordinates

    auto key() const { return std::tie(pi2_multiple, m, r, s); }
};

inline AnalyticMode make_mode(BcMode bc, double ell1, double eps, int m, int r, int s) {
    const int lo_axial = bc == BcMode::Neumann ? 0 : 1;
    const int lo_trans = bc == BcMode::Dirichlet ? 1 : 0;
    if (m < lo_axial || r < lo_trans || s < lo_trans)
        throw ConfigError("analytic: index out of range for the boundary condition");
    if (!(ell1 > 0.0) || !(eps > 0.0 && eps <= 1.0))
        throw ConfigError("analytic: requires ell1 > 0 and eps in (0, 1]");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double ia = 1.0 / ell1, it = 1.0 / eps;
    AnalyticMode md;
    md.m = m;
    md.r = r;
    md.s = s;
    md.bc = bc;
    md.ell1 = ell1;
    md.eps = eps;
    md.mu_pi2 = {double(m) * m * (ia * ia), double(r) * r * (it * it), double(s) * s * (it * it)};
    md.pi2_multiple = double(m) * m * (ia * ia) + double(r * r + s * s) * (it * it);
    md.lambda = pi2 * md.pi2_multiple;
    md.mu = {pi2 * md.mu_pi2[0], pi2 * md.mu_pi2[1], pi2 * md.mu_pi2[2]};
    // int sin^2 = L/2; int cos^2 = L/2 (index > 0) or L (index 0)
    const double fa = (bc == BcMode::Neumann && m == 0) ? ell1 : 0.5 * ell1;
    const double fr = (bc != BcMode::Dirichlet && r == 0) ? 1.0 : 0.5;
    const double fs = (bc != BcMode::Dirichlet && s == 0) ? 1.0 : 0.5;
    md.amplitude = 1.0 / std::sqrt(fa * fr * fs);
    return md;
}

/// The `count` smallest prism eigenvalues with multiplicity, ascending, ties broken
/// by (m, r, s).
inline std::vector<AnalyticMode> enumerate_sorted(BcMode bc, double ell1, double eps, int count) {
    if (count < 1) throw ConfigError("enumerate_sorted: count must be >= 1");
    if (!(ell1 > 0.0) || !(eps > 0.0 && eps <= 1.0))
        throw ConfigError("enumerate_sorted: requires ell1 > 0 and eps in (0, 1]");
    const int lo_axial = bc == BcMode::Neumann ? 0 : 1;
    const int lo_trans = bc == BcMode::Dirichlet ? 1 : 0;
    const double ia = 1.0 / ell1, it = 1.0 / eps;
    // cutoff (in units of pi^2) large enough to hold `count` modes along the axis alone
    const double axial_top = double(lo_axial + count - 1);
    double cutoff = axial_top * axial_top * ia * ia +
                    2.0 * double(lo_trans) * lo_trans * it * it;
    std::vector<AnalyticMode> modes;
    for (;;) {
        modes.clear();
        // complete enumeration below the cutoff: m <= ell1 sqrt(cutoff), r, s <= eps sqrt(cutoff)
        const int mmax = static_cast<int>(std::floor(ell1 * std::sqrt(cutoff))) + 1;
        const int tmax = static_cast<int>(std::floor(eps * std::sqrt(cutoff))) + 1;
        for (int m = lo_axial; m <= mmax; ++m)
            for (int r = lo_trans; r <= tmax; ++r)
                for (int s = lo_trans; s <= tmax; ++s) {
                    const double v = double(m) * m * (ia * ia) + double(r * r + s * s) * (it * it);
                    if (v <= cutoff) modes.push_back(make_mode(bc, ell1, eps, m, r, s));
                }
        if (static_cast<int>(modes.size()) >= count) break;
        cutoff *= 2.0;
    }
    std::sort(modes.begin(), modes.end(),
              [](const AnalyticMode& a, const AnalyticMode& b) { return a.key() < b.key(); });
    modes.resize(count);
    return modes;
}

/// Normalized eigenfunction at a point of the stretched prism (0, ell1) x (0, 1)^2.
inline double evaluate(const AnalyticMode& md, const Point3& y) {
    const double tol = 1e-12;
    if (y[0] < -tol * md.ell1 || y[0] > md.ell1 * (1 + tol) || y[1] < -tol || y[1] > 1 + tol ||
        y[2] < -tol || y[2] > 1 + tol)
        throw DomainError("analytic evaluate: point outside the stretched prism");
    const double pi = std::numbers::pi;
    const double a = md.m * pi * y[0] / md.ell1;
    const double b = md.r * pi * y[1]; // r pi x2 / eps with x2 = eps y2
    const double c = md.s * pi * y[2];
    switch (md.bc) {
    case BcMode::Mixed: return md.amplitude * std::sin(a) * std::cos(b) * std::cos(c);
    case BcMode::Neumann: return md.amplitude * std::cos(a) * std::cos(b) * std::cos(c);
    case BcMode::Dirichlet: return md.amplitude * std::sin(a) * std::sin(b) * std::sin(c);
    }
    return 0.0;
}

/// Share of the Dirichlet energy carried by the cross-section derivatives.
inline double transverse_fraction(const AnalyticMode& md) {
    if (md.pi2_multiple == 0.0) return 0.0;
    return (md.mu_pi2[1] + md.mu_pi2[2]) / md.pi2_multiple;
}

/// Nodal interpolant of a mode on the free DOFs of an assembled prism problem.
inline Vec interpolate(const AnalyticMode& md, const HexMesh& mesh, const SparsePair& pair) {
    Vec u(pair.size());
    for (int i = 0; i < pair.size(); ++i) u(i) = evaluate(md, mesh.nodes[pair.free_to_node[i]]);
    return u;
}

} // namespace thinrod
