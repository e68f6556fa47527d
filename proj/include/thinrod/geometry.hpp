#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "thinrod/errors.hpp"

namespace thinrod {

using Point3 = std::array<double, 3>;

/// Closed-form 1D bound function h(x1) from a small registered catalog.
///
/// Every profile is smooth between its listed discontinuities, declares a
/// Lipschitz constant valid on those smooth pieces, and is right-continuous
/// at a jump.
class Profile {
public:
    enum class Shape { Constant, SinBump, Step };

    static Profile constant(double value) {
        Profile p;
        p.shape_ = Shape::Constant;
        p.a_ = value;
        return p;
    }

    /// base + amplitude * sin(wavenumber * x + phase)
    static Profile sin_bump(double base, double amplitude,
                            double wavenumber = std::numbers::pi, double phase = 0.0) {
        if (!(wavenumber > 0.0)) throw ConfigError("sin_bump: wavenumber must be positive");
        Profile p;
        p.shape_ = Shape::SinBump;
        p.a_ = base;
        p.b_ = amplitude;
        p.c_ = wavenumber;
        p.d_ = phase;
        return p;
    }

    /// left for x < at, right for x >= at
    static Profile step(double left, double right, double at) {
        Profile p;
        p.shape_ = Shape::Step;
        p.a_ = left;
        p.b_ = right;
        p.c_ = at;
        return p;
    }

    Shape shape() const { return shape_; }

    std::string name() const {
        switch (shape_) {
        case Shape::Constant: return "constant";
        case Shape::SinBump: return "sin_bump";
        case Shape::Step: return "step";
        }
        return "unknown";
    }

    double operator()(double x) const {
        switch (shape_) {
        case Shape::Constant: return a_;
        case Shape::SinBump: return a_ + b_ * std::sin(c_ * x + d_);
        case Shape::Step: return x < c_ ? a_ : b_;
        }
        return 0.0;
    }

    double left_limit(double x) const {
        if (shape_ == Shape::Step && x <= c_) return a_;
        return (*this)(x);
    }

    double lipschitz() const {
        return shape_ == Shape::SinBump ? std::abs(b_) * c_ : 0.0;
    }

    bool piecewise_constant() const { return shape_ != Shape::SinBump || b_ == 0.0; }

    std::vector<double> discontinuities(double lo, double hi) const {
        if (shape_ == Shape::Step && c_ > lo && c_ < hi && a_ != b_) return {c_};
        return {};
    }

    /// Interior stationary points in (lo, hi).
    std::vector<double> critical_points(double lo, double hi) const {
        std::vector<double> out;
        if (shape_ != Shape::SinBump || b_ == 0.0) return out;
        const double pi = std::numbers::pi;
        // c*x + d = pi/2 + j*pi
        double j = std::ceil((c_ * lo + d_ - pi / 2) / pi);
        for (;; j += 1.0) {
            double x = (pi / 2 + j * pi - d_) / c_;
            if (x >= hi) break;
            if (x > lo) out.push_back(x);
        }
        return out;
    }

    /// Exact (min, max) over the closed interval [lo, hi], jumps included.
    std::pair<double, double> bounds(double lo, double hi) const {
        std::vector<double> v{(*this)(lo), left_limit(hi), (*this)(hi)};
        for (double x : critical_points(lo, hi)) v.push_back((*this)(x));
        for (double x : discontinuities(lo, hi)) {
            v.push_back(left_limit(x));
            v.push_back((*this)(x));
        }
        auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        return {*mn, *mx};
    }

    const std::array<double, 4> params() const { return {a_, b_, c_, d_}; }

private:
    Shape shape_ = Shape::Constant;
    double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
};

enum class DomainKind { Prism, TwoPrism, ProfiledHeight, ProfiledWidth, ProfiledBox };

inline std::string to_string(DomainKind k) {
    switch (k) {
    case DomainKind::Prism: return "prism";
    case DomainKind::TwoPrism: return "two_prism";
    case DomainKind::ProfiledHeight: return "profiled_height";
    case DomainKind::ProfiledWidth: return "profiled_width";
    case DomainKind::ProfiledBox: return "profiled_box";
    }
    return "unknown";
}

/// Axis-aligned rectangular cross-section [lo2, hi2] x [lo3, hi3] in stretched units.
struct Rect {
    double lo2, hi2, lo3, hi3;
    double area() const { return (hi2 - lo2) * (hi3 - lo3); }
};

struct RectSection {
    double width = 1.0;
    double height = 1.0;
};

struct TwoPrismSection {
    double outer_half = 1.0;
    double inner_half = 0.5;
    double junction = 0.5;
};

/// One profiled direction; the other transverse extent is (0, other).
struct ProfiledSection {
    Profile h;
    double other = 1.0;
};

/// y2 in (-h[0], h[1]), y3 in (-h[2], h[3])
struct BoxSection {
    std::array<Profile, 4> h;
};

using CrossSection = std::variant<RectSection, TwoPrismSection, ProfiledSection, BoxSection>;

struct AreaBounds {
    double c0 = 0.0;
    double c1 = 0.0;
    bool exact = true;
    int samples = 0; // sampling density used when !exact
};

/// Thin rod G_eps described through its stretched reference domain G.
class RodDomain {
public:
    static RodDomain prism(double ell0, double ell1, double eps,
                           double width = 1.0, double height = 1.0) {
        return RodDomain(DomainKind::Prism, ell0, ell1, eps, RectSection{width, height});
    }

    static RodDomain two_prism(double ell0, double ell1, double eps, double outer_half = 1.0,
                               double inner_half = 0.5,
                               double junction = std::numeric_limits<double>::quiet_NaN()) {
        if (std::isnan(junction)) junction = 0.5 * (ell0 + ell1);
        return RodDomain(DomainKind::TwoPrism, ell0, ell1, eps,
                         TwoPrismSection{outer_half, inner_half, junction});
    }

    static RodDomain profiled_height(double ell0, double ell1, double eps, Profile h,
                                     double width = 1.0) {
        return RodDomain(DomainKind::ProfiledHeight, ell0, ell1, eps,
                         ProfiledSection{std::move(h), width});
    }

    static RodDomain profiled_width(double ell0, double ell1, double eps, Profile h,
                                    double height = 1.0) {
        return RodDomain(DomainKind::ProfiledWidth, ell0, ell1, eps,
                         ProfiledSection{std::move(h), height});
    }

    static RodDomain profiled_box(double ell0, double ell1, double eps,
                                  std::array<Profile, 4> h) {
        return RodDomain(DomainKind::ProfiledBox, ell0, ell1, eps, BoxSection{std::move(h)});
    }

    RodDomain with_eps(double eps) const {
        RodDomain d = *this;
        check_eps(eps);
        d.eps_ = eps;
        return d;
    }

    DomainKind kind() const { return kind_; }
    double ell0() const { return ell0_; }
    double ell1() const { return ell1_; }
    double length() const { return ell1_ - ell0_; }
    double eps() const { return eps_; }
    const CrossSection& section() const { return section_; }
    const AreaBounds& bounds() const { return bounds_; }

    /// Section rectangle at x1 (right limit at a jump). No range check.
    Rect rect_at(double x1) const { return rect(x1, false); }
    Rect rect_left_of(double x1) const { return rect(x1, true); }

    /// Sorted jump locations strictly inside (ell0, ell1).
    std::vector<double> discontinuities() const {
        std::vector<double> out;
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, TwoPrismSection>) {
                    out.push_back(s.junction);
                } else if constexpr (std::is_same_v<T, ProfiledSection>) {
                    out = s.h.discontinuities(ell0_, ell1_);
                } else if constexpr (std::is_same_v<T, BoxSection>) {
                    for (const auto& p : s.h)
                        for (double x : p.discontinuities(ell0_, ell1_)) out.push_back(x);
                }
            },
            section_);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// True when every bound function is piecewise constant in x1.
    bool piecewise_constant() const {
        if (const auto* p = std::get_if<ProfiledSection>(&section_)) return p->h.piecewise_constant();
        if (const auto* b = std::get_if<BoxSection>(&section_))
            return std::all_of(b->h.begin(), b->h.end(),
                               [](const Profile& p) { return p.piecewise_constant(); });
        return true;
    }

    /// Closed-set membership test for a point of G (stretched coordinates).
    bool contains(const Point3& y, double rel_tol = 1e-12) const {
        const double tol = rel_tol * std::max({1.0, std::abs(ell0_), std::abs(ell1_)});
        if (y[0] < ell0_ - tol || y[0] > ell1_ + tol) return false;
        const double x1 = std::clamp(y[0], ell0_, ell1_);
        auto inside = [&](const Rect& r) {
            const double t = rel_tol * std::max({1.0, std::abs(r.lo2), std::abs(r.hi2),
                                                 std::abs(r.lo3), std::abs(r.hi3)});
            return y[1] >= r.lo2 - t && y[1] <= r.hi2 + t && y[2] >= r.lo3 - t &&
                   y[2] <= r.hi3 + t;
        };
        return inside(rect(x1, false)) || inside(rect(x1, true));
    }

private:
    RodDomain(DomainKind kind, double ell0, double ell1, double eps, CrossSection section)
        : kind_(kind), ell0_(ell0), ell1_(ell1), eps_(eps), section_(std::move(section)) {
        if (!(ell0 < ell1)) throw GeometryError("RodDomain: requires ell0 < ell1");
        check_eps(eps);
        validate_section();
        bounds_ = compute_bounds();
        if (!(bounds_.c0 > 0.0))
            throw GeometryError("RodDomain: cross-section area is not bounded away from zero");
    }

    static void check_eps(double eps) {
        if (!(eps > 0.0 && eps <= 1.0)) throw GeometryError("RodDomain: eps must lie in (0, 1]");
    }

    void validate_section() const {
        if (const auto* r = std::get_if<RectSection>(&section_)) {
            if (!(r->width > 0.0 && r->height > 0.0))
                throw GeometryError("prism: section extents must be positive");
        } else if (const auto* t = std::get_if<TwoPrismSection>(&section_)) {
            if (!(t->inner_half > 0.0 && t->inner_half < t->outer_half))
                throw GeometryError("two_prism: requires 0 < inner_half < outer_half");
            if (!(t->junction > ell0_ && t->junction < ell1_))
                throw GeometryError("two_prism: junction must lie strictly inside (ell0, ell1)");
        } else if (const auto* p = std::get_if<ProfiledSection>(&section_)) {
            if (!(p->other > 0.0)) throw GeometryError("profiled: fixed extent must be positive");
            if (!(p->h.bounds(ell0_, ell1_).first > 0.0))
                throw GeometryError("profiled: bound function h must stay positive");
        } else if (const auto* b = std::get_if<BoxSection>(&section_)) {
            auto lo = [&](int i) { return b->h[i].bounds(ell0_, ell1_).first; };
            if (!(lo(0) + lo(1) > 0.0 && lo(2) + lo(3) > 0.0))
                throw GeometryError("profiled_box: degenerate section extents");
            // each pointwise extent must also be positive; checked by sampling below
        }
    }

    Rect rect(double x1, bool left) const {
        return std::visit(
            [&](const auto& s) -> Rect {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectSection>) {
                    return {0.0, s.width, 0.0, s.height};
                } else if constexpr (std::is_same_v<T, TwoPrismSection>) {
                    const bool wide = left ? x1 <= s.junction : x1 < s.junction;
                    const double a = wide ? s.outer_half : s.inner_half;
                    return {-a, a, -a, a};
                } else if constexpr (std::is_same_v<T, ProfiledSection>) {
                    const double h = left ? s.h.left_limit(x1) : s.h(x1);
                    if (kind_ == DomainKind::ProfiledHeight) return {0.0, s.other, 0.0, h};
                    return {0.0, h, 0.0, s.other};
                } else {
                    auto v = [&](int i) { return left ? s.h[i].left_limit(x1) : s.h[i](x1); };
                    return {-v(0), v(1), -v(2), v(3)};
                }
            },
            section_);
    }

    AreaBounds compute_bounds() const {
        if (const auto* r = std::get_if<RectSection>(&section_)) {
            const double a = r->width * r->height;
            return {a, a, true, 0};
        }
        if (const auto* t = std::get_if<TwoPrismSection>(&section_)) {
            return {4.0 * t->inner_half * t->inner_half, 4.0 * t->outer_half * t->outer_half,
                    true, 0};
        }
        if (const auto* p = std::get_if<ProfiledSection>(&section_)) {
            auto [lo, hi] = p->h.bounds(ell0_, ell1_);
            return {lo * p->other, hi * p->other, true, 0};
        }
        // Box: product of sums has no simple monotone decomposition. Sample every
        // smooth piece and widen by the Lipschitz constant of the area.
        const auto& h = std::get<BoxSection>(section_).h;
        constexpr int samples_per_piece = 4096;
        double ext2 = 0.0, ext3 = 0.0;
        for (int i = 0; i < 2; ++i) ext2 += h[i].bounds(ell0_, ell1_).second;
        for (int i = 2; i < 4; ++i) ext3 += h[i].bounds(ell0_, ell1_).second;
        const double lip = (h[0].lipschitz() + h[1].lipschitz()) * ext3 +
                           (h[2].lipschitz() + h[3].lipschitz()) * ext2;
        std::vector<double> brk{ell0_};
        for (double x : discontinuities()) brk.push_back(x);
        brk.push_back(ell1_);
        double c0 = std::numeric_limits<double>::infinity();
        double c1 = -c0;
        for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
            const double a = brk[k], b = brk[k + 1];
            const double dx = (b - a) / samples_per_piece;
            for (int i = 0; i <= samples_per_piece; ++i) {
                const double x = a + i * dx;
                const Rect r = i == samples_per_piece ? rect(b, true) : rect(x, false);
                if (!(r.hi2 > r.lo2 && r.hi3 > r.lo3))
                    throw GeometryError("profiled_box: section collapses inside the rod");
                c0 = std::min(c0, r.area());
                c1 = std::max(c1, r.area());
            }
            c0 = std::min(c0, c0 - 0.5 * lip * dx);
            c1 = std::max(c1, c1 + 0.5 * lip * dx);
        }
        return {c0, c1, lip == 0.0, lip == 0.0 ? 0 : samples_per_piece};
    }

    DomainKind kind_;
    double ell0_, ell1_, eps_;
    CrossSection section_;
    AreaBounds bounds_;
};

/// |D_{x1}| of the stretched domain; right limit at a jump.
inline double area_profile(const RodDomain& d, double x1) {
    if (!(x1 >= d.ell0() && x1 <= d.ell1()))
        throw DomainError("area_profile: x1 outside [ell0, ell1]");
    return d.rect_at(x1).area();
}

/// (c0, c1) with c0 <= |D_{x1}| <= c1 on [ell0, ell1].
inline std::pair<double, double> area_bounds(const RodDomain& d) {
    return {d.bounds().c0, d.bounds().c1};
}

/// Physical point of G_eps to the stretched variable: (x1, x2/eps, x3/eps).
inline Point3 stretch(const RodDomain& d, const Point3& x) {
    const Point3 y{x[0], x[1] / d.eps(), x[2] / d.eps()};
    if (!d.contains(y)) throw DomainError("stretch: point outside G_eps");
    return y;
}

inline Point3 unstretch(const RodDomain& d, const Point3& y) {
    if (!d.contains(y)) throw DomainError("unstretch: point outside G");
    return {y[0], y[1] * d.eps(), y[2] * d.eps()};
}

} // namespace thinrod
