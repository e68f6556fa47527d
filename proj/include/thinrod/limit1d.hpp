#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "thinrod/errors.hpp"
#include "thinrod/geometry.hpp"

namespace thinrod {

/// Cross-section area |D_{x1}| viewed as the coefficient of the 1D limit problem
///   -(w U')' = lambda w U on (ell0, ell1),  U(ell0) = U(ell1) = 0.
struct Weight1D {
    std::function<double(double)> w;
    std::vector<double> discontinuities; // sorted, interior
    double c0 = 0.0, c1 = 0.0;

    // piecewise-constant description, empty for smooth weights
    std::vector<double> breaks; // ell0 = breaks.front() < ... < breaks.back() = ell1
    std::vector<double> values; // one value per piece

    bool piecewise_constant() const { return !values.empty(); }

    double operator()(double x) const { return w(x); }

    static Weight1D pieces(std::vector<double> breaks, std::vector<double> values) {
        if (breaks.size() < 2 || values.size() + 1 != breaks.size())
            throw ConfigError("Weight1D: need K+1 breaks for K values");
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            if (!(breaks[i] < breaks[i + 1])) throw ConfigError("Weight1D: breaks must increase");
        for (double v : values)
            if (!(v > 0.0)) throw ConfigError("Weight1D: weights must be positive");
        Weight1D out;
        out.breaks = breaks;
        out.values = values;
        out.discontinuities.assign(breaks.begin() + 1, breaks.end() - 1);
        out.c0 = *std::min_element(values.begin(), values.end());
        out.c1 = *std::max_element(values.begin(), values.end());
        out.w = [breaks, values](double x) {
            // right-continuous at interior breaks
            auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, x);
            return values[static_cast<std::size_t>(it - (breaks.begin() + 1))];
        };
        return out;
    }

    static Weight1D constant(double value, double ell0, double ell1) {
        return pieces({ell0, ell1}, {value});
    }

    /// Same weight multiplied by kappa > 0.
    Weight1D scaled(double kappa) const {
        Weight1D out = *this;
        auto f = w;
        out.w = [f, kappa](double x) { return kappa * f(x); };
        out.c0 *= kappa;
        out.c1 *= kappa;
        for (double& v : out.values) v *= kappa;
        return out;
    }
};

/// Exact area profile of the stretched domain as a 1D weight.
inline Weight1D weight_from_domain(const RodDomain& d) {
    std::vector<double> brk{d.ell0()};
    for (double x : d.discontinuities()) brk.push_back(x);
    brk.push_back(d.ell1());
    if (d.piecewise_constant()) {
        std::vector<double> vals;
        for (std::size_t i = 0; i + 1 < brk.size(); ++i)
            vals.push_back(d.rect_at(0.5 * (brk[i] + brk[i + 1])).area());
        return Weight1D::pieces(brk, vals);
    }
    Weight1D out;
    out.w = [d](double x) { return d.rect_at(x).area(); };
    out.discontinuities.assign(brk.begin() + 1, brk.end() - 1);
    out.c0 = d.bounds().c0;
    out.c1 = d.bounds().c1;
    return out;
}

struct EigenPair1D {
    double lambda0 = 0.0;
    std::vector<double> nodes;  // including both ends
    std::vector<double> values; // U at nodes, zero at both ends, int w U^2 = 1
    int index = 0;              // 1-based
};

/// n^2 pi^2 / (ell1 - ell0)^2 for n = 1..count: the unit-weight Dirichlet spectrum.
inline std::vector<double> unweighted_dirichlet(double ell0, double ell1, int count) {
    std::vector<double> out;
    const double L = ell1 - ell0;
    for (int n = 1; n <= count; ++n) out.push_back(n * n * std::numbers::pi * std::numbers::pi / (L * L));
    return out;
}

namespace detail {

struct Tridiag {
    std::vector<double> kd, ko, md, mo; // diagonals and first off-diagonals of K and M
};

/// Number of eigenvalues of the pencil (K, M) strictly below lambda (Sylvester inertia).
inline int sturm_count(const Tridiag& t, double lambda) {
    const std::size_t n = t.kd.size();
    int neg = 0;
    double piv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = t.kd[i] - lambda * t.md[i];
        if (i > 0) {
            const double b = t.ko[i - 1] - lambda * t.mo[i - 1];
            a -= b * b / piv;
        }
        if (a == 0.0) a = -std::numeric_limits<double>::epsilon() * (std::abs(t.kd[i]) + 1.0);
        if (a < 0.0) ++neg;
        piv = a;
    }
    return neg;
}

/// Solves (K - lambda M) x = rhs for a symmetric tridiagonal pencil (Thomas algorithm).
inline std::vector<double> shifted_solve(const Tridiag& t, double lambda, std::vector<double> rhs) {
    const std::size_t n = t.kd.size();
    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.kd[i] - lambda * t.md[i];
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = t.ko[i] - lambda * t.mo[i];
    const double tiny = 1e-300;
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) diag[i - 1] = tiny;
        const double f = off[i - 1] / diag[i - 1];
        diag[i] -= f * off[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) diag[n - 1] = tiny;
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
    return rhs;
}

inline std::vector<double> mass_apply(const Tridiag& t, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = t.md[i] * x[i];
        if (i > 0) y[i] += t.mo[i - 1] * x[i - 1];
        if (i + 1 < n) y[i] += t.mo[i] * x[i + 1];
    }
    return y;
}

/// Element counts per piece proportional to length, at least one each.
inline std::vector<int> allocate_elements(const std::vector<double>& brk, int elements) {
    const std::size_t k = brk.size() - 1;
    if (static_cast<std::size_t>(elements) < k)
        throw ConfigError("solve_limit: " + std::to_string(elements) +
                          " elements cannot resolve " + std::to_string(k - 1) + " discontinuities");
    const double L = brk.back() - brk.front();
    std::vector<int> cnt(k);
    std::vector<std::pair<double, std::size_t>> rem;
    int used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double ideal = elements * (brk[i + 1] - brk[i]) / L;
        cnt[i] = std::max(1, static_cast<int>(std::floor(ideal)));
        used += cnt[i];
        rem.emplace_back(ideal - std::floor(ideal), i);
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; used < elements; j = (j + 1) % k, ++used) ++cnt[rem[j].second];
    for (std::size_t i = k; used > elements && i-- > 0;)
        while (cnt[i] > 1 && used > elements) --cnt[i], --used;
    if (used != elements)
        throw ConfigError("solve_limit: cannot distribute elements over the weight pieces");
    return cnt;
}

} // namespace detail

/// Lowest n eigenpairs of the P1 finite element discretization of the limit problem.
/// Mesh nodes are placed on every discontinuity; w is integrated by 3-point Gauss.
inline std::vector<EigenPair1D> solve_limit(const Weight1D& weight, double ell0, double ell1,
                                            int n, int elements) {
    if (n < 1) throw ConfigError("solve_limit: n must be >= 1");
    if (!(ell0 < ell1)) throw ConfigError("solve_limit: requires ell0 < ell1");
    if (elements < std::max(8, 4 * n))
        throw ConfigError("solve_limit: needs at least max(8, 4 n) elements");
    std::vector<double> brk{ell0};
    for (double x : weight.discontinuities) {
        if (!(x > ell0 && x < ell1)) throw ConfigError("solve_limit: discontinuity outside range");
        brk.push_back(x);
    }
    brk.push_back(ell1);
    const std::vector<int> cnt = detail::allocate_elements(brk, elements);

    std::vector<double> x{ell0};
    for (std::size_t p = 0; p < cnt.size(); ++p) {
        for (int e = 1; e < cnt[p]; ++e) x.push_back(brk[p] + (brk[p + 1] - brk[p]) * e / cnt[p]);
        x.push_back(brk[p + 1]);
    }
    const std::size_t nn = x.size(); // elements + 1
    const std::size_t ni = nn - 2;   // interior unknowns
    if (static_cast<std::size_t>(n) > ni) throw ConfigError("solve_limit: n exceeds unknowns");

    // full tridiagonal over all nodes, then drop the two ends
    std::vector<double> kd(nn, 0.0), ko(nn - 1, 0.0), md(nn, 0.0), mo(nn - 1, 0.0);
    const double g = std::sqrt(3.0 / 5.0);
    const double gx[3] = {-g, 0.0, g};
    const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (std::size_t e = 0; e + 1 < nn; ++e) {
        const double a = x[e], b = x[e + 1], h = b - a;
        double kint = 0.0, m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double t = 0.5 * (1.0 + gx[q]);
            const double wq = 0.5 * h * gw[q] * weight(a + t * h);
            kint += wq / (h * h);
            m00 += wq * (1 - t) * (1 - t);
            m01 += wq * (1 - t) * t;
            m11 += wq * t * t;
        }
        kd[e] += kint;
        kd[e + 1] += kint;
        ko[e] -= kint;
        md[e] += m00;
        md[e + 1] += m11;
        mo[e] += m01;
    }
    detail::Tridiag t;
    t.kd.assign(kd.begin() + 1, kd.end() - 1);
    t.md.assign(md.begin() + 1, md.end() - 1);
    t.ko.assign(ko.begin() + 1, ko.end() - 1);
    t.mo.assign(mo.begin() + 1, mo.end() - 1);

    double upper = 1.0;
    while (detail::sturm_count(t, upper) < n) upper *= 2.0;

    std::vector<EigenPair1D> out;
    for (int k = 1; k <= n; ++k) {
        double lo = 0.0, hi = upper;
        while (hi - lo > 1e-15 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (detail::sturm_count(t, mid) >= k ? hi : lo) = mid;
        }
        const double lambda = 0.5 * (lo + hi);
        // inverse iteration from a slightly lower shift
        std::vector<double> v(ni, 1.0);
        for (std::size_t i = 0; i < ni; ++i) v[i] = 1.0 + 0.01 * std::sin(1.0 + 7.0 * i);
        const double shift = lambda * (1.0 - 1e-10);
        for (int it = 0; it < 4; ++it) {
            v = detail::shifted_solve(t, shift, detail::mass_apply(t, v));
            double nrm = 0.0;
            const auto Mv = detail::mass_apply(t, v);
            for (std::size_t i = 0; i < ni; ++i) nrm += v[i] * Mv[i];
            nrm = std::sqrt(nrm);
            for (double& z : v) z /= nrm;
        }
        std::size_t imax = 0;
        for (std::size_t i = 0; i < ni; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0)
            for (double& z : v) z = -z;
        EigenPair1D p;
        p.lambda0 = lambda;
        p.nodes = x;
        p.values.assign(nn, 0.0);
        std::copy(v.begin(), v.end(), p.values.begin() + 1);
        p.index = k;
        out.push_back(std::move(p));
    }
    return out;
}

namespace detail {

/// Transfer-matrix propagation of (U, w U') from (0, 1) at ell0; returns U(ell1) and
/// the number of interior zeros of U.
struct ShotResult {
    double end_value;
    int zeros;
};

inline ShotResult shoot(const Weight1D& wgt, double lambda) {
    const double k = std::sqrt(lambda);
    double U = 0.0, F = 1.0;
    int zeros = 0;
    const std::size_t pieces = wgt.values.size();
    for (std::size_t p = 0; p < pieces; ++p) {
        const double w = wgt.values[p];
        const double len = wgt.breaks[p + 1] - wgt.breaks[p];
        // U(t) = U cos(kt) + F/(wk) sin(kt) = R cos(kt - phi)
        const double B = F / (w * k);
        const double phi = std::atan2(B, U);
        const double tol = 1e-12 * len;
        // a zero on an interface belongs to the piece on its left
        const double hi_t = p + 1 == pieces ? len - tol : len + tol;
        // zeros at t_j = (pi/2 + j pi + phi) / k, j integer, with t in (tol, hi_t]
        const double pi = std::numbers::pi;
        double j = std::ceil((k * tol - phi - pi / 2) / pi);
        for (;; j += 1.0) {
            const double tz = (pi / 2 + j * pi + phi) / k;
            if (tz > hi_t) break;
            if (tz > tol) ++zeros;
        }
        const double c = std::cos(k * len), s = std::sin(k * len);
        const double U2 = U * c + B * s;
        const double F2 = -w * k * U * s + F * c;
        U = U2;
        F = F2;
    }
    return {U, zeros};
}

} // namespace detail

/// First n eigenvalues of the limit problem with a piecewise-constant weight, from the
/// transfer-matrix dispersion relation (continuity of U and w U' at every interface).
inline std::vector<double> shooting_oracle(const Weight1D& weight, double ell0, double ell1, int n) {
    if (!weight.piecewise_constant())
        throw ConfigError("shooting_oracle: weight must be piecewise constant");
    if (std::abs(weight.breaks.front() - ell0) > 1e-14 * std::max(1.0, std::abs(ell0)) ||
        std::abs(weight.breaks.back() - ell1) > 1e-14 * std::max(1.0, std::abs(ell1)))
        throw ConfigError("shooting_oracle: weight breaks must span [ell0, ell1]");
    if (n < 1) throw ConfigError("shooting_oracle: n must be >= 1");
    const double L = ell1 - ell0;
    const double pi = std::numbers::pi;

    for (int refine = 0; refine < 8; ++refine) {
        const double dk = pi / (L * 32.0 * (1 << refine));
        std::vector<double> roots;
        double k_prev = 0.5 * dk;
        double f_prev = detail::shoot(weight, k_prev * k_prev).end_value;
        for (double k = k_prev + dk; static_cast<int>(roots.size()) < n; k += dk) {
            const double f = detail::shoot(weight, k * k).end_value;
            if (f == 0.0 || (f > 0.0) != (f_prev > 0.0)) {
                double lo = k_prev * k_prev, hi = k * k;
                double flo = f_prev;
                for (int it = 0; it < 300 && hi - lo > 1e-11; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const double fm = detail::shoot(weight, mid).end_value;
                    if ((fm > 0.0) == (flo > 0.0) && fm != 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            k_prev = k;
            f_prev = f;
        }
        // Sturm oscillation: the j-th eigenfunction has j - 1 interior zeros
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) ok = detail::shoot(weight, roots[j]).zeros == j;
        if (ok) return roots;
    }
    throw SolverError("shooting_oracle: root bracketing failed after scan refinement");
}

} // namespace thinrod
