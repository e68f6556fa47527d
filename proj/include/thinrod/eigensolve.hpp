#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "thinrod/assembly.hpp"
#include "thinrod/errors.hpp"

namespace thinrod {

struct EigenPair {
    double lambda = 0.0;
    Vec vector;            // free-DOF values, u^T M u = 1
    double residual = 0.0; // ||K u - lambda M u|| / (||K u|| + |lambda| ||M u||)
    int index = 0;         // 1-based; a Neumann zero mode is index 0
};

struct SolverOptions {
    double tol = 1e-8;
    double shift_factor = 1e-8; // sigma = -shift_factor * scale
    std::uint64_t seed = 20240517;
    int max_restarts = 0;        // 0 -> 50 * n
    double cluster_rel_gap = 1e-6;
};

namespace detail {

/// Cheap upper estimate of the largest generalized eigenvalue.
inline double spectral_scale(const SpMat& K, const SpMat& M) {
    double scale = 0.0;
    for (int r = 0; r < K.outerSize(); ++r) {
        double row = 0.0;
        for (SpMat::InnerIterator it(K, r); it; ++it) row += std::abs(it.value());
        const double m = M.coeff(r, r);
        if (m > 0.0) scale = std::max(scale, row / m);
    }
    return scale;
}

inline double relative_residual(const SpMat& K, const SpMat& M, const Vec& u, double lambda,
                                double scale) {
    const Vec Ku = K * u;
    const Vec Mu = M * u;
    const double denom = std::max(Ku.norm() + std::abs(lambda) * Mu.norm(),
                                  1e-8 * scale * Mu.norm());
    if (denom == 0.0) return 0.0;
    return (Ku - lambda * Mu).norm() / denom;
}

inline void fix_sign(Vec& u) {
    Eigen::Index imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    if (u(imax) < 0.0) u = -u;
}

/// Shift-invert Lanczos in the M-inner product with full reorthogonalization,
/// working in the M-orthogonal complement of a locked basis.
class ShiftInvertLanczos {
public:
    ShiftInvertLanczos(const SpMat& K, const SpMat& M, const SolverOptions& opts)
        : K_(K), M_(M), opts_(opts), rng_(opts.seed) {
        scale_ = spectral_scale(K, M);
        sigma_ = scale_ > 0.0 ? -opts.shift_factor * scale_ : -1.0;
        Eigen::SparseMatrix<double> A = (K - sigma_ * M);
        ldlt_.compute(A);
        if (ldlt_.info() != Eigen::Success)
            throw SolverError("eigensolve: factorization of K - sigma M failed (sigma = " +
                              std::to_string(sigma_) + ")");
        if ((ldlt_.vectorD().array() <= 0.0).any())
            throw SolverError("eigensolve: K - sigma M is not positive definite; K must be "
                              "positive semidefinite and M positive definite");
    }

    double sigma() const { return sigma_; }
    double scale() const { return scale_; }

    void lock(const Vec& u) {
        locked_.push_back(u);
        locked_m_.push_back(M_ * u);
    }
    std::size_t locked() const { return locked_.size(); }

    struct RunResult {
        std::vector<EigenPair> converged; // lowest Ritz pairs that met tol, ascending
        Vec restart;                      // suggested start vector for a follow-up run
        double best_residual = std::numeric_limits<double>::infinity();
    };

    /// Converges up to `want` lowest eigenpairs of the complement.
    RunResult run(int want, const Vec* start) {
        const int n = static_cast<int>(K_.rows());
        const int avail = n - static_cast<int>(locked_.size());
        RunResult out;
        if (avail <= 0 || want <= 0) return out;
        want = std::min(want, avail);
        const int mmax = std::min(avail, std::max(4 * want + 60, 120));

        Eigen::MatrixXd Q(n, mmax), MQ(n, mmax);
        std::vector<double> alpha, beta; // beta[j] couples q_j and q_{j+1}

        Vec q = start ? *start : random_vector(n);
        if (!start_vector(q, Q, MQ, 0)) return out;

        double theta_scale = 0.0;
        int m = 0;
        for (int j = 0; j < mmax; ++j) {
            Vec w = ldlt_.solve(Vec(MQ.col(j)));
            if (ldlt_.info() != Eigen::Success) throw SolverError("eigensolve: solve failed");
            const double a = MQ.col(j).dot(w);
            alpha.push_back(a);
            theta_scale = std::max(theta_scale, std::abs(a));
            w -= a * Q.col(j);
            if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
            orthogonalize(w, Q, MQ, j + 1);
            Vec Mw = M_ * w;
            double b = std::sqrt(std::max(0.0, w.dot(Mw)));
            m = j + 1;
            if (m == mmax) {
                beta.push_back(b);
                break;
            }
            if (b <= 1e-14 * theta_scale) {
                // invariant subspace: continue from a fresh direction
                b = 0.0;
                Vec r = random_vector(n);
                if (!start_vector(r, Q, MQ, j + 1)) {
                    beta.push_back(0.0);
                    break; // complement exhausted
                }
                beta.push_back(0.0);
            } else {
                Q.col(j + 1) = w / b;
                MQ.col(j + 1) = Mw / b;
                beta.push_back(b);
            }
            if ((m >= want && m % 5 == 0) || m == avail) {
                if (extract(Q, alpha, beta, m, want, out)) return out;
            }
            if (m == avail) break;
        }
        extract(Q, alpha, beta, m, want, out);
        return out;
    }

private:
    Vec random_vector(int n) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = dist(rng_);
        return v;
    }

    void orthogonalize(Vec& w, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& MQ, int cols) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t l = 0; l < locked_.size(); ++l) w -= locked_m_[l].dot(w) * locked_[l];
            if (cols > 0) {
                const Vec c = MQ.leftCols(cols).transpose() * w;
                w -= Q.leftCols(cols) * c;
            }
        }
    }

    bool start_vector(Vec& q, Eigen::MatrixXd& Q, Eigen::MatrixXd& MQ, int col) {
        for (int attempt = 0; attempt < 3; ++attempt) {
            const double before = std::sqrt(q.dot(M_ * q));
            orthogonalize(q, Q, MQ, col);
            Vec Mq = M_ * q;
            const double nrm = std::sqrt(std::max(0.0, q.dot(Mq)));
            if (nrm > 1e-8 * before && nrm > 0.0) {
                Q.col(col) = q / nrm;
                MQ.col(col) = Mq / nrm;
                return true;
            }
            q = random_vector(static_cast<int>(q.size()));
        }
        return false;
    }

    bool extract(const Eigen::MatrixXd& Q, const std::vector<double>& alpha, const std::vector<double>& beta, int m,
                 int want, RunResult& out) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // theta ascending -> lambda descending; walk from the largest theta
        const double b_last = beta[m - 1];
        out.converged.clear();
        int first_unconverged = -1;
        for (int k = 0; k < std::min(want, m); ++k) {
            const int col = m - 1 - k;
            const double theta = es.eigenvalues()(col);
            const double est = std::abs(b_last * es.eigenvectors()(m - 1, col)) /
                               std::max(std::abs(theta), 1e-300);
            if (!(theta > 0.0) || est > opts_.tol) {
                first_unconverged = col;
                break;
            }
            Vec u = Q.leftCols(m) * es.eigenvectors().col(col);
            u /= std::sqrt(u.dot(M_ * u));
            const double lambda = sigma_ + 1.0 / theta;
            const double res = relative_residual(K_, M_, u, lambda, scale_);
            out.best_residual = std::min(out.best_residual, res);
            if (res > opts_.tol) {
                first_unconverged = col;
                break;
            }
            EigenPair p;
            p.lambda = lambda;
            p.vector = std::move(u);
            p.residual = res;
            out.converged.push_back(std::move(p));
        }
        if (static_cast<int>(out.converged.size()) >= std::min(want, m)) return true;
        // restart direction: sum of the next few unconverged Ritz vectors
        Vec r = Vec::Zero(Q.rows());
        const int top = first_unconverged >= 0 ? first_unconverged : m - 1;
        for (int col = top; col >= std::max(0, top - 4); --col)
            r += Q.leftCols(m) * es.eigenvectors().col(col);
        out.restart = r;
        return false;
    }

    const SpMat& K_;
    const SpMat& M_;
    SolverOptions opts_;
    std::mt19937_64 rng_;
    double scale_ = 0.0;
    double sigma_ = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    std::vector<Vec> locked_, locked_m_;
};

} // namespace detail

/// Lowest `n` eigenpairs of K u = lambda M u in the M-orthogonal complement of
/// `deflate` (which must be M-orthonormal exact eigenvectors).
///
/// Single-vector Lanczos misses extra copies of a repeated eigenvalue, so converged
/// pairs are locked and the iteration restarted in their complement until a run finds
/// nothing below the current n-th value. A final Rayleigh-Ritz step over the kept
/// vectors restores M-orthogonality inside clusters.
inline std::vector<EigenPair> solve_generalized(const SpMat& K, const SpMat& M, int n,
                                                const SolverOptions& opts = {},
                                                const std::vector<Vec>& deflate = {}) {
    const int N = static_cast<int>(K.rows());
    if (K.rows() != K.cols() || M.rows() != N || M.cols() != N)
        throw ConfigError("eigensolve: K and M must be square and of equal size");
    if (n < 1) throw ConfigError("eigensolve: n must be >= 1");
    if (n + static_cast<int>(deflate.size()) > N)
        throw ConfigError("eigensolve: requested more eigenpairs than free DOFs");
    if (!(opts.tol > 0.0)) throw ConfigError("eigensolve: tol must be positive");

    detail::ShiftInvertLanczos lz(K, M, opts);
    for (const Vec& v : deflate) lz.lock(v);

    const int budget = opts.max_restarts > 0 ? opts.max_restarts : 50 * n;
    std::vector<EigenPair> found;
    Vec restart;
    bool have_restart = false;
    double best = std::numeric_limits<double>::infinity();
    for (int runs = 0;; ++runs) {
        if (runs >= budget) {
            std::ostringstream msg;
            msg << "eigensolve: no convergence after " << runs << " Lanczos runs; found "
                << found.size() << " of " << n << " pairs, best pending residual " << best;
            throw SolverError(msg.str());
        }
        const int avail = N - static_cast<int>(deflate.size() + found.size());
        if (avail <= 0) break;
        auto res = lz.run(n, have_restart ? &restart : nullptr);
        best = std::min(best, res.best_residual);
        have_restart = res.restart.size() > 0 && res.converged.empty();
        if (have_restart) restart = res.restart;

        std::sort(found.begin(), found.end(),
                  [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
        const bool full = static_cast<int>(found.size()) >= n;
        const double nth = full ? found[n - 1].lambda : std::numeric_limits<double>::infinity();
        const double margin = 1e-9 * std::max(std::abs(nth), lz.scale() * 1e-12);
        bool added = false;
        for (auto& p : res.converged) {
            if (full && p.lambda >= nth - margin) continue;
            lz.lock(p.vector);
            found.push_back(std::move(p));
            added = true;
        }
        if (full && !added && !res.converged.empty()) break;
    }

    std::sort(found.begin(), found.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
    if (static_cast<int>(found.size()) > n) found.resize(n);

    // Rayleigh-Ritz over the kept basis
    const int k = static_cast<int>(found.size());
    Eigen::MatrixXd X(N, k);
    for (int i = 0; i < k; ++i) X.col(i) = found[i].vector;
    const Eigen::MatrixXd KX = K * X;
    const Eigen::MatrixXd MX = M * X;
    Eigen::MatrixXd Kr = X.transpose() * KX;
    Eigen::MatrixXd Mr = X.transpose() * MX;
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(Kr, Mr);
    if (rr.info() != Eigen::Success) throw SolverError("eigensolve: Rayleigh-Ritz step failed");
    const Eigen::MatrixXd Y = X * rr.eigenvectors();

    std::vector<EigenPair> out(k);
    std::vector<double> bad;
    for (int i = 0; i < k; ++i) {
        Vec u = Y.col(i);
        u /= std::sqrt(u.dot(M * u));
        detail::fix_sign(u);
        out[i].lambda = rr.eigenvalues()(i);
        out[i].vector = std::move(u);
        out[i].residual =
            detail::relative_residual(K, M, out[i].vector, out[i].lambda, lz.scale());
        out[i].index = i + 1;
        if (out[i].residual > opts.tol) bad.push_back(out[i].residual);
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "eigensolve: " << bad.size() << " pairs above tolerance " << opts.tol
            << ", worst residual " << *std::max_element(bad.begin(), bad.end());
        throw SolverError(msg.str());
    }
    return out;
}

/// Lowest eigenpairs of an assembled problem. For Neumann input the constant mode is
/// returned first with index 0, followed by `n` nonzero modes.
inline std::vector<EigenPair> solve_lowest(const SparsePair& pair, int n, double tol = 1e-8) {
    SolverOptions opts;
    opts.tol = tol;
    if (pair.bc != BcMode::Neumann) {
        if (n >= pair.size() + 1) throw ConfigError("solve_lowest: n exceeds free DOF count");
        return solve_generalized(pair.K, pair.M, n, opts);
    }
    opts.shift_factor = 1e-4;
    Vec one = Vec::Ones(pair.size());
    one /= std::sqrt(one.dot(pair.M * one));
    const double scale = detail::spectral_scale(pair.K, pair.M);
    EigenPair zero;
    zero.lambda = one.dot(pair.K * one);
    zero.vector = one;
    zero.residual = detail::relative_residual(pair.K, pair.M, one, zero.lambda, scale);
    zero.index = 0;
    std::vector<EigenPair> out{zero};
    auto rest = solve_generalized(pair.K, pair.M, n, opts, {one});
    for (auto& p : rest) out.push_back(std::move(p));
    return out;
}

/// Largest principal angle between the M-spans of two equally sized sets of vectors.
inline double subspace_angle(const std::vector<Vec>& a, const std::vector<Vec>& b,
                             const SpMat& M) {
    if (a.size() != b.size() || a.empty())
        throw ConfigError("subspace_angle: both sets must be nonempty and of equal size");
    const int n = static_cast<int>(a.front().size());
    const int k = static_cast<int>(a.size());
    auto basis = [&](const std::vector<Vec>& v) {
        Eigen::MatrixXd X(n, k);
        for (int i = 0; i < k; ++i) {
            if (v[i].size() != n) throw ConfigError("subspace_angle: vector length mismatch");
            X.col(i) = v[i];
        }
        // M-orthonormalize through the Cholesky factor of the Gram matrix
        Eigen::MatrixXd G = X.transpose() * (M * X);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success)
            throw ConfigError("subspace_angle: vectors are linearly dependent");
        return Eigen::MatrixXd(llt.matrixU().solve<Eigen::OnTheRight>(X));
    };
    const Eigen::MatrixXd A = basis(a);
    const Eigen::MatrixXd B = basis(b);
    const Eigen::MatrixXd MB = M * B;
    const Eigen::MatrixXd C = A.transpose() * MB;
    const Eigen::MatrixXd R = B - A * C; // component of span(B) outside span(A)
    const Eigen::MatrixXd RR = R.transpose() * (M * R);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const double cos_min = svd.singularValues().minCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (RR + RR.transpose()));
    const double sin_max = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    return std::atan2(sin_max, cos_min);
}

inline double subspace_angle(const std::vector<EigenPair>& a, const std::vector<EigenPair>& b,
                             const SpMat& M) {
    std::vector<Vec> va, vb;
    for (const auto& p : a) va.push_back(p.vector);
    for (const auto& p : b) vb.push_back(p.vector);
    return subspace_angle(va, vb, M);
}

/// Groups consecutive sorted eigenvalues whose relative gap is below `rel_gap`.
inline std::vector<std::vector<int>> clusters(const std::vector<EigenPair>& pairs,
                                              double rel_gap = 1e-6) {
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!out.empty()) {
            const double prev = pairs[out.back().back()].lambda;
            const double cur = pairs[i].lambda;
            if (std::abs(cur - prev) <= rel_gap * std::max(std::abs(cur), std::abs(prev))) {
                out.back().push_back(static_cast<int>(i));
                continue;
            }
        }
        out.push_back({static_cast<int>(i)});
    }
    return out;
}

} // namespace thinrod
