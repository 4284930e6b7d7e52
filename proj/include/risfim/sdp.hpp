#pragma once

// Dense primal-dual interior-point solver for small semidefinite programs
// over the complex Hermitian PSD cone:
//
//   maximize  tr{C W}
//   s.t.      tr{A_j W}  = b_j          (equalities)
//             tr{B_j W} <= d_j          (inequalities)
//             W Hermitian PSD, n x n
//
// Inequalities get scalar slacks and the problem is lifted to one
// block-diagonal Hermitian variable X = blkdiag(W, diag(s)); since every
// data matrix is block diagonal, all iterates stay block diagonal.
//
// Method: infeasible-start Mehrotra predictor-corrector with the HKM
// search direction and a dense Schur complement.  Start point X = Z = eta*I
// with data-dependent eta, step fraction 0.98, centering from the standard
// (gap_aff/gap)^3 rule.  Everything is deterministic: identical problems
// produce identical solutions.
//
// Primal infeasibility is declared via divergence of the dual objective
// along a direction of near-zero dual residual (an improving dual ray).

#include "risfim/types.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace risfim {

struct SdpConstraint {
    CMatrix A;  // Hermitian
    double rhs = 0.0;
};

struct SdpProblem {
    CMatrix C;  // maximize tr{C W}
    std::vector<SdpConstraint> equalities;
    std::vector<SdpConstraint> inequalities;

    int size() const { return static_cast<int>(C.rows()); }

    void validate() const {
        auto check_herm = [n = C.rows()](const CMatrix& M, const char* what) {
            if (M.rows() != n || M.cols() != n)
                throw std::invalid_argument(std::string("SdpProblem: bad shape in ") + what);
            const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
            if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
                throw std::invalid_argument(std::string("SdpProblem: non-Hermitian ") + what);
            if (!M.allFinite())
                throw std::invalid_argument(std::string("SdpProblem: non-finite ") + what);
        };
        check_herm(C, "objective");
        for (const auto& c : equalities) check_herm(c.A, "equality");
        for (const auto& c : inequalities) check_herm(c.A, "inequality");
    }
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalTrouble };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::MaxIter: return "max_iter";
        default: return "numerical_trouble";
    }
}

struct SdpSolution {
    CMatrix W;
    double objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    SdpStatus status = SdpStatus::NumericalTrouble;
};

/// Iteration diagnostics callback: (iter, mu, primal_res, dual_res, gap).
using SdpLog = std::function<void(int, double, double, double, double)>;

/// Standard real symmetric embedding [[Re M, -Im M], [Im M, Re M]] of a
/// Hermitian matrix; tr of an embedded product is twice the real trace of
/// the complex product.
inline RMatrix hermitian_to_real_embedding(const CMatrix& M) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("hermitian_to_real_embedding: input not Hermitian");
    const auto n = M.rows();
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = M.real();
    out.topRightCorner(n, n) = -M.imag();
    out.bottomLeftCorner(n, n) = M.imag();
    out.bottomRightCorner(n, n) = M.real();
    return out;
}

namespace detail {

inline double real_inner(const CMatrix& A, const CMatrix& B) {
    // Re tr(A B) for Hermitian A; O(n^2).
    return A.cwiseProduct(B.transpose()).sum().real();
}

inline void hermitianize(CMatrix& M) { M = 0.5 * (M + M.adjoint()).eval(); }

/// Largest alpha with S + alpha*D >= 0, via lambda_min of L^{-1} D L^{-H}.
inline double max_psd_step(const Eigen::LLT<CMatrix>& llt, const CMatrix& D) {
    const CMatrix Linv_D = llt.matrixL().solve(D);
    const CMatrix G = llt.matrixL().solve(Linv_D.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (G + G.adjoint()),
                                              Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-8,
                             int max_iter = 200, const SdpLog& log = {}) {
    problem.validate();
    const int n = problem.size();
    const int p = static_cast<int>(problem.inequalities.size());
    const int N = n + p;
    const int m = static_cast<int>(problem.equalities.size()) + p;

    // Lifted, normalized data.  Each constraint is scaled by its Frobenius
    // norm and the right-hand side additionally by a common factor absorbed
    // into X, keeping iterates near unit scale.
    std::vector<CMatrix> A(m);
    RVector b(m);
    {
        int idx = 0;
        for (const auto& c : problem.equalities) {
            CMatrix lifted = CMatrix::Zero(N, N);
            lifted.topLeftCorner(n, n) = c.A;
            const double s = std::max(1e-12, lifted.norm());
            A[idx] = lifted / s;
            b[idx] = c.rhs / s;
            ++idx;
        }
        for (int q = 0; q < p; ++q) {
            const auto& c = problem.inequalities[q];
            CMatrix lifted = CMatrix::Zero(N, N);
            lifted.topLeftCorner(n, n) = c.A;
            lifted(n + q, n + q) = 1.0;  // slack
            const double s = std::max(1e-12, lifted.norm());
            A[idx] = lifted / s;
            b[idx] = c.rhs / s;
            ++idx;
        }
    }
    const double b_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    b /= b_scale;

    CMatrix C_min = CMatrix::Zero(N, N);  // minimize <C_min, X>
    C_min.topLeftCorner(n, n) = -problem.C;
    const double c_scale = std::max(1.0, C_min.norm());
    C_min /= c_scale;

    // Start point.
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(N)),
                                 2.0 * b.cwiseAbs().maxCoeff()});
    CMatrix X = eta * CMatrix::Identity(N, N);
    CMatrix Z = eta * CMatrix::Identity(N, N);
    RVector y = RVector::Zero(m);

    SdpSolution sol;
    auto finish = [&](SdpStatus status, int iters, double pres, double dres, double gap) {
        sol.status = status;
        sol.iterations = iters;
        sol.W = b_scale * X.topLeftCorner(n, n);
        detail::hermitianize(sol.W);
        sol.objective = problem.C.cwiseProduct(sol.W.transpose()).sum().real();
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.duality_gap = gap;
        return sol;
    };

    const double b_norm = 1.0 + b.norm();
    const double c_norm = 1.0 + C_min.norm();
    int stalled = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double mu = detail::real_inner(X, Z) / N;

        RVector rp(m);
        for (int i = 0; i < m; ++i) rp[i] = b[i] - detail::real_inner(A[i], X);
        CMatrix Rd = C_min - Z;
        for (int i = 0; i < m; ++i) Rd -= y[i] * A[i];

        const double pres = rp.norm() / b_norm;
        const double dres = Rd.norm() / c_norm;
        const double pobj = detail::real_inner(C_min, X);
        const double dobj = b.dot(y);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (log) log(iter, mu, pres, dres, gap);

        if (pres <= tol && dres <= tol && gap <= tol)
            return finish(SdpStatus::Optimal, iter, pres, dres, gap);

        // Dual objective diverging along a near-feasible dual direction means
        // the primal has no feasible point.  The same signature decides the
        // verdict when the iteration breaks down before full divergence.
        const bool dual_ray = dobj > 1e6 && dres < 1e-4 && pres > tol;
        if (dobj > 1e8 && dres < 1e-6 && pres > tol)
            return finish(SdpStatus::Infeasible, iter, pres, dres, gap);
        auto trouble = [&](int iters) {
            return finish(dual_ray ? SdpStatus::Infeasible : SdpStatus::NumericalTrouble,
                          iters, pres, dres, gap);
        };

        Eigen::LLT<CMatrix> lltZ(Z);
        Eigen::LLT<CMatrix> lltX(X);
        if (lltZ.info() != Eigen::Success || lltX.info() != Eigen::Success)
            return trouble(iter);
        const CMatrix Zi = lltZ.solve(CMatrix::Identity(N, N));

        // Schur complement M_ij = Re tr(A_i X A_j Z^{-1}).
        std::vector<CMatrix> XAZ(m);
        for (int j = 0; j < m; ++j) XAZ[j] = X * A[j] * Zi;
        RMatrix M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = detail::real_inner(A[i], XAZ[j]);
        M = 0.5 * (M + M.transpose()).eval();
        Eigen::LDLT<RMatrix> lltM(M);
        if (lltM.info() != Eigen::Success) return trouble(iter);

        const CMatrix XRdZ = X * Rd * Zi;
        auto solve_direction = [&](double sigma_mu, const CMatrix* corr)
            -> std::tuple<CMatrix, RVector, CMatrix> {
            CMatrix R3 = -X;
            if (sigma_mu != 0.0) R3 += sigma_mu * Zi;
            if (corr) R3 -= (*corr) * Zi;
            RVector rhs(m);
            for (int i = 0; i < m; ++i)
                rhs[i] = rp[i] - detail::real_inner(A[i], R3) + detail::real_inner(A[i], XRdZ);
            RVector dy = lltM.solve(rhs);
            CMatrix dZ = Rd;
            for (int i = 0; i < m; ++i) dZ -= dy[i] * A[i];
            CMatrix dX = R3 - (X * dZ) * Zi;
            detail::hermitianize(dX);
            detail::hermitianize(dZ);
            return {std::move(dX), std::move(dy), std::move(dZ)};
        };

        // Predictor.
        auto [dXa, dya, dZa] = solve_direction(0.0, nullptr);
        const double ap_aff = std::min(1.0, 0.98 * detail::max_psd_step(lltX, dXa));
        const double ad_aff = std::min(1.0, 0.98 * detail::max_psd_step(lltZ, dZa));
        const double gap_aff =
            detail::real_inner(X + ap_aff * dXa, Z + ad_aff * dZa) / N;
        double sigma = std::pow(std::max(0.0, gap_aff) / std::max(mu, 1e-300), 3.0);
        sigma = std::min(1.0, std::max(1e-8, sigma));

        // Corrector.
        const CMatrix corr = dXa * dZa;
        auto [dX, dy, dZ] = solve_direction(sigma * mu, &corr);
        const double ap = std::min(1.0, 0.98 * detail::max_psd_step(lltX, dX));
        const double ad = std::min(1.0, 0.98 * detail::max_psd_step(lltZ, dZ));

        if (ap < 1e-10 && ad < 1e-10) {
            if (++stalled >= 3) return trouble(iter);
        } else {
            stalled = 0;
        }

        X += ap * dX;
        y += ad * dy;
        Z += ad * dZ;
        detail::hermitianize(X);
        detail::hermitianize(Z);
    }

    // Recompute certificates for the final iterate.
    RVector rp(m);
    for (int i = 0; i < m; ++i) rp[i] = b[i] - detail::real_inner(A[i], X);
    CMatrix Rd = C_min - Z;
    for (int i = 0; i < m; ++i) Rd -= y[i] * A[i];
    const double pobj = detail::real_inner(C_min, X);
    const double dobj = b.dot(y);
    return finish(SdpStatus::MaxIter, max_iter, rp.norm() / b_norm, Rd.norm() / c_norm,
                  std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj)));
}

}  // namespace risfim
