#pragma once

// RIS phase profile design: lifting the quadratic problem
//
//   max omega^H Q_b omega  s.t.  omega^H Q_e omega <= delta, |omega_i| = 1
//
// to a semidefinite program over W = omega omega^H, recovering a rank-one
// candidate via eigenvector decomposition (ED) and Gaussian randomization
// (GR), homogenizing the direct-path variant, and estimating the smallest
// feasible secrecy limit.
//
// All objective and constraint values here live in "SDR space": they exclude
// the omega-independent direct-path constant, which is re-added when full
// FIM traces are reported.

#include "risfim/fisher.hpp"
#include "risfim/rng.hpp"
#include "risfim/sdp.hpp"
#include "risfim/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace risfim {

struct RisDesignProblem {
    QuadraticForms forms;
    double delta = 0.0;
    ModulusRegime regime = ModulusRegime::UnitModulus;

    bool has_los() const { return forms.has_linear_terms(); }

    void validate() const {
        if (delta < 0.0) throw std::invalid_argument("RisDesignProblem: delta < 0");
    }
};

enum class RankReduceMethod { ED, GR };

struct RankOneResult {
    RisProfile omega;
    double bob_value = 0.0;  // omega-dependent part of Bob's trace
    double eve_value = 0.0;  // omega-dependent part of Eve's trace
    RankReduceMethod method = RankReduceMethod::ED;
    int gr_draws_used = 0;
    bool feasible = false;
};

namespace detail {

/// Bordered matrix [[Q, conj(q)], [q^T, 0]] of the homogenized problem.
inline CMatrix bordered_form(const CMatrix& Q, const CVector& q) {
    const int r = static_cast<int>(Q.rows());
    CMatrix M = CMatrix::Zero(r + 1, r + 1);
    M.topLeftCorner(r, r) = Q;
    M.topRightCorner(r, 1) = q.conjugate();
    M.bottomLeftCorner(1, r) = q.transpose();
    return M;
}

inline SdpConstraint diag_constraint(int n, int i, double rhs) {
    CMatrix E = CMatrix::Zero(n, n);
    E(i, i) = 1.0;
    return {std::move(E), rhs};
}

}  // namespace detail

/// Homogenized size-(r+1) SDR for the direct-path problem; last diagonal
/// entry pinned to 1 (the auxiliary t), first r entries per regime.
inline SdpProblem homogenize(const QuadraticForms& forms, double delta,
                             ModulusRegime regime = ModulusRegime::UnitModulus) {
    if (!forms.has_linear_terms())
        throw std::invalid_argument("homogenize: no linear terms present");
    const int r = forms.size();
    SdpProblem sdp;
    sdp.C = detail::bordered_form(forms.Q_b, *forms.q_tilde_b);
    sdp.inequalities.push_back({detail::bordered_form(forms.Q_e, *forms.q_tilde_e), delta});
    for (int i = 0; i < r; ++i) {
        if (regime == ModulusRegime::UnitModulus)
            sdp.equalities.push_back(detail::diag_constraint(r + 1, i, 1.0));
        else
            sdp.inequalities.push_back(detail::diag_constraint(r + 1, i, 1.0));
    }
    sdp.equalities.push_back(detail::diag_constraint(r + 1, r, 1.0));
    return sdp;
}

/// The SDR of the phase design problem.  Unit modulus pins every diagonal
/// entry of W to 1; bounded magnitude relaxes them to <= 1.
inline SdpProblem assemble_sdr(const RisDesignProblem& problem) {
    problem.validate();
    if (problem.has_los()) return homogenize(problem.forms, problem.delta, problem.regime);
    const int r = problem.forms.size();
    SdpProblem sdp;
    sdp.C = problem.forms.Q_b;
    sdp.inequalities.push_back({problem.forms.Q_e, problem.delta});
    for (int i = 0; i < r; ++i) {
        if (problem.regime == ModulusRegime::UnitModulus)
            sdp.equalities.push_back(detail::diag_constraint(r, i, 1.0));
        else
            sdp.inequalities.push_back(detail::diag_constraint(r, i, 1.0));
    }
    return sdp;
}

namespace detail {

/// Projects a raw candidate vector onto the regime's feasible set.  For the
/// homogenized case the candidate carries a trailing t entry; the vector is
/// rotated by conj(t)/|t| first so that t maps to 1 (angle of 0 is taken
/// as 0, so a zero entry projects to 1).
inline CVector project_candidate(const CVector& raw, ModulusRegime regime, bool homogenized) {
    CVector v = raw;
    if (homogenized) {
        const Complex t = v[v.size() - 1];
        const double mag = std::abs(t);
        if (mag > 0.0) v *= std::conj(t) / mag;
        v.conservativeResize(v.size() - 1);
    }
    for (int i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        if (regime == ModulusRegime::UnitModulus) {
            v[i] = mag > 0.0 ? v[i] / mag : Complex(1.0, 0.0);
        } else if (mag > 1.0) {
            v[i] /= mag;
        }
    }
    return v;
}

}  // namespace detail

/// Rank-one recovery per the ED-then-GR scheme: the dominant-eigenvector
/// candidate is tried first; if it violates the secrecy constraint, up to L
/// Gaussian randomization draws are evaluated in draw order and the first
/// feasible one wins.  Candidates are projected to the modulus regime.
inline RankOneResult rank_reduce(const SdpSolution& solution, const RisDesignProblem& problem,
                                 int L, Rng& rng) {
    if (L <= 1) throw std::invalid_argument("rank_reduce: L must exceed 1");
    const CMatrix& W = solution.W;
    if (W.size() == 0 || W.cwiseAbs().maxCoeff() < 1e-300)
        throw std::runtime_error("rank_reduce: degenerate SDR solution");
    const bool homog = problem.has_los();
    const auto& forms = problem.forms;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(W);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("rank_reduce: eigendecomposition failed");
    const RVector evals = es.eigenvalues().cwiseMax(0.0);
    const CMatrix& U = es.eigenvectors();

    RankOneResult result;
    result.omega.regime = problem.regime;

    auto evaluate = [&](const CVector& omega) {
        return std::pair<double, double>{forms.quadratic_value(Receiver::Bob, omega),
                                         forms.quadratic_value(Receiver::Eve, omega)};
    };

    // ED candidate: sqrt(lambda_max) * v_max, phases projected.
    const int last = static_cast<int>(evals.size()) - 1;  // eigenvalues ascending
    const CVector ed_raw = std::sqrt(evals[last]) * U.col(last);
    CVector omega = detail::project_candidate(ed_raw, problem.regime, homog);
    auto [bob, eve] = evaluate(omega);
    if (eve <= problem.delta * (1.0 + 1e-9)) {
        result.omega.omega = omega;
        result.bob_value = bob;
        result.eve_value = eve;
        result.method = RankReduceMethod::ED;
        result.feasible = true;
        return result;
    }

    // GR: omega_tilde = U Lambda^{1/2} g with g ~ CN(0, I).
    const CMatrix ULhalf = U * evals.cwiseSqrt().cast<Complex>().asDiagonal();
    for (int draw = 0; draw < L; ++draw) {
        CVector g(W.rows());
        for (int i = 0; i < g.size(); ++i) g[i] = rng.complex_gaussian();
        omega = detail::project_candidate(ULhalf * g, problem.regime, homog);
        std::tie(bob, eve) = evaluate(omega);
        if (eve <= problem.delta * (1.0 + 1e-9)) {
            result.omega.omega = omega;
            result.bob_value = bob;
            result.eve_value = eve;
            result.method = RankReduceMethod::GR;
            result.gr_draws_used = draw + 1;
            result.feasible = true;
            return result;
        }
    }

    result.omega.omega = omega;  // last candidate, for diagnostics
    result.bob_value = bob;
    result.eve_value = eve;
    result.method = RankReduceMethod::GR;
    result.gr_draws_used = L;
    result.feasible = false;
    return result;
}

/// Estimates the smallest secrecy limit for which the unit-modulus phase
/// problem is feasible: solve the minimization SDR of omega^H Q_e omega
/// under [W]_ii = 1, then take the best (minimum) rank-one GR candidate
/// over L draws.  Always at least r * lambda_min(Q_e).
inline double feasibility_delta_min(const CMatrix& Q_e, int L, Rng& rng,
                                    double tol = 1e-8, int max_iter = 200) {
    const int r = static_cast<int>(Q_e.rows());
    SdpProblem sdp;
    sdp.C = -Q_e;  // maximize -tr{Q_e W}
    for (int i = 0; i < r; ++i) sdp.equalities.push_back(detail::diag_constraint(r, i, 1.0));
    const SdpSolution sol = solve_sdp(sdp, tol, max_iter);
    if (sol.status != SdpStatus::Optimal && sol.status != SdpStatus::MaxIter)
        throw std::runtime_error("feasibility_delta_min: SDR solve failed");

    Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.W);
    const RVector evals = es.eigenvalues().cwiseMax(0.0);
    const CMatrix ULhalf = es.eigenvectors() * evals.cwiseSqrt().cast<Complex>().asDiagonal();

    double best = std::numeric_limits<double>::infinity();
    for (int draw = 0; draw < L; ++draw) {
        CVector g(r);
        for (int i = 0; i < r; ++i) g[i] = rng.complex_gaussian();
        const CVector omega =
            detail::project_candidate(ULhalf * g, ModulusRegime::UnitModulus, false);
        const double value = std::real(Complex(omega.adjoint() * Q_e * omega));
        best = std::min(best, value);
    }
    return best;
}

}  // namespace risfim
