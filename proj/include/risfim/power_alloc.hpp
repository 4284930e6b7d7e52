#pragma once

// Power allocation for a fixed RIS profile:
//
//   maximize sum_i alpha_i p_i
//   s.t.     sum_i beta_i p_i <= delta,  sum_i p_i <= budget,  p >= 0
//
// solved by the simplex method, plus an exhaustive two-support oracle used
// for testing (a two-row LP always has a vertex optimum with at most two
// strictly positive entries).

#include "risfim/lp.hpp"
#include "risfim/types.hpp"

#include <limits>
#include <stdexcept>

namespace risfim {

struct PowerProblem {
    RVector alpha;
    RVector beta;
    double delta = 0.0;
    double budget = 0.0;

    void validate() const {
        if (alpha.size() != beta.size())
            throw std::invalid_argument("PowerProblem: alpha/beta size mismatch");
        if ((alpha.array() < 0.0).any() || (beta.array() < 0.0).any())
            throw std::invalid_argument("PowerProblem: negative coefficients");
        if (delta < 0.0 || budget <= 0.0)
            throw std::invalid_argument("PowerProblem: invalid delta or budget");
    }
};

namespace detail {

/// Powers below 1e-12 * budget are snapped to exact zero (inactive
/// parameters, excluded from MSE averaging downstream).
inline void snap_small_powers(RVector& p, double budget) {
    const double floor = 1e-12 * budget;
    for (int i = 0; i < p.size(); ++i)
        if (p[i] < floor) p[i] = 0.0;
}

}  // namespace detail

inline PowerAllocation optimal_power(const PowerProblem& problem) {
    problem.validate();
    const int k = static_cast<int>(problem.alpha.size());
    LpProblem lp;
    lp.c = problem.alpha;
    lp.A_ub = RMatrix(2, k);
    lp.A_ub.row(0) = problem.beta.transpose();
    lp.A_ub.row(1) = RVector::Ones(k).transpose();
    lp.b_ub = RVector(2);
    lp.b_ub << problem.delta, problem.budget;
    const LpSolution sol = solve_lp(lp);
    // p = 0 is always feasible, and the budget row bounds the objective.
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("optimal_power: unexpected LP status");
    PowerAllocation pa;
    pa.p = sol.x;
    pa.budget = problem.budget;
    detail::snap_small_powers(pa.p, problem.budget);
    return pa;
}

/// Exhaustive enumeration of single-index and index-pair basic solutions of
/// the two rows; independent of the simplex path.  Ties break to the lowest
/// index (pair), matching the solver's determinism contract.
inline PowerAllocation two_support_oracle(const PowerProblem& problem) {
    problem.validate();
    const int k = static_cast<int>(problem.alpha.size());
    if (k > 64) throw std::invalid_argument("two_support_oracle: k too large");
    const double inf = std::numeric_limits<double>::infinity();
    const double delta = problem.delta;
    const double budget = problem.budget;

    RVector best = RVector::Zero(k);
    double best_value = 0.0;

    auto consider = [&](const RVector& p) {
        if ((p.array() < -1e-12).any()) return;
        if (problem.beta.dot(p) > delta * (1.0 + 1e-12) + 1e-15) return;
        if (p.sum() > budget * (1.0 + 1e-12)) return;
        const double v = problem.alpha.dot(p);
        if (v > best_value * (1.0 + 1e-12) + 1e-300) {
            best_value = v;
            best = p;
        }
    };

    // Single-support: p_i = min(budget, delta / beta_i), with delta/0 = inf.
    for (int i = 0; i < k; ++i) {
        const double cap = problem.beta[i] > 0.0 ? delta / problem.beta[i] : inf;
        RVector p = RVector::Zero(k);
        p[i] = std::min(budget, cap);
        consider(p);
    }
    // Pair-support: both rows tight.
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const double bi = problem.beta[i], bj = problem.beta[j];
            const double det = bi - bj;
            if (std::abs(det) < 1e-14 * std::max(1.0, std::abs(bi) + std::abs(bj))) continue;
            // beta_i p_i + beta_j p_j = delta, p_i + p_j = budget
            const double pi = (delta - bj * budget) / det;
            const double pj = budget - pi;
            if (pi < -1e-12 || pj < -1e-12) continue;
            RVector p = RVector::Zero(k);
            p[i] = std::max(0.0, pi);
            p[j] = std::max(0.0, pj);
            consider(p);
        }
    }

    PowerAllocation pa;
    pa.p = best;
    pa.budget = budget;
    detail::snap_small_powers(pa.p, budget);
    return pa;
}

}  // namespace risfim
