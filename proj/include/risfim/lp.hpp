#pragma once

// Dense primal simplex for small linear programs
//
//   maximize c.x  subject to  A x <= b,  x >= 0
//
// Tableau form with Bland's rule throughout, so the method cannot cycle and
// the returned vertex is deterministic.  Sized for the power-allocation
// problems in this library (k <= 64 variables, a handful of rows); no
// sparsity, no revised simplex.

#include "risfim/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace risfim {

struct LpProblem {
    RVector c;     // objective, maximize
    RMatrix A_ub;  // m x n
    RVector b_ub;  // m

    void validate() const {
        if (A_ub.rows() != b_ub.size() || A_ub.cols() != c.size())
            throw std::invalid_argument("LpProblem: inconsistent shapes");
        if (!c.allFinite() || !A_ub.allFinite() || !b_ub.allFinite())
            throw std::invalid_argument("LpProblem: non-finite entries");
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    RVector x;
    double value = 0.0;
    LpStatus status = LpStatus::Optimal;
};

namespace detail {

// One simplex phase on an explicit tableau.  rows x cols tableau holds
// [B^{-1}A | B^{-1}b]; `cost` is the reduced-cost row (maximization).
// Returns false when the problem is unbounded in the improving direction.
inline bool simplex_iterate(RMatrix& T, RVector& cost, double& obj,
                            std::vector<int>& basis) {
    const int m = static_cast<int>(T.rows());
    const int n = static_cast<int>(T.cols()) - 1;
    const double eps = 1e-11;
    for (;;) {
        // Bland: entering variable = smallest index with positive reduced cost.
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (cost[j] > eps) { enter = j; break; }
        }
        if (enter < 0) return true;  // optimal
        // Ratio test; ties broken by smallest basis variable index.
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (T(i, enter) > eps) {
                const double ratio = T(i, n) / T(i, enter);
                if (ratio < best_ratio - eps ||
                    (ratio < best_ratio + eps && (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return false;  // unbounded
        // Pivot.
        const double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i != leave && std::abs(T(i, enter)) > 0.0)
                T.row(i) -= T(i, enter) * T.row(leave);
        }
        obj += cost[enter] * T(leave, n);
        cost -= cost[enter] * T.row(leave).head(n);
        basis[leave] = enter;
    }
}

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& problem) {
    problem.validate();
    const int n = static_cast<int>(problem.c.size());
    const int m = static_cast<int>(problem.A_ub.rows());

    LpSolution sol;
    if (m == 0) {
        // No constraints: optimum is x = 0 unless some c_j > 0 (unbounded).
        sol.x = RVector::Zero(n);
        sol.status = (problem.c.array() > 0.0).any() ? LpStatus::Unbounded : LpStatus::Optimal;
        return sol;
    }

    // Tableau over structural + slack variables; rows with negative b are
    // flipped so Phase I can start from a nonnegative right-hand side.
    const int total = n + m;
    RMatrix T(m, total + 1);
    T.setZero();
    std::vector<int> basis(m);
    bool need_phase1 = false;
    for (int i = 0; i < m; ++i) {
        double sign = 1.0;
        if (problem.b_ub[i] < 0.0) {
            sign = -1.0;
            need_phase1 = true;
        }
        T.block(i, 0, 1, n) = sign * problem.A_ub.row(i);
        T(i, n + i) = sign;  // slack (negative slack column when flipped)
        T(i, total) = sign * problem.b_ub[i];
        basis[i] = n + i;
    }

    if (need_phase1) {
        // Phase I with artificial variables on the flipped rows.
        std::vector<int> art_rows;
        for (int i = 0; i < m; ++i)
            if (problem.b_ub[i] < 0.0) art_rows.push_back(i);
        const int na = static_cast<int>(art_rows.size());
        RMatrix T1(m, total + na + 1);
        T1.setZero();
        T1.block(0, 0, m, total) = T.leftCols(total);
        T1.col(total + na) = T.col(total);
        RVector cost1 = RVector::Zero(total + na);
        double obj1 = 0.0;
        std::vector<int> basis1 = basis;
        for (int a = 0; a < na; ++a) {
            const int i = art_rows[a];
            T1(i, total + a) = 1.0;
            basis1[i] = total + a;
            // Maximize -sum(artificials): price out the artificial rows.
            cost1.head(total) += T1.row(i).head(total);
            obj1 -= T1(i, total + na);
        }
        detail::simplex_iterate(T1, cost1, obj1, basis1);
        if (obj1 < -1e-8) {
            sol.x = RVector::Zero(n);
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Drive any remaining artificials out of the basis, then drop them.
        for (int i = 0; i < m; ++i) {
            if (basis1[i] >= total) {
                int enter = -1;
                for (int j = 0; j < total; ++j)
                    if (std::abs(T1(i, j)) > 1e-9) { enter = j; break; }
                if (enter >= 0) {
                    const double piv = T1(i, enter);
                    T1.row(i) /= piv;
                    for (int ii = 0; ii < m; ++ii)
                        if (ii != i) T1.row(ii) -= T1(ii, enter) * T1.row(i);
                    basis1[i] = enter;
                }
            }
        }
        T.leftCols(total) = T1.leftCols(total);
        T.col(total) = T1.col(total + na);
        basis = basis1;
    }

    // Phase II: reduced costs of the original objective w.r.t. the basis.
    RVector cost = RVector::Zero(total);
    cost.head(n) = problem.c;
    double obj = 0.0;
    for (int i = 0; i < m; ++i) {
        const int bv = basis[i];
        if (bv < total && std::abs(cost[bv]) > 0.0) {
            obj += cost[bv] * T(i, total);
            cost -= cost[bv] * T.row(i).head(total);
        }
    }
    const bool bounded = detail::simplex_iterate(T, cost, obj, basis);
    if (!bounded) {
        sol.x = RVector::Zero(n);
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.x = RVector::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) sol.x[basis[i]] = std::max(0.0, T(i, total));
    sol.value = problem.c.dot(sol.x);
    sol.status = LpStatus::Optimal;
    return sol;
}

}  // namespace risfim
