#pragma once

// Maximum-likelihood estimation of the complex parameter vector under the
// linear Gaussian model, and the Monte Carlo MSE harness used to compare
// design algorithms on a practical estimator.
//
// Parameters with zero allocated power are inactive: they are excluded from
// estimation and from the averaged MSE.

#include "risfim/fisher.hpp"
#include "risfim/rng.hpp"
#include "risfim/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace risfim {

struct MseReport {
    double avg_mse = 0.0;      // per active parameter
    int active_count = 0;
    int trials = 0;
    double crlb_trace = 0.0;   // tr of the inverse FIM over active parameters
    double std_error = 0.0;    // standard error of avg_mse
};

namespace detail {

inline std::vector<int> active_indices(const PowerAllocation& P) {
    std::vector<int> idx;
    for (int i = 0; i < P.p.size(); ++i)
        if (P.p[i] > 0.0) idx.push_back(i);
    return idx;
}

inline CMatrix active_columns(const CMatrix& H, const std::vector<int>& idx) {
    CMatrix Ha(H.rows(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) Ha.col(c) = H.col(idx[c]);
    return Ha;
}

/// Kahan-compensated accumulator so the reported MSE does not depend on
/// summation order beyond 1e-12.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

/// Weighted least squares over the active columns:
///   theta_hat = (H_a^H Sigma^{-1} H_a)^{-1} H_a^H Sigma^{-1} y.
/// Throws when the active channel is rank deficient (smallest singular
/// value below 1e-10 of the largest).
inline CVector mle(const SystemModel& model, const RisProfile& omega, const PowerAllocation& P,
                   const CVector& y, Receiver who) {
    const CMatrix H = effective_channel(model, omega, P, who);
    const auto idx = detail::active_indices(P);
    if (idx.empty()) return CVector(0);
    const CMatrix Ha = detail::active_columns(H, idx);

    Eigen::JacobiSVD<CMatrix> svd(Ha);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (smax <= 0.0 || smin < 1e-10 * smax)
        throw std::runtime_error("mle: rank-deficient active channel (condition " +
                                 std::to_string(smax / std::max(smin, 1e-300)) + ")");

    const CMatrix Sigma_inv = detail::inverse_covariance(detail::covariance(model, who));
    const CMatrix G = Ha.adjoint() * Sigma_inv * Ha;
    return Eigen::LLT<CMatrix>(G).solve(Ha.adjoint() * (Sigma_inv * y));
}

/// Monte Carlo MSE of the ML estimator: draws circularly symmetric noise
/// per trial, accumulates squared error over active parameters, and reports
/// the per-active-parameter average together with the matching CRLB trace.
inline MseReport monte_carlo_mse(const SystemModel& model, const RisProfile& omega,
                                 const PowerAllocation& P, Receiver who,
                                 const CVector& theta_true, int trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("monte_carlo_mse: trials must be >= 1");
    if (theta_true.size() != model.dims.k)
        throw std::invalid_argument("monte_carlo_mse: theta size mismatch");

    const CMatrix H = effective_channel(model, omega, P, who);
    const auto idx = detail::active_indices(P);
    MseReport report;
    report.trials = trials;
    report.active_count = static_cast<int>(idx.size());
    if (idx.empty()) return report;

    const CMatrix Ha = detail::active_columns(H, idx);
    const CMatrix& Sigma = detail::covariance(model, who);
    const CMatrix Sigma_inv = detail::inverse_covariance(Sigma);
    const CMatrix G = Ha.adjoint() * Sigma_inv * Ha;
    Eigen::LLT<CMatrix> lltG(G);
    if (lltG.info() != Eigen::Success)
        throw std::runtime_error("monte_carlo_mse: rank-deficient active channel");
    report.crlb_trace =
        std::real(lltG.solve(CMatrix::Identity(G.rows(), G.cols())).trace());

    // Noise is Sigma^{1/2} g with g ~ CN(0, I).
    Eigen::LLT<CMatrix> lltS(Sigma);
    const CMatrix noise_factor = lltS.matrixL();

    CVector theta_active(idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) theta_active[c] = theta_true[idx[c]];
    const CVector mean = H * theta_true;
    const CMatrix estimator = lltG.solve(Ha.adjoint() * Sigma_inv);  // k_a x n

    detail::CompensatedSum total;
    detail::CompensatedSum total_sq;
    const int n = static_cast<int>(H.rows());
    for (int t = 0; t < trials; ++t) {
        CVector g(n);
        for (int i = 0; i < n; ++i) g[i] = rng.complex_gaussian();
        const CVector y = mean + noise_factor * g;
        const CVector err = estimator * y - theta_active;
        const double trial_mse = err.squaredNorm() / static_cast<double>(idx.size());
        total.add(trial_mse);
        total_sq.add(trial_mse * trial_mse);
    }
    report.avg_mse = total.sum / trials;
    const double var =
        std::max(0.0, total_sq.sum / trials - report.avg_mse * report.avg_mse);
    report.std_error = std::sqrt(var / trials);
    return report;
}

}  // namespace risfim
