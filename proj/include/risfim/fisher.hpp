#pragma once

// Fisher information machinery for the linear Gaussian measurement model
//
//   y_i = (H_ri diag(omega) H_ar + H_ai) diag(sqrt(p)) theta + eta_i
//
// with circularly symmetric noise.  Provides the effective channel, the
// block FIM, the trace objective, and its exact reformulation as quadratic
// and linear forms in the RIS vector omega and in the power vector p.

#include "risfim/types.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace risfim {

enum class Receiver { Bob, Eve };

namespace detail {

inline const CMatrix& ris_channel(const SystemModel& m, Receiver who) {
    return who == Receiver::Bob ? m.H_rb : m.H_re;
}
inline const CMatrix& covariance(const SystemModel& m, Receiver who) {
    return who == Receiver::Bob ? m.Sigma_b : m.Sigma_e;
}
inline const std::optional<CMatrix>& los_channel(const SystemModel& m, Receiver who) {
    return who == Receiver::Bob ? m.H_ab : m.H_ae;
}

/// Sigma^{-1} via Cholesky; throws on a numerically singular covariance.
inline CMatrix inverse_covariance(const CMatrix& Sigma) {
    Eigen::LLT<CMatrix> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("covariance matrix is not positive definite");
    return llt.solve(CMatrix::Identity(Sigma.rows(), Sigma.cols()));
}

}  // namespace detail

/// Quadratic and linear forms expressing both FIM traces as functions of the
/// RIS vector:  trace_i(omega) = omega^H Q_i omega
///                               + omega^T q_tilde_i + omega^H conj(q_tilde_i)
///                               + const_i
/// (the linear and constant terms appear only when direct paths are present).
struct QuadraticForms {
    CMatrix Q_b;  // r x r Hermitian
    CMatrix Q_e;  // r x r Hermitian
    std::optional<CVector> q_tilde_b;
    std::optional<CVector> q_tilde_e;
    double const_b = 0.0;
    double const_e = 0.0;

    int size() const { return static_cast<int>(Q_b.rows()); }
    bool has_linear_terms() const { return q_tilde_b.has_value(); }

    const CMatrix& Q(Receiver who) const { return who == Receiver::Bob ? Q_b : Q_e; }
    const std::optional<CVector>& q_tilde(Receiver who) const {
        return who == Receiver::Bob ? q_tilde_b : q_tilde_e;
    }
    double constant(Receiver who) const { return who == Receiver::Bob ? const_b : const_e; }

    /// omega^H Q omega (+ linear terms when present), excluding const_i.
    double quadratic_value(Receiver who, const CVector& omega) const {
        const CMatrix& Qm = Q(who);
        double v = std::real(Complex(omega.adjoint() * Qm * omega));
        if (const auto& q = q_tilde(who); q.has_value())
            v += 2.0 * std::real(Complex(omega.transpose() * (*q)));
        return v;
    }

    /// Full trace value including the omega-independent constant.
    double trace_value(Receiver who, const CVector& omega) const {
        return quadratic_value(who, omega) + constant(who);
    }
};

/// Real diagonals of the power-allocation Gram matrices A_b, A_e: the FIM
/// traces are sum_i alpha_i p_i and sum_i beta_i p_i for a fixed omega.
struct DiagonalForms {
    RVector alpha;  // length k, Bob
    RVector beta;   // length k, Eve
};

/// Discrete mixture modeling imperfect knowledge of the eavesdropper's
/// combined channel-noise matrix E = H_re^H Sigma_e^{-1} H_re (r x r PSD).
struct EavesdropperMixture {
    std::vector<CMatrix> E;
    std::vector<double> weight;

    bool valid(double tol = 1e-9) const {
        if (E.empty() || E.size() != weight.size()) return false;
        double sum = 0.0;
        for (double w : weight) {
            if (w < 0.0) return false;
            sum += w;
        }
        return std::abs(sum - 1.0) <= tol;
    }
};

/// Effective channel H_i = H_ri diag(omega) H_ar diag(sqrt p), plus
/// H_ai diag(sqrt p) when a direct path is present.
inline CMatrix effective_channel(const SystemModel& m, const RisProfile& omega,
                                 const PowerAllocation& P, Receiver who) {
    const CMatrix& H_ri = detail::ris_channel(m, who);
    if (omega.omega.size() != m.dims.r || P.p.size() != m.dims.k)
        throw std::invalid_argument("effective_channel: shape mismatch");
    const RVector sqrt_p = P.p.array().max(0.0).sqrt();
    CMatrix H = H_ri * omega.omega.asDiagonal() * m.H_ar;
    if (const auto& H_ai = detail::los_channel(m, who); H_ai.has_value()) H += *H_ai;
    return H * sqrt_p.cast<Complex>().asDiagonal();
}

/// The two nonzero k x k blocks of the FIM for the stacked parameter
/// [theta; conj(theta)]: (H^H Sigma^{-*} H, H^T Sigma^{-1} H^*).  The
/// off-diagonal blocks vanish for circularly symmetric noise.
inline std::pair<CMatrix, CMatrix> fim_blocks(const SystemModel& m, const RisProfile& omega,
                                              const PowerAllocation& P, Receiver who) {
    const CMatrix H = effective_channel(m, omega, P, who);
    const CMatrix Sigma_inv = detail::inverse_covariance(detail::covariance(m, who));
    CMatrix first = H.adjoint() * Sigma_inv.conjugate() * H;
    CMatrix second = H.transpose() * Sigma_inv * H.conjugate();
    return {std::move(first), std::move(second)};
}

/// tr{H^H Sigma^{-1} H}: the average Fisher information at the receiver.
inline double fim_trace(const SystemModel& m, const RisProfile& omega,
                        const PowerAllocation& P, Receiver who) {
    const CMatrix H = effective_channel(m, omega, P, who);
    const CMatrix Sigma_inv = detail::inverse_covariance(detail::covariance(m, who));
    return std::real((H.adjoint() * Sigma_inv * H).trace());
}

/// Rank-one term S_{i,j} = (column j of H_ri) (row j of H_ar diag(sqrt p)),
/// so that the reflected effective channel equals sum_j omega_j S_{i,j}.
inline CMatrix build_S(const SystemModel& m, const PowerAllocation& P, Receiver who, int j) {
    if (j < 0 || j >= m.dims.r)
        throw std::out_of_range("build_S: RIS index out of range");
    const CMatrix& H_ri = detail::ris_channel(m, who);
    const RVector sqrt_p = P.p.array().max(0.0).sqrt();
    const CVector col = H_ri.col(j);
    const Eigen::RowVectorXcd row =
        m.H_ar.row(j).cwiseProduct(sqrt_p.transpose().cast<Complex>());
    return col * row;
}

namespace detail {

/// Q_i from the receiver-side Gram G = H_ri^H Sigma_i^{-1} H_ri and the
/// transmitter-side Gram T = (H_ar P)(H_ar P)^H:
///   [Q_i]_{j,l} = tr{S_{i,j}^H Sigma_i^{-1} S_{i,l}} = G_{j,l} conj(T_{j,l}).
inline CMatrix quadratic_form_from_grams(const CMatrix& G, const CMatrix& T) {
    return G.cwiseProduct(T.conjugate());
}

}  // namespace detail

/// Builds Q_b, Q_e (and the direct-path linear/constant terms when present)
/// for a fixed power allocation.  Throws when a covariance is singular.
inline QuadraticForms build_quadratic_forms(const SystemModel& m, const PowerAllocation& P) {
    if (P.p.size() != m.dims.k)
        throw std::invalid_argument("build_quadratic_forms: power size mismatch");
    const RVector sqrt_p = P.p.array().max(0.0).sqrt();
    const CMatrix HarP = m.H_ar * sqrt_p.cast<Complex>().asDiagonal();
    const CMatrix T = HarP * HarP.adjoint();

    QuadraticForms f;
    const CMatrix Sb_inv = detail::inverse_covariance(m.Sigma_b);
    const CMatrix Se_inv = detail::inverse_covariance(m.Sigma_e);
    const CMatrix G_b = m.H_rb.adjoint() * Sb_inv * m.H_rb;
    const CMatrix G_e = m.H_re.adjoint() * Se_inv * m.H_re;
    f.Q_b = detail::quadratic_form_from_grams(G_b, T);
    f.Q_e = detail::quadratic_form_from_grams(G_e, T);

    if (m.has_los()) {
        // q_tilde_i[j] = tr{P H_ai^H Sigma^{-1} S_{i,j}}
        //             = (row j of H_ar P) P H_ai^H Sigma^{-1} (col j of H_ri)
        auto build_q = [&](const CMatrix& H_ai, const CMatrix& Sigma_inv, const CMatrix& H_ri) {
            const CMatrix left = HarP * sqrt_p.cast<Complex>().asDiagonal() *
                                 H_ai.adjoint() * Sigma_inv;  // r x n_i
            CVector q(m.dims.r);
            for (int j = 0; j < m.dims.r; ++j) q[j] = left.row(j) * H_ri.col(j);
            return q;
        };
        f.q_tilde_b = build_q(*m.H_ab, Sb_inv, m.H_rb);
        f.q_tilde_e = build_q(*m.H_ae, Se_inv, m.H_re);
        auto build_const = [&](const CMatrix& H_ai, const CMatrix& Sigma_inv) {
            const CMatrix HP = H_ai * sqrt_p.cast<Complex>().asDiagonal();
            return std::real((HP.adjoint() * Sigma_inv * HP).trace());
        };
        f.const_b = build_const(*m.H_ab, Sb_inv);
        f.const_e = build_const(*m.H_ae, Se_inv);
    }
    return f;
}

/// Minimum-eigenvalue check of a built Q against the PD threshold
/// 1e-12 * trace(Q) / r; returns the minimum eigenvalue.
inline double min_eigenvalue(const CMatrix& Q) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Q, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline bool is_positive_definite_form(const CMatrix& Q, double* lambda_min_out = nullptr) {
    const double lmin = min_eigenvalue(Q);
    if (lambda_min_out) *lambda_min_out = lmin;
    const double threshold = 1e-12 * std::real(Q.trace()) / std::max<int>(1, Q.rows());
    return lmin > threshold;
}

/// Diagonals of A_i = (H_ri Omega H_ar)^H Sigma_i^{-1} (H_ri Omega H_ar)
/// (with the four direct-path terms added when present), as real vectors.
inline DiagonalForms build_diagonal_forms(const SystemModel& m, const RisProfile& omega) {
    if (omega.omega.size() != m.dims.r)
        throw std::invalid_argument("build_diagonal_forms: omega size mismatch");
    auto diag_for = [&](Receiver who) {
        const CMatrix Sigma_inv = detail::inverse_covariance(detail::covariance(m, who));
        CMatrix G = detail::ris_channel(m, who) * omega.omega.asDiagonal() * m.H_ar;
        if (const auto& H_ai = detail::los_channel(m, who); H_ai.has_value()) G += *H_ai;
        RVector d(m.dims.k);
        const CMatrix A = G.adjoint() * Sigma_inv * G;
        for (int i = 0; i < m.dims.k; ++i) d[i] = std::real(A(i, i));
        return d;
    };
    DiagonalForms forms;
    forms.alpha = diag_for(Receiver::Bob);
    forms.beta = diag_for(Receiver::Eve);
    return forms;
}

/// Q_e under a discrete mixture over the eavesdropper matrix E, i.e. built
/// from E_bar = sum_j weight_j E_j in place of H_re^H Sigma_e^{-1} H_re.
inline CMatrix average_eavesdropper_Q(const SystemModel& m, const PowerAllocation& P,
                                      const EavesdropperMixture& mixture) {
    if (!mixture.valid())
        throw std::invalid_argument("average_eavesdropper_Q: invalid mixture");
    CMatrix E_bar = CMatrix::Zero(m.dims.r, m.dims.r);
    for (std::size_t j = 0; j < mixture.E.size(); ++j) E_bar += mixture.weight[j] * mixture.E[j];
    const RVector sqrt_p = P.p.array().max(0.0).sqrt();
    const CMatrix HarP = m.H_ar * sqrt_p.cast<Complex>().asDiagonal();
    const CMatrix T = HarP * HarP.adjoint();
    return detail::quadratic_form_from_grams(E_bar, T);
}

/// The bracket r*lambda_min <= omega^H Q omega <= r*lambda_max valid for all
/// unit-modulus omega.
inline std::pair<double, double> eigenvalue_bounds(const CMatrix& Q) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Q, Eigen::EigenvaluesOnly);
    const double r = static_cast<double>(Q.rows());
    return {r * es.eigenvalues().minCoeff(), r * es.eigenvalues().maxCoeff()};
}

/// Debug serialization ("forms_v1").
inline nlohmann::json to_json(const QuadraticForms& f) {
    nlohmann::json j;
    j["schema"] = "forms_v1";
    auto mat = [](const CMatrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < m.cols(); ++c) row.push_back({m(i, c).real(), m(i, c).imag()});
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["Q_b"] = mat(f.Q_b);
    j["Q_e"] = mat(f.Q_e);
    if (f.has_linear_terms()) {
        auto vec = [](const CVector& v) {
            nlohmann::json out = nlohmann::json::array();
            for (int i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
            return out;
        };
        j["q_tilde_b"] = vec(*f.q_tilde_b);
        j["q_tilde_e"] = vec(*f.q_tilde_e);
        j["const_b"] = f.const_b;
        j["const_e"] = f.const_e;
    }
    return j;
}

}  // namespace risfim
