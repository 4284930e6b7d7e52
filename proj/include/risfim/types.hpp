#pragma once

// Core scenario types: dimensions, channels, RIS profiles, power allocations.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace risfim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Problem sizes: k parameters, r RIS elements, n_b / n_e receive antennas.
struct Dimensions {
    int k = 1;
    int r = 1;
    int n_b = 2;
    int n_e = 2;

    Dimensions() = default;
    Dimensions(int k_, int r_, int n_b_, int n_e_) : k(k_), r(r_), n_b(n_b_), n_e(n_e_) {
        if (k <= 0 || r <= 0 || n_b <= 0 || n_e <= 0)
            throw std::invalid_argument("Dimensions: all sizes must be positive");
    }

    /// Default benchmark protocol: receivers observe twice the parameter count.
    static Dimensions protocol(int k_, int r_) { return Dimensions(k_, r_, 2 * k_, 2 * k_); }

    bool operator==(const Dimensions&) const = default;
};

/// One scenario: all channel matrices and noise covariances.
///
/// The reflected path is Alice -> RIS -> receiver; H_ab / H_ae are optional
/// direct paths (present either both or neither).
struct SystemModel {
    Dimensions dims;
    CMatrix H_ar;   // r x k
    CMatrix H_rb;   // n_b x r
    CMatrix H_re;   // n_e x r
    CMatrix Sigma_b;  // n_b x n_b, Hermitian PD
    CMatrix Sigma_e;  // n_e x n_e, Hermitian PD
    std::optional<CMatrix> H_ab;  // n_b x k
    std::optional<CMatrix> H_ae;  // n_e x k

    bool has_los() const { return H_ab.has_value() && H_ae.has_value(); }
};

enum class ModulusRegime { UnitModulus, BoundedMagnitude };

inline const char* to_string(ModulusRegime regime) {
    return regime == ModulusRegime::UnitModulus ? "unit" : "bounded";
}

/// RIS reflection coefficients with their modulus regime.
struct RisProfile {
    CVector omega;
    ModulusRegime regime = ModulusRegime::UnitModulus;

    int size() const { return static_cast<int>(omega.size()); }

    /// Checks the per-element modulus constraint for the regime.
    bool satisfies_regime(double tol = 1e-9) const {
        for (int i = 0; i < omega.size(); ++i) {
            const double mag = std::abs(omega[i]);
            if (regime == ModulusRegime::UnitModulus) {
                if (std::abs(mag - 1.0) > tol) return false;
            } else {
                if (mag > 1.0 + tol) return false;
            }
        }
        return true;
    }

    static RisProfile all_ones(int r) {
        RisProfile p;
        p.omega = CVector::Ones(r);
        return p;
    }
};

/// Nonnegative per-parameter transmit powers under a total budget.
struct PowerAllocation {
    RVector p;
    double budget = 0.0;

    int size() const { return static_cast<int>(p.size()); }
    double total() const { return p.sum(); }

    bool within_budget(double rel_tol = 1e-9) const {
        if ((p.array() < 0.0).any()) return false;
        return p.sum() <= budget * (1.0 + rel_tol);
    }

    /// diag(sqrt(p)) as a dense complex matrix.
    CMatrix sqrt_matrix() const {
        CMatrix P = CMatrix::Zero(p.size(), p.size());
        for (int i = 0; i < p.size(); ++i) P(i, i) = std::sqrt(std::max(0.0, p[i]));
        return P;
    }

    static PowerAllocation equal(int k, double total_budget) {
        PowerAllocation pa;
        pa.p = RVector::Constant(k, total_budget / k);
        pa.budget = total_budget;
        return pa;
    }
};

}  // namespace risfim
