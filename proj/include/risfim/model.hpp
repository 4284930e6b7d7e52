#pragma once

// Channel generation and model validation for the simulation protocol,
// plus JSON (de)serialization of scenarios ("model_v1").
//
// Draw order is fixed so that other implementations can reproduce the same
// realization from the same generator: H_ar row-major, then H_rb, H_re, and
// (when present) H_ab, H_ae.  Each entry draws real part first, then
// imaginary part, both uniform on [-0.1, 0.1].

#include "risfim/rng.hpp"
#include "risfim/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace risfim {

namespace detail {

inline CMatrix draw_uniform_matrix(int rows, int cols, Rng& rng) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double re = rng.uniform(-0.1, 0.1);
            const double im = rng.uniform(-0.1, 0.1);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

}  // namespace detail

/// Draws a scenario per the benchmark protocol: i.i.d. uniform channel
/// entries on [-0.1, 0.1] and scaled-identity noise covariances.
inline SystemModel generate_channels(const Dimensions& dims, Rng& rng,
                                     double noise_variance, bool include_los = false) {
    if (noise_variance <= 0.0)
        throw std::invalid_argument("generate_channels: noise_variance must be positive");
    SystemModel m;
    m.dims = dims;
    m.H_ar = detail::draw_uniform_matrix(dims.r, dims.k, rng);
    m.H_rb = detail::draw_uniform_matrix(dims.n_b, dims.r, rng);
    m.H_re = detail::draw_uniform_matrix(dims.n_e, dims.r, rng);
    m.Sigma_b = noise_variance * CMatrix::Identity(dims.n_b, dims.n_b);
    m.Sigma_e = noise_variance * CMatrix::Identity(dims.n_e, dims.n_e);
    if (include_los) {
        m.H_ab = detail::draw_uniform_matrix(dims.n_b, dims.k, rng);
        m.H_ae = detail::draw_uniform_matrix(dims.n_e, dims.k, rng);
    }
    return m;
}

/// Lists violated SystemModel invariants; empty iff the model is valid.
inline std::vector<std::string> validate_model(const SystemModel& m) {
    std::vector<std::string> report;
    const auto& d = m.dims;
    if (d.k <= 0 || d.r <= 0 || d.n_b <= 0 || d.n_e <= 0)
        report.push_back("dimensions must be strictly positive");
    auto check_shape = [&](const CMatrix& mat, int rows, int cols, const char* name) {
        if (mat.rows() != rows || mat.cols() != cols)
            report.push_back(std::string(name) + ": shape mismatch");
    };
    check_shape(m.H_ar, d.r, d.k, "H_ar");
    check_shape(m.H_rb, d.n_b, d.r, "H_rb");
    check_shape(m.H_re, d.n_e, d.r, "H_re");
    check_shape(m.Sigma_b, d.n_b, d.n_b, "Sigma_b");
    check_shape(m.Sigma_e, d.n_e, d.n_e, "Sigma_e");

    auto check_cov = [&](const CMatrix& S, const char* name) {
        if (S.rows() != S.cols()) return;  // shape already reported
        const double scale = S.cwiseAbs().maxCoeff();
        if ((S - S.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
            report.push_back(std::string(name) + ": not Hermitian");
            return;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(S, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().maxCoeff();
        if (lmin <= 1e-12 * std::max(1.0, lmax))
            report.push_back(std::string(name) + ": not positive definite");
    };
    check_cov(m.Sigma_b, "Sigma_b");
    check_cov(m.Sigma_e, "Sigma_e");

    if (m.H_ab.has_value() != m.H_ae.has_value()) {
        report.push_back("LoS matrices must be present either both or neither");
    } else if (m.has_los()) {
        check_shape(*m.H_ab, d.n_b, d.k, "H_ab");
        check_shape(*m.H_ae, d.n_e, d.k, "H_ae");
    }
    return report;
}

// --- JSON serialization -----------------------------------------------------

namespace detail {

inline nlohmann::json cmatrix_to_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMatrix cmatrix_from_json(const nlohmann::json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c)
            m(i, c) = Complex(j[i][c][0].get<double>(), j[i][c][1].get<double>());
    return m;
}

}  // namespace detail

inline nlohmann::json to_json(const SystemModel& m) {
    nlohmann::json j;
    j["schema"] = "model_v1";
    j["dims"] = {{"k", m.dims.k}, {"r", m.dims.r}, {"n_b", m.dims.n_b}, {"n_e", m.dims.n_e}};
    j["H_ar"] = detail::cmatrix_to_json(m.H_ar);
    j["H_rb"] = detail::cmatrix_to_json(m.H_rb);
    j["H_re"] = detail::cmatrix_to_json(m.H_re);
    j["Sigma_b"] = detail::cmatrix_to_json(m.Sigma_b);
    j["Sigma_e"] = detail::cmatrix_to_json(m.Sigma_e);
    if (m.has_los()) {
        j["H_ab"] = detail::cmatrix_to_json(*m.H_ab);
        j["H_ae"] = detail::cmatrix_to_json(*m.H_ae);
    }
    return j;
}

inline SystemModel model_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "model_v1")
        throw std::invalid_argument("model_from_json: unknown schema");
    SystemModel m;
    m.dims = Dimensions(j["dims"]["k"], j["dims"]["r"], j["dims"]["n_b"], j["dims"]["n_e"]);
    m.H_ar = detail::cmatrix_from_json(j["H_ar"]);
    m.H_rb = detail::cmatrix_from_json(j["H_rb"]);
    m.H_re = detail::cmatrix_from_json(j["H_re"]);
    m.Sigma_b = detail::cmatrix_from_json(j["Sigma_b"]);
    m.Sigma_e = detail::cmatrix_from_json(j["Sigma_e"]);
    if (j.contains("H_ab")) {
        m.H_ab = detail::cmatrix_from_json(j["H_ab"]);
        m.H_ae = detail::cmatrix_from_json(j["H_ae"]);
    }
    return m;
}

}  // namespace risfim
