#pragma once

// Joint design loop: alternate exact power allocation (LP) with SDR-based
// RIS phase design until the Bob objective stabilizes, plus the two
// single-leg benchmarks (fixed equal power, fixed random phases).
//
// Reported bob/eve values are the omega-dependent parts of the FIM traces
// (SDR space); for direct-path models add QuadraticForms::constant to get
// the full trace.

#include "risfim/fisher.hpp"
#include "risfim/power_alloc.hpp"
#include "risfim/ris_design.hpp"
#include "risfim/rng.hpp"
#include "risfim/types.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <vector>

namespace risfim {

struct AoConfig {
    double epsilon = 1e-1;   // convergence threshold on the Bob objective
    int n_max = 20;          // maximum alternating iterations
    int L = 1000;            // Gaussian randomization budget per phase step
    double delta = 0.0;      // secrecy limit
    double budget = 1.0;     // total transmit power
    ModulusRegime regime = ModulusRegime::UnitModulus;
    double sdp_tol = 1e-8;
    int sdp_max_iter = 200;

    void validate() const {
        if (epsilon <= 0.0 || n_max < 1 || L <= 1 || budget <= 0.0 || delta < 0.0)
            throw std::invalid_argument("AoConfig: invalid parameters");
    }
};

enum class AoTermination { Converged, MaxIter, Infeasible };

struct AoResult {
    RisProfile omega_star;
    PowerAllocation p_star;
    std::vector<double> f_b_trace;  // Bob objective after each phase step
    double bob_value = 0.0;
    double eve_value = 0.0;
    int iterations_run = 0;
    AoTermination termination = AoTermination::Converged;
    int infeasible_steps = 0;  // phase steps that fell back to the previous omega
    bool feasible = true;
};

namespace detail {

inline RisProfile random_unit_profile(int r, Rng& rng, ModulusRegime regime) {
    RisProfile profile;
    profile.regime = regime;
    profile.omega = CVector(r);
    for (int i = 0; i < r; ++i) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        profile.omega[i] = Complex(std::cos(phi), std::sin(phi));
    }
    return profile;
}

inline PowerAllocation power_step(const SystemModel& model, const RisProfile& omega,
                                  const AoConfig& config) {
    const DiagonalForms diag = build_diagonal_forms(model, omega);
    PowerProblem pp{diag.alpha, diag.beta, config.delta, config.budget};
    return optimal_power(pp);
}

}  // namespace detail

/// Alternating optimization of the RIS profile and the power allocation.
///
/// Each iteration runs the exact power LP for the current omega, then the
/// SDR phase step for the new powers.  The phase step keeps the previous
/// omega when rank reduction fails to find a feasible candidate, and also
/// when the previous omega scores better for the new powers (the previous
/// omega stays feasible because the LP enforced the secrecy row), which
/// makes the recorded objective nondecreasing.
///
/// `initial` overrides the random starting profile; the sweep layer uses it
/// to warm-start from a benchmark solution (multi-start lives there, not
/// here).  Because the power step keeps any fixed omega feasible and the
/// phase step never accepts a worse candidate, the final objective is at
/// least the starting profile's objective under its optimal powers.
inline AoResult alternate(const SystemModel& model, const AoConfig& config, Rng& rng,
                          const RisProfile* initial = nullptr) {
    config.validate();
    AoResult result;

    if (initial && initial->omega.size() != model.dims.r)
        throw std::invalid_argument("alternate: initial profile size mismatch");
    RisProfile omega =
        initial ? *initial : detail::random_unit_profile(model.dims.r, rng, config.regime);
    std::vector<RisProfile> omegas;
    std::vector<PowerAllocation> powers;

    for (int n = 0; n < config.n_max; ++n) {
        PowerAllocation p = detail::power_step(model, omega, config);
        const QuadraticForms forms = build_quadratic_forms(model, p);
        const double pre_step = forms.quadratic_value(Receiver::Bob, omega.omega);

        RisDesignProblem design{forms, config.delta, config.regime};
        const SdpProblem sdp = assemble_sdr(design);
        const SdpSolution sol = solve_sdp(sdp, config.sdp_tol, config.sdp_max_iter);
        if (sol.status == SdpStatus::NumericalTrouble || sol.status == SdpStatus::Infeasible) {
            ++result.infeasible_steps;
        } else {
            const RankOneResult rank_one = rank_reduce(sol, design, config.L, rng);
            if (rank_one.feasible && rank_one.bob_value > pre_step) {
                omega = rank_one.omega;
            } else if (!rank_one.feasible) {
                ++result.infeasible_steps;
            }
        }

        const double f_b = forms.quadratic_value(Receiver::Bob, omega.omega);
        result.f_b_trace.push_back(f_b);
        omegas.push_back(omega);
        powers.push_back(p);
        result.iterations_run = n + 1;

        if (n >= 1 && result.f_b_trace[n] - result.f_b_trace[n - 1] <= config.epsilon) {
            result.termination = AoTermination::Converged;
            break;
        }
        if (n + 1 == config.n_max) result.termination = AoTermination::MaxIter;
    }

    // Converged: final iterate.  Max-iter: the best recorded iterate.
    int pick = result.iterations_run - 1;
    if (result.termination == AoTermination::MaxIter) {
        for (int i = 0; i < static_cast<int>(result.f_b_trace.size()); ++i)
            if (result.f_b_trace[i] > result.f_b_trace[pick]) pick = i;
    }
    result.omega_star = omegas[pick];
    result.p_star = powers[pick];
    const QuadraticForms forms = build_quadratic_forms(model, result.p_star);
    result.bob_value = forms.quadratic_value(Receiver::Bob, result.omega_star.omega);
    result.eve_value = forms.quadratic_value(Receiver::Eve, result.omega_star.omega);
    return result;
}

/// Equal-power benchmark: one SDR phase step at P = diag{sqrt(budget/k)}.
/// Reports an infeasible result when rank reduction exhausts its draws.
inline AoResult ris_only_benchmark(const SystemModel& model, const AoConfig& config, Rng& rng) {
    config.validate();
    AoResult result;
    result.p_star = PowerAllocation::equal(model.dims.k, config.budget);
    const QuadraticForms forms = build_quadratic_forms(model, result.p_star);
    RisDesignProblem design{forms, config.delta, config.regime};
    const SdpSolution sol = solve_sdp(assemble_sdr(design), config.sdp_tol, config.sdp_max_iter);
    result.iterations_run = 1;
    if (sol.status == SdpStatus::Infeasible || sol.status == SdpStatus::NumericalTrouble) {
        result.feasible = false;
        result.termination = AoTermination::Infeasible;
        result.infeasible_steps = 1;
        return result;
    }
    const RankOneResult rank_one = rank_reduce(sol, design, config.L, rng);
    if (!rank_one.feasible) {
        result.feasible = false;
        result.termination = AoTermination::Infeasible;
        result.infeasible_steps = 1;
        return result;
    }
    result.omega_star = rank_one.omega;
    result.bob_value = rank_one.bob_value;
    result.eve_value = rank_one.eve_value;
    result.f_b_trace.push_back(result.bob_value);
    return result;
}

/// Random-phase benchmark: fixed seeded unit-modulus omega, one power LP.
inline AoResult pa_only_benchmark(const SystemModel& model, const AoConfig& config, Rng& rng) {
    config.validate();
    AoResult result;
    result.omega_star = detail::random_unit_profile(model.dims.r, rng, ModulusRegime::UnitModulus);
    result.p_star = detail::power_step(model, result.omega_star, config);
    const QuadraticForms forms = build_quadratic_forms(model, result.p_star);
    result.bob_value = forms.quadratic_value(Receiver::Bob, result.omega_star.omega);
    result.eve_value = forms.quadratic_value(Receiver::Eve, result.omega_star.omega);
    result.f_b_trace.push_back(result.bob_value);
    result.iterations_run = 1;
    return result;
}

/// JSON record for one optimization run ("ao_result_v1").
inline nlohmann::json to_json(const AoResult& r, std::uint64_t seed, const AoConfig& config) {
    nlohmann::json j;
    j["schema"] = "ao_result_v1";
    j["seed"] = seed;
    j["config"] = {{"epsilon", config.epsilon}, {"n_max", config.n_max},  {"L", config.L},
                   {"delta", config.delta},     {"budget", config.budget},
                   {"regime", to_string(config.regime)}};
    j["bob_value"] = r.bob_value;
    j["eve_value"] = r.eve_value;
    j["iterations_run"] = r.iterations_run;
    j["infeasible_steps"] = r.infeasible_steps;
    j["feasible"] = r.feasible;
    j["termination"] = r.termination == AoTermination::Converged  ? "converged"
                       : r.termination == AoTermination::MaxIter ? "max_iter"
                                                                 : "infeasible";
    j["f_b_trace"] = r.f_b_trace;
    nlohmann::json omega = nlohmann::json::array();
    for (int i = 0; i < r.omega_star.omega.size(); ++i)
        omega.push_back({r.omega_star.omega[i].real(), r.omega_star.omega[i].imag()});
    j["omega_star"] = std::move(omega);
    nlohmann::json powers = nlohmann::json::array();
    for (int i = 0; i < r.p_star.p.size(); ++i) powers.push_back(r.p_star.p[i]);
    j["p_star"] = std::move(powers);
    return j;
}

}  // namespace risfim
