#include "risfim/fisher.hpp"

#include "risfim/model.hpp"
#include "risfim/rng.hpp"

#include <gtest/gtest.h>

namespace {

using namespace risfim;

RisProfile random_unit(int r, Rng& rng) {
    RisProfile p;
    p.omega = CVector(r);
    for (int i = 0; i < r; ++i) {
        const double phi = rng.uniform(0.0, 2 * M_PI);
        p.omega[i] = Complex(std::cos(phi), std::sin(phi));
    }
    return p;
}

PowerAllocation random_power(int k, double budget, Rng& rng) {
    PowerAllocation pa;
    pa.p = RVector(k);
    for (int i = 0; i < k; ++i) pa.p[i] = rng.uniform(0.0, budget / k);
    pa.budget = budget;
    return pa;
}

TEST(EffectiveChannel, ScalarIdentityCase) {
    SystemModel m;
    m.dims = Dimensions(1, 1, 1, 1);
    m.H_ar = CMatrix::Ones(1, 1);
    m.H_rb = CMatrix::Ones(1, 1);
    m.H_re = CMatrix::Ones(1, 1);
    m.Sigma_b = CMatrix::Identity(1, 1);
    m.Sigma_e = CMatrix::Identity(1, 1);
    RisProfile omega = RisProfile::all_ones(1);
    PowerAllocation P;
    P.p = RVector::Ones(1);
    P.budget = 1.0;
    const CMatrix H = effective_channel(m, omega, P, Receiver::Bob);
    EXPECT_EQ(H(0, 0), Complex(1.0, 0.0));
    EXPECT_NEAR(fim_trace(m, omega, P, Receiver::Bob), 1.0, 1e-14);
}

TEST(EffectiveChannel, ScalarNoiseScaling) {
    SystemModel m;
    m.dims = Dimensions(1, 1, 1, 1);
    m.H_ar = CMatrix::Ones(1, 1);
    m.H_rb = CMatrix::Ones(1, 1);
    m.H_re = CMatrix::Ones(1, 1);
    m.Sigma_b = 1e-5 * CMatrix::Identity(1, 1);
    m.Sigma_e = CMatrix::Identity(1, 1);
    PowerAllocation P;
    P.p = RVector::Ones(1);
    P.budget = 1.0;
    EXPECT_NEAR(fim_trace(m, RisProfile::all_ones(1), P, Receiver::Bob), 1e5, 1e-7);
}

TEST(EffectiveChannel, SumOfRankOneTerms) {
    Rng rng(3);
    const auto m = generate_channels(Dimensions(2, 3, 2, 2), rng, 1e-5);
    const auto omega = random_unit(3, rng);
    const auto P = random_power(2, 4.0, rng);
    CMatrix sum = CMatrix::Zero(2, 2);
    for (int j = 0; j < 3; ++j) {
        const CMatrix S = build_S(m, P, Receiver::Bob, j);
        EXPECT_LE(Eigen::JacobiSVD<CMatrix>(S).singularValues().tail(1)[0],
                  1e-12 * S.norm() + 1e-300);  // rank one
        sum += omega.omega[j] * S;
    }
    const CMatrix H = effective_channel(m, omega, P, Receiver::Bob);
    EXPECT_LT((H - sum).norm(), 1e-12 * H.norm());
}

TEST(EffectiveChannel, DirectPathOnlyWhenReflectedVanishes) {
    Rng rng(4);
    auto m = generate_channels(Dimensions::protocol(2, 3), rng, 1e-5, true);
    m.H_rb.setZero();
    const auto omega = random_unit(3, rng);
    PowerAllocation P = PowerAllocation::equal(2, 8.0);
    const CMatrix H = effective_channel(m, omega, P, Receiver::Bob);
    const CMatrix expect = *m.H_ab * P.sqrt_matrix();
    EXPECT_LT((H - expect).norm(), 1e-14);
}

TEST(FimBlocks, ScalarCase) {
    SystemModel m;
    m.dims = Dimensions(1, 1, 1, 1);
    m.H_ar = CMatrix::Ones(1, 1);
    m.H_rb = CMatrix::Ones(1, 1);
    m.H_re = CMatrix::Ones(1, 1);
    m.Sigma_b = CMatrix::Identity(1, 1);
    m.Sigma_e = CMatrix::Identity(1, 1);
    PowerAllocation P;
    P.p = RVector::Ones(1);
    P.budget = 1.0;
    const auto [first, second] = fim_blocks(m, RisProfile::all_ones(1), P, Receiver::Bob);
    EXPECT_NEAR(std::abs(first(0, 0) - Complex(1.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(second(0, 0) - Complex(1.0)), 0.0, 1e-14);
}

TEST(FimBlocks, SecondBlockIsConjugateOfFirst) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = generate_channels(Dimensions::protocol(3, 5), rng, 1e-5);
        const auto omega = random_unit(5, rng);
        const auto P = random_power(3, 10.0, rng);
        const auto [first, second] = fim_blocks(m, omega, P, Receiver::Eve);
        EXPECT_LT((second - first.conjugate()).norm(), 1e-12 * first.norm());
        // Conjugation identity on traces.
        const double t1 = std::real(first.trace());
        const double t2 = std::real(second.trace());
        const double t = fim_trace(m, omega, P, Receiver::Eve);
        EXPECT_NEAR(t1, t, 1e-12 * std::abs(t));
        EXPECT_NEAR(t2, t, 1e-12 * std::abs(t));
    }
}

// Empirical score outer-product oracle: for y ~ CN(H theta, Sigma), the
// score w.r.t. conj(theta) is H^H Sigma^{-1} (y - H theta) and its outer
// product averages to the first FIM block.
TEST(FimBlocks, ScoreOuterProductMonteCarlo) {
    Rng rng(1234);
    const auto m = generate_channels(Dimensions(2, 3, 3, 3), rng, 1e-2);
    const auto omega = random_unit(3, rng);
    PowerAllocation P = PowerAllocation::equal(2, 4.0);
    const CMatrix H = effective_channel(m, omega, P, Receiver::Bob);
    const CMatrix Sigma_inv =
        Eigen::LLT<CMatrix>(m.Sigma_b).solve(CMatrix::Identity(3, 3));
    const auto [first, second] = fim_blocks(m, omega, P, Receiver::Bob);

    const int trials = 100000;
    CMatrix acc = CMatrix::Zero(2, 2);
    Eigen::LLT<CMatrix> llt(m.Sigma_b);
    const CMatrix noise_factor = llt.matrixL();
    for (int t = 0; t < trials; ++t) {
        CVector g(3);
        for (int i = 0; i < 3; ++i) g[i] = rng.complex_gaussian();
        const CVector noise = noise_factor * g;
        const CVector score = H.adjoint() * (Sigma_inv * noise);
        acc += score * score.adjoint();
    }
    acc /= trials;
    // The expected outer product is H^H Sigma^{-1} H, which coincides with
    // the first FIM block because Sigma is real here.
    const CMatrix expected = H.adjoint() * Sigma_inv * H;
    EXPECT_LT((expected - first).norm(), 1e-12 * expected.norm());
    // 3-sigma band: the variance of each entry estimate is of order
    // |expected|^2 / trials for Gaussian fourth moments.
    const double scale = expected.cwiseAbs().maxCoeff();
    const double band = 3.0 * scale / std::sqrt(static_cast<double>(trials));
    EXPECT_LT((acc - expected).cwiseAbs().maxCoeff(), band);
}

TEST(QuadraticForms, DecompositionExactNLoS) {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = generate_channels(Dimensions::protocol(3, 4), rng, 1e-5);
        const auto P = random_power(3, 10.0, rng);
        const QuadraticForms forms = build_quadratic_forms(m, P);
        EXPECT_LT((forms.Q_b - forms.Q_b.adjoint()).cwiseAbs().maxCoeff(),
                  1e-12 * forms.Q_b.cwiseAbs().maxCoeff());
        for (int i = 0; i < 100; ++i) {
            const auto omega = random_unit(4, rng);
            const double direct = fim_trace(m, omega, P, Receiver::Bob);
            const double viaQ = forms.quadratic_value(Receiver::Bob, omega.omega);
            EXPECT_NEAR(viaQ, direct, 1e-10 * std::max(1.0, direct));
            const double directE = fim_trace(m, omega, P, Receiver::Eve);
            const double viaQE = forms.quadratic_value(Receiver::Eve, omega.omega);
            EXPECT_NEAR(viaQE, directE, 1e-10 * std::max(1.0, directE));
        }
    }
}

TEST(QuadraticForms, DecompositionExactDirectPath) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = generate_channels(Dimensions::protocol(3, 4), rng, 1e-5, true);
        const auto P = random_power(3, 10.0, rng);
        const QuadraticForms forms = build_quadratic_forms(m, P);
        ASSERT_TRUE(forms.has_linear_terms());
        for (int i = 0; i < 50; ++i) {
            const auto omega = random_unit(4, rng);
            for (Receiver who : {Receiver::Bob, Receiver::Eve}) {
                const double direct = fim_trace(m, omega, P, who);
                const double via = forms.trace_value(who, omega.omega);
                EXPECT_NEAR(via, direct, 1e-10 * std::max(1.0, direct));
            }
        }
    }
}

// Entrywise oracle straight from the definition [Q]_{jl} = tr{S_j^H S^{-1} S_l}.
TEST(QuadraticForms, MatchesEntrywiseTraceDefinition) {
    Rng rng(8);
    const auto m = generate_channels(Dimensions::protocol(2, 3), rng, 1e-5);
    const auto P = random_power(2, 6.0, rng);
    const QuadraticForms forms = build_quadratic_forms(m, P);
    const CMatrix Sigma_inv =
        Eigen::LLT<CMatrix>(m.Sigma_e).solve(CMatrix::Identity(4, 4));
    for (int j = 0; j < 3; ++j) {
        const CMatrix Sj = build_S(m, P, Receiver::Eve, j);
        for (int l = 0; l < 3; ++l) {
            const CMatrix Sl = build_S(m, P, Receiver::Eve, l);
            const Complex q = (Sj.adjoint() * Sigma_inv * Sl).trace();
            EXPECT_LT(std::abs(forms.Q_e(j, l) - q), 1e-12 * std::abs(q) + 1e-300);
        }
    }
}

TEST(QuadraticForms, ZeroPowerYieldsZeroFormFlaggedByPdCheck) {
    Rng rng(9);
    const auto m = generate_channels(Dimensions::protocol(2, 3), rng, 1e-5);
    PowerAllocation P;
    P.p = RVector::Zero(2);
    P.budget = 1.0;
    const QuadraticForms forms = build_quadratic_forms(m, P);
    EXPECT_EQ(forms.Q_b.cwiseAbs().maxCoeff(), 0.0);
    double lmin = 1.0;
    EXPECT_FALSE(is_positive_definite_form(forms.Q_b, &lmin));
    EXPECT_EQ(lmin, 0.0);
}

TEST(QuadraticForms, PositiveDefiniteForGenericChannels) {
    // G is full rank when n >= r, so the Hadamard product stays PD.
    Rng rng(10);
    const auto m = generate_channels(Dimensions::protocol(4, 4), rng, 1e-5);
    const QuadraticForms forms = build_quadratic_forms(m, PowerAllocation::equal(4, 8.0));
    EXPECT_TRUE(is_positive_definite_form(forms.Q_b));
    EXPECT_TRUE(is_positive_definite_form(forms.Q_e));
}

TEST(DiagonalForms, SumMatchesTrace) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const bool los = trial % 2 == 1;
        const auto m = generate_channels(Dimensions::protocol(3, 5), rng, 1e-5, los);
        const auto omega = random_unit(5, rng);
        const DiagonalForms diag = build_diagonal_forms(m, omega);
        const auto P = random_power(3, 9.0, rng);
        const double bob = fim_trace(m, omega, P, Receiver::Bob);
        const double eve = fim_trace(m, omega, P, Receiver::Eve);
        EXPECT_NEAR(diag.alpha.dot(P.p), bob, 1e-10 * std::max(1.0, bob));
        EXPECT_NEAR(diag.beta.dot(P.p), eve, 1e-10 * std::max(1.0, eve));
    }
}

TEST(Mixture, PointMassEqualsDirectBuild) {
    Rng rng(12);
    const auto m = generate_channels(Dimensions::protocol(2, 4), rng, 1e-5);
    const auto P = random_power(2, 5.0, rng);
    const CMatrix Sigma_inv =
        Eigen::LLT<CMatrix>(m.Sigma_e).solve(CMatrix::Identity(4, 4));
    EavesdropperMixture mix;
    mix.E.push_back(m.H_re.adjoint() * Sigma_inv * m.H_re);
    mix.weight.push_back(1.0);
    const CMatrix Q = average_eavesdropper_Q(m, P, mix);
    const QuadraticForms forms = build_quadratic_forms(m, P);
    EXPECT_LT((Q - forms.Q_e).norm(), 1e-12 * forms.Q_e.norm());

    // Two identical components at 0.5 each: still the same.
    mix.E.push_back(mix.E[0]);
    mix.weight = {0.5, 0.5};
    EXPECT_LT((average_eavesdropper_Q(m, P, mix) - forms.Q_e).norm(),
              1e-12 * forms.Q_e.norm());
}

TEST(Mixture, WeightedTraceLinearity) {
    Rng rng(13);
    const auto m = generate_channels(Dimensions::protocol(2, 4), rng, 1e-5);
    const auto P = random_power(2, 5.0, rng);
    // Two random PSD mixture components.
    auto random_psd = [&](int n) {
        CMatrix B(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B(i, j) = rng.complex_gaussian();
        return CMatrix(B.adjoint() * B);
    };
    EavesdropperMixture mix;
    mix.E = {random_psd(4), random_psd(4)};
    mix.weight = {0.3, 0.7};
    const CMatrix Qbar = average_eavesdropper_Q(m, P, mix);
    for (int t = 0; t < 10; ++t) {
        const auto omega = random_unit(4, rng);
        double expected = 0.0;
        for (int c = 0; c < 2; ++c) {
            EavesdropperMixture single;
            single.E = {mix.E[c]};
            single.weight = {1.0};
            const CMatrix Qc = average_eavesdropper_Q(m, P, single);
            expected += mix.weight[c] *
                        std::real(Complex(omega.omega.adjoint() * Qc * omega.omega));
        }
        const double got = std::real(Complex(omega.omega.adjoint() * Qbar * omega.omega));
        EXPECT_NEAR(got, expected, 1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST(Mixture, RejectsInvalidWeights) {
    Rng rng(14);
    const auto m = generate_channels(Dimensions::protocol(2, 3), rng, 1e-5);
    EavesdropperMixture mix;
    mix.E = {CMatrix::Identity(3, 3)};
    mix.weight = {0.5};
    EXPECT_THROW(average_eavesdropper_Q(m, PowerAllocation::equal(2, 4.0), mix),
                 std::invalid_argument);
}

TEST(EigenvalueBounds, IdentityAndRankOne) {
    const auto [lo, hi] = eigenvalue_bounds(CMatrix::Identity(6, 6));
    EXPECT_NEAR(lo, 6.0, 1e-12);
    EXPECT_NEAR(hi, 6.0, 1e-12);

    CVector v = CVector::Zero(4);
    v[0] = Complex(0.5, 0.5);
    v[1] = Complex(0.5, -0.5);
    v.normalize();
    const auto [lo1, hi1] = eigenvalue_bounds(v * v.adjoint());
    EXPECT_NEAR(lo1, 0.0, 1e-12);
    EXPECT_NEAR(hi1, 4.0, 1e-12);
}

TEST(EigenvalueBounds, BracketsUnitModulusValues) {
    Rng rng(15);
    const auto m = generate_channels(Dimensions::protocol(3, 5), rng, 1e-5);
    const QuadraticForms forms = build_quadratic_forms(m, PowerAllocation::equal(3, 6.0));
    const auto [lo, hi] = eigenvalue_bounds(forms.Q_b);
    for (int t = 0; t < 1000; ++t) {
        const auto omega = random_unit(5, rng);
        const double v = forms.quadratic_value(Receiver::Bob, omega.omega);
        EXPECT_GE(v, lo - 1e-9 * std::abs(lo));
        EXPECT_LE(v, hi + 1e-9 * std::abs(hi));
    }
}

TEST(FormsJson, SchemaAndShape) {
    Rng rng(16);
    const auto m = generate_channels(Dimensions::protocol(2, 3), rng, 1e-5, true);
    const auto forms = build_quadratic_forms(m, PowerAllocation::equal(2, 4.0));
    const auto j = to_json(forms);
    EXPECT_EQ(j["schema"], "forms_v1");
    EXPECT_EQ(j["Q_b"].size(), 3u);
    EXPECT_EQ(j["q_tilde_b"].size(), 3u);
    EXPECT_TRUE(j.contains("const_b"));
}

}  // namespace
