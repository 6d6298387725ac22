#include "oracles.hpp"
#include "pintlcp/alpha_circulant.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pintlcp;

namespace {

/// Dense eigenvalues of B_alpha against the closed form, in units of 1/tau.
double eig_mismatch(double alpha, std::size_t nt, double tau) {
    const auto dense = oracle::eigenvalues(oracle::time_matrix(nt, tau, alpha));
    return oracle::match_spectra(dense, alpha_circulant_eigenvalues(alpha, nt, tau)) * tau;
}

std::vector<double> random_real(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST(Eigenvalues, TwoStepsClosedForm) {
    const auto lam = alpha_circulant_eigenvalues(0.25, 2, 1.0);
    EXPECT_NEAR(std::abs(lam[0] - Complex(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lam[1] - Complex(1.5)), 0.0, 1e-15);
    EXPECT_LE(eig_mismatch(0.25, 2, 1.0), 1e-14);
}

TEST(Eigenvalues, SingleStep) {
    for (double a : {0.5, 1e-2, 1e-8}) {
        const auto lam = alpha_circulant_eigenvalues(a, 1, 1.0);
        EXPECT_NEAR(std::abs(lam[0] - Complex(1.0 - a)), 0.0, 1e-15);
    }
}

TEST(Eigenvalues, MinimumRealPart) {
    for (double a : {1e-2, 1e-4, 1e-8}) {
        for (std::size_t nt : {1u, 2u, 7u, 64u}) {
            const double tau = 0.3;
            const auto lam = alpha_circulant_eigenvalues(a, nt, tau);
            double min_re = lam[0].real();
            for (const auto& l : lam) min_re = std::min(min_re, l.real());
            EXPECT_NEAR(min_re, (1.0 - std::pow(a, 1.0 / static_cast<double>(nt))) / tau, 1e-12);
            EXPECT_GT(min_re, 0.0);
        }
    }
}

TEST(Eigenvalues, DenseDecompositionAgreement) {
    for (double a : {1e-2, 1e-4, 1e-8}) {
        for (std::size_t nt : {1u, 3u, 8u, 16u, 64u}) EXPECT_LE(eig_mismatch(a, nt, 0.05), 1e-11) << a << " " << nt;
    }
}

TEST(Eigenvalues, RejectsBadInput) {
    EXPECT_THROW((void)alpha_circulant_eigenvalues(0.0, 4, 1.0), std::invalid_argument);
    EXPECT_THROW((void)alpha_circulant_eigenvalues(1.0, 4, 1.0), std::invalid_argument);
    EXPECT_THROW((void)alpha_circulant_eigenvalues(0.1, 0, 1.0), std::invalid_argument);
}

TEST(Transforms, SingleStepIsIdentity) {
    const AlphaCirculant circ(1e-3, 1, 1.0);
    const TimeFft fft(1, 3);
    const std::vector<double> r{1, -2, 3};
    const auto z = circ.step_a(r, fft);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(z[i] - Complex(r[i])), 0.0, 1e-15);
}

TEST(Transforms, DenseOracleStepA) {
    const double alpha = 0.01;
    const std::size_t nt = 4;
    const AlphaCirculant circ(alpha, nt, 1.0);
    const TimeFft fft(nt, 1);
    oracle::VecC scale(4);
    for (std::size_t j = 0; j < nt; ++j) scale(oracle::ix(j)) = std::pow(alpha, static_cast<double>(j) / nt);
    const oracle::MatC vinv = oracle::dft(nt) * scale.asDiagonal();
    for (std::size_t e = 0; e < nt; ++e) {
        std::vector<double> r(nt, 0.0);
        r[e] = 1.0;
        const auto z = circ.step_a(r, fft);
        for (std::size_t j = 0; j < nt; ++j) EXPECT_NEAR(std::abs(z[j] - vinv(oracle::ix(j), oracle::ix(e))), 0.0, 1e-15);
    }
}

TEST(Transforms, DenseOracleStepC) {
    const double alpha = 0.1;
    const std::size_t nt = 2;
    const AlphaCirculant circ(alpha, nt, 1.0);
    const TimeFft fft(nt, 1);
    oracle::VecC inv_scale(2);
    inv_scale << 1.0, 1.0 / std::sqrt(alpha);
    const oracle::MatC v = inv_scale.asDiagonal() * oracle::dft(nt).adjoint();
    const std::vector<Complex> z{{0.3, 0.0}, {-1.2, 0.0}};
    const auto w = circ.step_c_complex(z, fft);
    const oracle::VecC ref = v * Eigen::Map<const oracle::VecC>(z.data(), 2);
    for (std::size_t j = 0; j < nt; ++j) EXPECT_NEAR(std::abs(w[j] - ref(oracle::ix(j))), 0.0, 1e-14);
}

TEST(Transforms, DiagonalizesTheTimeMatrix) {
    // V^{-1} B_alpha V = diag(lambda).
    const double alpha = 1e-2, tau = 0.5;
    const std::size_t nt = 6;
    const AlphaCirculant circ(alpha, nt, tau);
    const TimeFft fft(nt, 1);
    const Eigen::MatrixXd b = oracle::time_matrix(nt, tau, alpha);
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<Complex> ek(nt, 0.0);
        ek[k] = 1.0;
        const auto col = circ.step_c_complex(ek, fft);  // V e_k
        const oracle::VecC bv = b.cast<Complex>() * Eigen::Map<const oracle::VecC>(col.data(), oracle::ix(nt));
        const auto back = circ.step_a(std::span<const Complex>(bv.data(), nt), fft);
        for (std::size_t j = 0; j < nt; ++j) {
            const Complex expected = j == k ? circ.eigenvalues()[k] : Complex(0.0);
            EXPECT_NEAR(std::abs(back[j] - expected), 0.0, 1e-12) << j << "," << k;
        }
    }
}

TEST(Transforms, RoundtripAndZero) {
    std::mt19937 rng(17);
    for (double alpha : {1e-2, 1e-4, 1e-8}) {
        for (std::size_t nt : {1u, 4u, 7u, 32u}) {
            const std::size_t ns = 5;
            const AlphaCirculant circ(alpha, nt, 1.0 / nt);
            const TimeFft fft(nt, ns);
            const auto r = random_real(rng, nt * ns);
            const auto back = circ.step_c(circ.step_a(r, fft), fft);
            // Round-off is amplified by alpha^{-(nt-1)/nt} on the last block.
            const double bound = 50.0 * std::numeric_limits<double>::epsilon() /
                                 std::pow(alpha, static_cast<double>(nt - 1) / static_cast<double>(nt));
            EXPECT_LE(oracle::max_abs_diff(back, r), std::max(1e-13, bound)) << alpha << " " << nt;
        }
    }
    const AlphaCirculant circ(1e-8, 4, 1.0);
    const TimeFft fft(4, 3);
    const std::vector<Complex> zero(12);
    for (double x : circ.step_c(zero, fft)) EXPECT_EQ(x, 0.0);
}

TEST(Transforms, ImaginaryResidueRejected) {
    const AlphaCirculant circ(1e-2, 4, 1.0);
    const TimeFft fft(4, 1);
    const std::vector<Complex> z{{0, 0}, {1, 0}, {0, 0}, {0, 0}};  // not conjugate-symmetric
    EXPECT_THROW((void)circ.step_c(z, fft), ImaginaryResidueError);
}

TEST(ConjugatePlan, Examples) {
    const auto p4 = conjugate_pair_plan(4);
    EXPECT_EQ(p4.solve, (std::vector<std::size_t>{0, 1, 2}));
    ASSERT_EQ(p4.mirror.size(), 1u);
    EXPECT_EQ(p4.mirror[0], (std::pair<std::size_t, std::size_t>{3, 1}));

    const auto p1 = conjugate_pair_plan(1);
    EXPECT_EQ(p1.solve, (std::vector<std::size_t>{0}));
    EXPECT_TRUE(p1.mirror.empty());

    const auto p5 = conjugate_pair_plan(5);
    EXPECT_EQ(p5.solve, (std::vector<std::size_t>{0, 1, 2}));
    ASSERT_EQ(p5.mirror.size(), 2u);
    EXPECT_EQ(p5.mirror[0], (std::pair<std::size_t, std::size_t>{3, 2}));
    EXPECT_EQ(p5.mirror[1], (std::pair<std::size_t, std::size_t>{4, 1}));
}

TEST(ConjugatePlan, MirroredEigenvaluesAreConjugates) {
    for (std::size_t nt : {2u, 5u, 8u, 33u}) {
        const auto lam = alpha_circulant_eigenvalues(1e-4, nt, 0.1);
        for (const auto& [target, source] : conjugate_pair_plan(nt).mirror) {
            EXPECT_NEAR(std::abs(lam[target] - std::conj(lam[source])), 0.0, 1e-12);
        }
    }
}
