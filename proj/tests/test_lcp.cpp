#include "oracles.hpp"
#include "pintlcp/lcp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pintlcp;

namespace {

Lcp dense_lcp(const Eigen::MatrixXd& a, std::vector<double> b, std::vector<double> c) {
    SparseBuilder<double> builder(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) builder.add(i, j, a(i, j));
    return Lcp::from_matrix(builder.build(), std::move(b), std::move(c));
}

/// Strictly diagonally dominant with nonpositive off-diagonals.
Eigen::MatrixXd random_m_matrix(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(oracle::ix(n), oracle::ix(n));
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || u(rng) < 0.4) continue;
            a(oracle::ix(i), oracle::ix(j)) = -u(rng);
            row += -a(oracle::ix(i), oracle::ix(j));
        }
        a(oracle::ix(i), oracle::ix(i)) = row + 0.1 + u(rng);
    }
    return a;
}

std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST(ComponentwiseMin, Examples) {
    EXPECT_EQ(componentwise_min(std::vector<double>{1, -2}, std::vector<double>{0, 5}), (std::vector<double>{0, -2}));
    const std::vector<double> x{3, -1, 0.5};
    EXPECT_EQ(componentwise_min(x, x), x);
    EXPECT_EQ(componentwise_min(std::vector<double>(3, 0.0), std::vector<double>{1, 2, 0}), std::vector<double>(3, 0.0));
    EXPECT_THROW((void)componentwise_min(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(LcpResidual, Examples) {
    const auto r0 = lcp_residual(dense_lcp(Eigen::MatrixXd::Identity(2, 2), {0, 0}, {0, 0}), std::vector<double>{0, 0});
    EXPECT_EQ(r0.inf_norm, 0.0);
    const auto r1 = lcp_residual(dense_lcp(Eigen::MatrixXd::Constant(1, 1, 2.0), {1}, {0}), std::vector<double>{0.5});
    EXPECT_EQ(r1.r[0], 0.0);
    const auto r2 = lcp_residual(dense_lcp(Eigen::MatrixXd::Constant(1, 1, 1.0), {2}, {1}), std::vector<double>{2});
    EXPECT_EQ(r2.r[0], 0.0);
}

TEST(PolicyMask, Convention) {
    const auto lcp = dense_lcp(Eigen::MatrixXd::Constant(1, 1, 2.0), {0}, {0});
    EXPECT_FALSE(compute_policy_mask(lcp, std::vector<double>{1.0})[0]);  // 2 > 1
    // tie: (Ax - b) = x - c = 1 with A = 1, b = c = 0... both equal x
    const auto tie = dense_lcp(Eigen::MatrixXd::Constant(1, 1, 1.0), {0}, {0});
    EXPECT_TRUE(compute_policy_mask(tie, std::vector<double>{1.0})[0]);
}

TEST(PolicyMask, MatchesActiveSetAtSolution) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_m_matrix(rng, 3);
        const auto b = random_vector(rng, 3, -1, 1), c = random_vector(rng, 3, -1, 1);
        const auto x = oracle::enumerate_lcp(a, oracle::vec(b), oracle::vec(c));
        ASSERT_TRUE(x);
        const auto mask = compute_policy_mask(dense_lcp(a, b, c), oracle::stdvec(*x));
        const Eigen::VectorXd w = a * *x - oracle::vec(b);
        const Eigen::VectorXd d = *x - oracle::vec(c);
        for (Eigen::Index i = 0; i < 3; ++i) {
            // Strictly inactive rows (x = c, Ax - b > 0) must be 0, strictly active rows 1.
            if (w(i) > 1e-9 && std::abs(d(i)) < 1e-12) EXPECT_FALSE(mask[i]);
            if (d(i) > 1e-9) EXPECT_TRUE(mask[i]);
        }
    }
}

TEST(PolicySystem, Extremes) {
    std::mt19937 rng(4);
    const auto a = random_m_matrix(rng, 4);
    const auto b = random_vector(rng, 4, -1, 1), c = random_vector(rng, 4, -1, 1);
    const auto lcp = dense_lcp(a, b, c);
    const auto all = build_policy_system(lcp, PolicyMask::filled(4, true));
    EXPECT_LE((oracle::dense(*all.matrix) - a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(all.rhs, b);
    const auto none = build_policy_system(lcp, PolicyMask::filled(4, false));
    EXPECT_LE((oracle::dense(*none.matrix) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(none.rhs, c);
}

TEST(PolicySystem, MixedTwoByTwo) {
    Eigen::MatrixXd a(2, 2);
    a << 3, -1, -2, 4;
    const auto lcp = dense_lcp(a, {1, 2}, {5, 6});
    const PolicyMask mask({1, 0});
    const auto sys = build_policy_system(lcp, mask);
    Eigen::MatrixXd expected(2, 2);
    expected << 3, -1, 0, 1;
    EXPECT_LE((oracle::dense(*sys.matrix) - expected).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sys.rhs, (std::vector<double>{1, 6}));
    std::vector<double> y(2);
    sys.apply(std::vector<double>{1, 1}, y);
    EXPECT_EQ(y, (std::vector<double>{2, 1}));
}

TEST(PolicyIteration, OptimalStartStopsAfterOneSolve) {
    Eigen::MatrixXd a(2, 2);
    a << 2, -1, -1, 2;
    const std::vector<double> b{1, 1}, c{0, 0};
    const auto lcp = dense_lcp(a, b, c);
    const auto res = solve_lcp_policy(lcp, direct_policy_solver(), std::vector<double>{1, 1});
    EXPECT_EQ(res.stats.iterations, 1u);
    EXPECT_NEAR(res.x[0], 1.0, 1e-14);
}

TEST(PolicyIteration, OneByOne) {
    const auto lcp = dense_lcp(Eigen::MatrixXd::Constant(1, 1, 2.0), {1}, {0});
    const auto res = solve_lcp_policy(lcp, direct_policy_solver(), std::vector<double>{0.0});
    EXPECT_NEAR(res.x[0], 0.5, 1e-15);
    EXPECT_TRUE(res.stats.converged());
}

TEST(PolicyIteration, RandomMMatricesMatchEnumeration) {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 11);
        const auto a = random_m_matrix(rng, n);
        const auto b = random_vector(rng, n, -1, 1), c = random_vector(rng, n, -1, 1);
        const auto lcp = dense_lcp(a, b, c);
        const auto ref = oracle::enumerate_lcp(a, oracle::vec(b), oracle::vec(c));
        ASSERT_TRUE(ref);
        const auto res = solve_lcp_policy(lcp, direct_policy_solver(), c, PolicyOptions{1e-12, 100});
        EXPECT_TRUE(res.stats.converged());
        EXPECT_LE(oracle::max_abs_diff(res.x, oracle::stdvec(*ref)), 1e-10) << "n=" << n;
        EXPECT_LE(res.stats.iterations, n + 1);
    }
}

TEST(PolicyIteration, MaxIterationsReported) {
    std::mt19937 rng(7);
    const auto a = random_m_matrix(rng, 6);
    const auto lcp = dense_lcp(a, random_vector(rng, 6, 1, 2), std::vector<double>(6, 0.0));
    const auto res = solve_lcp_policy(lcp, direct_policy_solver(), std::vector<double>(6, 0.0), PolicyOptions{0.0, 1});
    EXPECT_EQ(res.stats.iterations, 1u);
    if (res.stats.stop != PolicyStop::Residual) EXPECT_EQ(res.stats.stop, PolicyStop::MaxIterations);
}

TEST(BruteForce, Examples) {
    // min(x - 2, x - 1) = 0 -> x = 2
    const auto x = brute_force_lcp(dense_lcp(Eigen::MatrixXd::Identity(1, 1), {2}, {1}));
    EXPECT_DOUBLE_EQ(x[0], 2.0);
    const auto y = brute_force_lcp(dense_lcp(Eigen::MatrixXd::Identity(3, 3), {1, -2, 3}, {1, -2, 3}));
    EXPECT_EQ(y, (std::vector<double>{1, -2, 3}));
}

TEST(BruteForce, AgreesWithPolicyIteration) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_m_matrix(rng, 2);
        const auto b = random_vector(rng, 2, -1, 1), c = random_vector(rng, 2, -1, 1);
        const auto lcp = dense_lcp(a, b, c);
        const auto pi = solve_lcp_policy(lcp, direct_policy_solver(), c, PolicyOptions{1e-13, 50});
        EXPECT_LE(oracle::max_abs_diff(brute_force_lcp(lcp), pi.x), 1e-12);
    }
}

TEST(BruteForce, RejectsLargeOrMatrixFree) {
    const auto free = Lcp::from_operator(2, [](std::span<const double> x, std::span<double> y) {
        std::copy(x.begin(), x.end(), y.begin());
    }, {0, 0}, {0, 0});
    EXPECT_THROW((void)brute_force_lcp(free), std::invalid_argument);
}
