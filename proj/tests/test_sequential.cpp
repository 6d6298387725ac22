#include "oracles.hpp"
#include "pintlcp/all_at_once.hpp"
#include "pintlcp/pint_preconditioner.hpp"
#include "pintlcp/sequential.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pintlcp;

TEST(Sequential, ZeroPayoffStaysZero) {
    auto sp = assemble(ModelParams{100.0, 1.0, 0.05, BlackScholesParams{0.2}}, black_scholes_grid(300.0, 20));
    std::fill(sp.payoff.begin(), sp.payoff.end(), 0.0);
    sp.boundary_terms.clear();
    const auto res = price_sequential(sp, 5);
    ASSERT_TRUE(res.converged);
    for (const auto& slice : res.trajectory)
        for (double x : slice) EXPECT_EQ(x, 0.0);
}

TEST(Sequential, TrajectoryShapeAndObstacle) {
    const auto sp = assemble(ModelParams{100.0, 1.0, 0.03, BlackScholesParams{0.2}}, black_scholes_grid(300.0, 40));
    const auto res = price_sequential(sp, 6);
    ASSERT_EQ(res.trajectory.size(), 7u);
    EXPECT_EQ(res.trajectory[0], sp.payoff);
    for (const auto& slice : res.trajectory)
        for (std::size_t i = 0; i < slice.size(); ++i) EXPECT_GE(slice[i], sp.payoff[i] - 1e-12);
    EXPECT_EQ(res.step_solves.size(), 6u);
    std::size_t corrections = 0;
    for (auto s : res.step_solves) corrections += s - 1;
    EXPECT_EQ(res.total_corrections, corrections);
}

TEST(Sequential, EachStepSolvesItsObstacleProblem) {
    const auto sp = assemble(ModelParams{100.0, 0.5, 0.05, BlackScholesParams{0.3}}, black_scholes_grid(300.0, 10));
    const std::size_t nt = 4;
    const double tau = 0.5 / nt;
    const auto res = price_sequential(sp, nt, {1e-13, 100});
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(10, 10) / tau - oracle::dense(sp.operator_matrix);
    for (std::size_t n = 1; n <= nt; ++n) {
        const Eigen::VectorXd b = oracle::vec(res.trajectory[n - 1]) / tau + oracle::vec(sp.boundary(static_cast<double>(n) * tau));
        const auto ref = oracle::enumerate_lcp(a, b, oracle::vec(sp.payoff));
        ASSERT_TRUE(ref);
        EXPECT_LE(oracle::max_abs_diff(res.trajectory[n], oracle::stdvec(*ref)), 1e-10) << "step " << n;
    }
}

TEST(Sequential, ToysMatchAllAtOnce) {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 6; ++trial) {
        const auto toy = oracle::random_toy(rng, trial % 3, 12, 5);
        const auto sp = assemble(toy.params, toy.grid);
        const AllAtOnceSystem sys(sp, toy.nt);
        InnerSolverOptions direct;
        direct.kind = PreconditionerKind::Direct;
        auto stats = std::make_shared<InnerSolverStats>();
        const auto pint = policy_iterate_all_at_once(sys, make_inner_solver(sys, direct, stats), {1e-12, 200, false});
        const auto seq = price_sequential(sp, toy.nt, {1e-12, 200});
        ASSERT_TRUE(pint.stats.converged() && seq.converged) << toy.label;
        for (std::size_t n = 0; n < toy.nt; ++n)
            EXPECT_LE(oracle::max_abs_diff(sys.block(pint.v, n), seq.trajectory[n + 1]), 1e-8) << toy.label;
    }
}

TEST(Sequential, ExampleOneCoarsestStep) {
    const auto sp = assemble(ModelParams{100.0, 1.0, 0.03, BlackScholesParams{0.15}}, black_scholes_grid(300.0, 1280));
    const auto res = price_sequential(sp, 20);
    ASSERT_TRUE(res.converged);
    EXPECT_EQ(res.total_corrections, 68u);
    const double u = interpolate_value(sp, res.final_slice(), 1.0, EvalPoint{100.0, 0.0}, Interpolation::Linear);
    EXPECT_NEAR(u, 4.771630, 5e-3);
}
