#include "pintlcp/sequential.hpp"

#include "pintlcp/linear_kernels.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <stdexcept>

namespace pintlcp {

SequentialResult price_sequential(const SpatialSystem& spatial, std::size_t nt, const SequentialOptions& options) {
    if (nt == 0) throw std::invalid_argument("price_sequential: nt must be positive");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = spatial.size();
    const double tau = spatial.params.maturity / static_cast<double>(nt);

    // A = I / tau - L_h
    SparseBuilder<double> builder(n, n);
    const auto& l = spatial.operator_matrix;
    for (std::size_t r = 0; r < n; ++r) {
        builder.add(r, r, 1.0 / tau);
        for (std::size_t k = l.offsets()[r]; k < l.offsets()[r + 1]; ++k) builder.add(r, l.columns()[k], -l.values()[k]);
    }
    Lcp lcp = Lcp::from_matrix(builder.build(), std::vector<double>(n), spatial.payoff);

    SequentialResult result;
    std::unique_ptr<SparseLu<double>> full_lu;
    const PolicyLinearSolver solver = [&](const Lcp& problem, const PolicyMask& mask, std::span<const double> rhs,
                                          std::span<const double>) {
        if (mask.count() == n) {
            if (!full_lu) {
                full_lu = std::make_unique<SparseLu<double>>(*problem.matrix);
                ++result.factorizations;
            }
            return full_lu->solve(rhs);
        }
        ++result.factorizations;
        const SparseLu<double> lu(policy_matrix(*problem.matrix, mask));
        return lu.solve(rhs);
    };

    PolicyOptions policy;
    policy.tol = options.tol;
    policy.max_iter = options.max_iter;

    result.trajectory.reserve(nt + 1);
    result.trajectory.push_back(spatial.payoff);
    const std::vector<double> g_static = spatial.boundary(0.0);
    for (std::size_t step = 1; step <= nt; ++step) {
        const auto& prev = result.trajectory.back();
        const std::vector<double> g =
            spatial.time_dependent_boundary ? spatial.boundary(static_cast<double>(step) * tau) : g_static;
        for (std::size_t i = 0; i < n; ++i) lcp.b[i] = prev[i] / tau + g[i];
        auto solved = solve_lcp_policy(lcp, solver, prev, policy);
        if (!solved.stats.converged()) result.converged = false;
        result.step_solves.push_back(solved.stats.iterations);
        result.total_solves += solved.stats.iterations;
        result.total_corrections += solved.stats.iterations - 1;
        result.max_step_solves = std::max(result.max_step_solves, solved.stats.iterations);
        result.trajectory.push_back(std::move(solved.x));
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace pintlcp
