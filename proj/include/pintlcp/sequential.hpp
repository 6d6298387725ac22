#pragma once

#include "pintlcp/lcp.hpp"
#include "pintlcp/market_models.hpp"

#include <cstddef>
#include <vector>

namespace pintlcp {

struct SequentialOptions {
    double tol = 1e-6;
    std::size_t max_iter = 200;  ///< per time step
};

/// Backward-Euler time stepping with one obstacle problem per step.
struct SequentialResult {
    std::vector<std::vector<double>> trajectory;  ///< u^0 = phi, ..., u^{nt}
    std::vector<std::size_t> step_solves;         ///< linear solves per step
    std::size_t total_solves = 0;
    /// Solves beyond the first in each step, summed: the number of policy
    /// corrections after the warm start from u^{n-1}.
    std::size_t total_corrections = 0;
    std::size_t max_step_solves = 0;
    std::size_t factorizations = 0;
    double wall_seconds = 0.0;
    bool converged = true;

    [[nodiscard]] const std::vector<double>& final_slice() const { return trajectory.back(); }
};

/// For n = 1..nt solves min((I/tau - L_h) u^n - (u^{n-1}/tau + g_n), u^n - phi) = 0
/// by policy iteration started from u^{n-1}. Steps whose mask is all ones
/// reuse one LU of I/tau - L_h; other masks are factorized afresh.
[[nodiscard]] SequentialResult price_sequential(const SpatialSystem& spatial, std::size_t nt,
                                                const SequentialOptions& options = {});

}  // namespace pintlcp
