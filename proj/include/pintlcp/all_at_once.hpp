#pragma once

#include "pintlcp/lcp.hpp"
#include "pintlcp/market_models.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pintlcp {

/// Space-time obstacle problem min(M v - f, v - Phi) = 0 for backward Euler
/// over nt steps, with M = B (x) I_s - I_t (x) L_h and
/// B = (1/tau) tridiag(-1, 1, 0).
///
/// M is never formed; block n of M v is (v_n - v_{n-1}) / tau - L_h v_n with
/// v_0 = 0. The initial condition enters only through f_1 = u^0 / tau + g_1.
class AllAtOnceSystem {
public:
    AllAtOnceSystem(SpatialSystem spatial, std::size_t nt);

    [[nodiscard]] const SpatialSystem& spatial() const noexcept { return spatial_; }
    [[nodiscard]] std::size_t nt() const noexcept { return nt_; }
    [[nodiscard]] std::size_t ns() const noexcept { return spatial_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return nt_ * spatial_.size(); }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const std::vector<double>& rhs() const noexcept { return f_; }
    [[nodiscard]] const std::vector<double>& obstacle() const noexcept { return obstacle_; }

    /// out = M v.
    void apply_m(std::span<const double> v, std::span<double> out) const;
    /// out = v + Theta (M v - v).
    void apply_mk(const PolicyMask& mask, std::span<const double> v, std::span<double> out) const;

    /// The problem as a generic LCP with a matrix-free operator.
    [[nodiscard]] Lcp as_lcp() const;
    /// Assembled M, for oracles and small direct solves.
    [[nodiscard]] SparseMatrix<double> explicit_matrix() const;

    /// Block n (0-based, time step n + 1) of a stacked vector.
    [[nodiscard]] std::span<const double> block(std::span<const double> v, std::size_t n) const {
        return v.subspan(n * ns(), ns());
    }

private:
    SpatialSystem spatial_;
    std::size_t nt_;
    double tau_;
    std::vector<double> f_;
    std::vector<double> obstacle_;
};

[[nodiscard]] std::vector<double> apply_M(const AllAtOnceSystem& system, std::span<const double> v);
[[nodiscard]] std::vector<double> apply_Mk(const AllAtOnceSystem& system, const PolicyMask& mask,
                                           std::span<const double> v);

/// Outcome of the outer all-at-once policy iteration.
struct AllAtOnceResult {
    std::vector<double> v;
    PolicyStats stats;
    std::vector<PolicyMask> masks;  ///< mask used by each solve, when recorded
};

struct AllAtOnceOptions {
    double tol1 = 1e-6;
    std::size_t max_outer = 200;
    bool record_masks = false;
};

/// Policy iteration on the space-time LCP starting from v^0 = Phi. The inner
/// solver receives the warm start v^{k-1}. Stops when
/// ||min(M v - f, v - Phi)||_inf <= tol1 or the mask repeats.
[[nodiscard]] AllAtOnceResult policy_iterate_all_at_once(const AllAtOnceSystem& system,
                                                         const PolicyLinearSolver& inner,
                                                         const AllAtOnceOptions& options = {});

/// N_s x N_t 0-1 matrix whose column j is the diagonal of mask block j.
struct TmatView {
    std::size_t ns = 0;
    std::size_t nt = 0;
    std::vector<char> entries;  ///< column-major: entries[j * ns + i]
    std::size_t rank = 0;

    [[nodiscard]] bool at(std::size_t i, std::size_t j) const { return entries[j * ns + i] != 0; }
};

/// Reshapes the mask and computes its numerical rank (singular values above
/// 1e-10 times the largest).
[[nodiscard]] TmatView tmat_view(const PolicyMask& mask, std::size_t nt, std::size_t ns);

}  // namespace pintlcp
