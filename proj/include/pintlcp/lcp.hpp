#pragma once

#include "pintlcp/linear_kernels.hpp"
#include "pintlcp/sparse.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace pintlcp {

/// Discrete obstacle problem min(A x - b, x - c) = 0.
///
/// A is available as an operator; the explicit sparse matrix is kept when the
/// problem was built from one so that direct solvers can use it.
struct Lcp {
    std::size_t n = 0;
    LinearOperator apply;
    std::vector<double> b;
    std::vector<double> c;
    std::shared_ptr<const SparseMatrix<double>> matrix;

    static Lcp from_matrix(SparseMatrix<double> a, std::vector<double> b, std::vector<double> c);
    static Lcp from_operator(std::size_t n, LinearOperator apply, std::vector<double> b, std::vector<double> c);
};

/// 0-1 diagonal of the policy matrix. A block size may be attached when the
/// mask belongs to a space-time system with equal-size time blocks.
class PolicyMask {
public:
    PolicyMask() = default;
    explicit PolicyMask(std::vector<char> bits, std::size_t block_size = 0);

    static PolicyMask filled(std::size_t n, bool value, std::size_t block_size = 0);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    [[nodiscard]] const std::vector<char>& bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t count() const noexcept;

    [[nodiscard]] std::size_t block_size() const noexcept { return block_size_; }
    [[nodiscard]] std::size_t block_count() const noexcept;
    /// Diagonal of block j (time step j + 1).
    [[nodiscard]] std::span<const char> block(std::size_t j) const;

    friend bool operator==(const PolicyMask& a, const PolicyMask& b) { return a.bits_ == b.bits_; }

private:
    std::vector<char> bits_;
    std::size_t block_size_ = 0;
};

/// z_i = min(x_i, y_i).
[[nodiscard]] std::vector<double> componentwise_min(std::span<const double> x, std::span<const double> y);

struct LcpResidual {
    std::vector<double> r;
    double inf_norm = 0.0;
};

/// r = min(A x - b, x - c) and its infinity norm.
[[nodiscard]] LcpResidual lcp_residual(const Lcp& lcp, std::span<const double> x);

/// bit_i = 1 iff (A x - b)_i <= (x - c)_i.
[[nodiscard]] PolicyMask compute_policy_mask(const Lcp& lcp, std::span<const double> x);

/// Mask from already-computed residual pair.
[[nodiscard]] PolicyMask policy_mask_from(std::span<const double> ax_minus_b, std::span<const double> x_minus_c,
                                          std::size_t block_size = 0);

struct PolicySystem {
    LinearOperator apply;                 ///< x -> x + Theta (A x - x)
    std::vector<double> rhs;              ///< c + Theta (b - c)
    std::optional<SparseMatrix<double>> matrix;  ///< I + Theta (A - I), when A is explicit
};

[[nodiscard]] PolicySystem build_policy_system(const Lcp& lcp, const PolicyMask& mask);

/// Explicit I + Theta (A - I).
[[nodiscard]] SparseMatrix<double> policy_matrix(const SparseMatrix<double>& a, const PolicyMask& mask);

/// Solves A_k y = b_k given the mask, the right-hand side b_k and the warm
/// start. Implementations may record their own statistics.
using PolicyLinearSolver =
    std::function<std::vector<double>(const Lcp&, const PolicyMask&, std::span<const double> rhs,
                                      std::span<const double> x0)>;

enum class PolicyStop { Residual, MaskRepeat, MaxIterations };

struct PolicyStats {
    std::size_t iterations = 0;  ///< number of linear solves
    std::vector<double> residual_history;  ///< ||min(Ax-b, x-c)||_inf after each solve
    PolicyStop stop = PolicyStop::MaxIterations;
    [[nodiscard]] bool converged() const noexcept { return stop != PolicyStop::MaxIterations; }
};

struct PolicyOptions {
    double tol = 1e-6;
    std::size_t max_iter = 200;
};

struct PolicyResult {
    std::vector<double> x;
    PolicyStats stats;
};

/// Howard's policy iteration: mask -> linear solve -> residual check, until
/// the residual drops below tol or the mask repeats exactly. At least one
/// solve is always performed. Exceeding max_iter is reported through
/// stats.stop, not thrown.
[[nodiscard]] PolicyResult solve_lcp_policy(const Lcp& lcp, const PolicyLinearSolver& solver,
                                            std::span<const double> x0, const PolicyOptions& options = {});

/// Direct solver for PolicyLinearSolver backed by sparse LU of the explicit
/// policy matrix.
[[nodiscard]] PolicyLinearSolver direct_policy_solver();

/// Raised by brute_force_lcp when no active set yields a solution.
class NoLcpSolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumerates all 2^n splits into rows with (A x)_i = b_i and rows with
/// x_i = c_i, solves each, and returns the first split whose solution
/// satisfies both inequalities to 1e-10 relative. Requires an explicit matrix
/// and n <= 20.
[[nodiscard]] std::vector<double> brute_force_lcp(const Lcp& lcp);

}  // namespace pintlcp
