#pragma once

#include "pintlcp/sparse.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pintlcp {

/// Raised when a factorization meets a vanishing pivot or a structurally
/// singular matrix.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative kernel produces NaN or Inf.
class NonFiniteError : public std::runtime_error {
public:
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Thomas algorithm
// ---------------------------------------------------------------------------

/// Factored complex tridiagonal matrix, reusable for many right-hand sides.
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]; lower[0] and
/// upper[n-1] are ignored. No pivoting: a pivot smaller than 1e-14 times the
/// row scale raises SingularMatrixError naming the row.
class ThomasFactorization {
public:
    ThomasFactorization() = default;
    ThomasFactorization(std::span<const Complex> lower, std::span<const Complex> diag,
                        std::span<const Complex> upper);

    [[nodiscard]] std::size_t size() const noexcept { return pivots_.size(); }

    /// Solves in place.
    void solve(std::span<Complex> rhs) const;

private:
    std::vector<Complex> lower_;
    std::vector<Complex> pivots_;     // eliminated diagonal
    std::vector<Complex> upper_mod_;  // upper[i] / pivot[i]
};

/// One-shot tridiagonal solve.
[[nodiscard]] std::vector<Complex> thomas_solve(std::span<const Complex> lower,
                                                std::span<const Complex> diag,
                                                std::span<const Complex> upper,
                                                std::span<const Complex> rhs);

// ---------------------------------------------------------------------------
// Sparse LU
// ---------------------------------------------------------------------------

/// Cached sparse LU factorization (real or complex). The factorization is
/// immutable once built; lu_solve may be called concurrently.
template <typename Scalar>
class SparseLu {
public:
    explicit SparseLu(const SparseMatrix<Scalar>& a);
    ~SparseLu();
    SparseLu(SparseLu&&) noexcept;
    SparseLu& operator=(SparseLu&&) noexcept;
    SparseLu(const SparseLu&) = delete;
    SparseLu& operator=(const SparseLu&) = delete;

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::vector<Scalar> solve(std::span<const Scalar> rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t n_ = 0;
};

template <typename Scalar>
[[nodiscard]] SparseLu<Scalar> sparse_lu(const SparseMatrix<Scalar>& a) {
    return SparseLu<Scalar>(a);
}

template <typename Scalar>
[[nodiscard]] std::vector<Scalar> lu_solve(const SparseLu<Scalar>& lu, std::span<const Scalar> rhs) {
    return lu.solve(rhs);
}

extern template class SparseLu<double>;
extern template class SparseLu<Complex>;

// ---------------------------------------------------------------------------
// GMRES
// ---------------------------------------------------------------------------

/// y = op(x); x and y never alias.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Denominator of the relative residual.
enum class ResidualReference {
    InitialResidual,  ///< ||b - A x0||
    RightHandSide,    ///< ||b||
};

struct GmresOptions {
    double tol = 1e-10;
    ResidualReference reference = ResidualReference::InitialResidual;
    std::size_t max_iter = 500;
    double breakdown_tol = 1e-14;
    /// Attainable-accuracy floor: an explicit residual at or below
    /// floor_factor * eps * floor_scale also counts as converged.
    /// Zero disables it.
    double floor_factor = 1e3;
    /// Magnitude the floor is relative to. Zero means ||b|| + ||A x0||;
    /// callers holding the matrix pass the componentwise || |A||x0| + |b| ||.
    double floor_scale = 0.0;
};

struct GmresOutcome {
    std::vector<double> solution;
    std::size_t iterations = 0;
    /// Relative residuals ||b - A x_l|| / reference; index 0 is the initial
    /// residual (1 for the initial-residual reference, 0 when x0 is exact).
    std::vector<double> residual_history;
    bool converged = false;
    bool breakdown = false;
    /// Converged on the round-off floor rather than on tol.
    bool floor_limited = false;
};

/// Full (unrestarted) GMRES with right preconditioning and modified
/// Gram-Schmidt. Passing an empty precond means no preconditioning.
///
/// Convergence is tracked through the Hessenberg least-squares residual and
/// confirmed by an explicit residual before being reported; if the explicit
/// check fails the method restarts from the current iterate with whatever
/// iteration budget remains.
[[nodiscard]] GmresOutcome gmres(const LinearOperator& apply_a, const LinearOperator& apply_precond,
                                 std::span<const double> b, std::span<const double> x0,
                                 const GmresOptions& options = {});

}  // namespace pintlcp
