#pragma once

#include "pintlcp/all_at_once.hpp"
#include "pintlcp/alpha_circulant.hpp"
#include "pintlcp/linear_kernels.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pintlcp {

// ---------------------------------------------------------------------------
// Kronecker approximation of the policy mask
// ---------------------------------------------------------------------------

enum class PsiStrategy {
    Average,  ///< nearest Kronecker product: mean of the diagonal blocks
    Rounded,  ///< mean thresholded at 0.5, ties to 1
    Mode,     ///< majority bit over time, ties to 1
};

[[nodiscard]] std::string to_string(PsiStrategy strategy);
[[nodiscard]] PsiStrategy psi_strategy_from_string(const std::string& name);

struct PsiDiagonal {
    std::vector<double> values;
    PsiStrategy strategy = PsiStrategy::Average;
};

/// Psi such that I_t (x) Psi approximates the block-diagonal mask.
[[nodiscard]] PsiDiagonal compute_psi(const PolicyMask& mask, std::size_t nt, std::size_t ns, PsiStrategy strategy);

// ---------------------------------------------------------------------------
// Step-(b) frequency solvers
// ---------------------------------------------------------------------------

struct PreconditionerOptions {
    std::size_t workers = 1;
    bool conjugate_pairs = true;
};

/// Factorizations of  diag(lambda_n psi + 1 - psi) - diag(psi) L_h  for the
/// planned frequencies. Tridiagonal L_h uses the Thomas algorithm, anything
/// else a complex sparse LU. An empty psi means psi = 1, i.e. lambda_n I - L_h.
class FrequencySolvers {
public:
    FrequencySolvers(const SparseMatrix<double>& operator_matrix, std::span<const double> psi,
                     const AlphaCirculant& circulant, const PreconditionerOptions& options);

    /// Solves every frequency block of z (nt blocks of ns) in place.
    void solve(std::span<Complex> z) const;

    [[nodiscard]] std::size_t factorizations() const noexcept { return factors_.size(); }
    [[nodiscard]] bool uses_thomas() const noexcept { return thomas_; }

private:
    using Factor = std::variant<ThomasFactorization, std::shared_ptr<const SparseLu<Complex>>>;

    std::size_t nt_;
    std::size_t ns_;
    bool thomas_ = false;
    PreconditionerOptions options_;
    ConjugatePairPlan plan_;
    std::vector<std::size_t> solved_;  ///< frequencies with a factorization
    std::vector<Factor> factors_;      ///< parallel to solved_
};

// ---------------------------------------------------------------------------
// NKPA preconditioner (1D default)
// ---------------------------------------------------------------------------

/// P = I + (I_t (x) Psi)(M_alpha - I), inverted through the alpha-circulant
/// diagonalization: Step-(a) transform, per-frequency solves, Step-(c).
class NkpaPreconditioner {
public:
    NkpaPreconditioner(const AllAtOnceSystem& system, const AlphaCirculant& circulant, PsiDiagonal psi,
                       std::shared_ptr<const TimeFft> fft, const PreconditionerOptions& options = {});

    /// z = P^{-1} r.
    void apply(std::span<const double> r, std::span<double> z) const;

    [[nodiscard]] const PsiDiagonal& psi() const noexcept { return psi_; }
    [[nodiscard]] std::size_t factorizations() const noexcept { return solvers_.factorizations(); }

private:
    const AlphaCirculant& circulant_;
    PsiDiagonal psi_;
    std::shared_ptr<const TimeFft> fft_;
    FrequencySolvers solvers_;
};

[[nodiscard]] NkpaPreconditioner build_nkpa(const AllAtOnceSystem& system, const AlphaCirculant& circulant,
                                            PsiDiagonal psi, const PreconditionerOptions& options = {});
[[nodiscard]] std::vector<double> apply_nkpa(const NkpaPreconditioner& precond, std::span<const double> r);

// ---------------------------------------------------------------------------
// Projected reduced system (2D default)
// ---------------------------------------------------------------------------

/// Policy system restricted to the rows with Theta = 1. Inactive unknowns are
/// fixed at their obstacle values.
struct ReducedSystem {
    std::size_t full_size = 0;
    std::vector<std::size_t> active;  ///< sorted, duplicate-free
    std::vector<double> rhs;          ///< f_1 - S_1 M S_2^T y_2
    std::vector<double> fixed;        ///< full length: Phi on inactive entries, 0 on active
    LinearOperator apply;             ///< S_1 M S_1^T

    [[nodiscard]] std::vector<double> gather(std::span<const double> full) const;
    /// Full vector with reduced values on active entries and fixed ones elsewhere.
    [[nodiscard]] std::vector<double> scatter(std::span<const double> reduced) const;
};

/// The returned operator references `system`.
[[nodiscard]] ReducedSystem reduce_policy_system(const AllAtOnceSystem& system, const PolicyMask& mask);

/// S_1 M_alpha^{-1} S_1^T with M_alpha = B_alpha (x) I_s - I_t (x) L_h. The
/// frequency factorizations of lambda_n I - L_h do not depend on the mask and
/// are computed once.
class ProjectedPreconditioner {
public:
    ProjectedPreconditioner(const AllAtOnceSystem& system, const AlphaCirculant& circulant,
                            std::shared_ptr<const TimeFft> fft, const PreconditionerOptions& options = {});

    /// z = M_alpha^{-1} r on the full space-time vector.
    void apply_full(std::span<const double> r, std::span<double> z) const;
    /// z = S_1 M_alpha^{-1} S_1^T r for the given active set.
    void apply(std::span<const std::size_t> active, std::span<const double> r, std::span<double> z) const;

    [[nodiscard]] std::size_t factorizations() const noexcept { return solvers_.factorizations(); }

private:
    std::size_t full_size_;
    const AlphaCirculant& circulant_;
    std::shared_ptr<const TimeFft> fft_;
    FrequencySolvers solvers_;
};

[[nodiscard]] std::vector<double> apply_projected(const ProjectedPreconditioner& precond,
                                                  std::span<const std::size_t> active,
                                                  std::span<const double> r_reduced);

// ---------------------------------------------------------------------------
// Inner solvers for the all-at-once policy iteration
// ---------------------------------------------------------------------------

enum class PreconditionerKind {
    Auto,       ///< NKPA for 1D models, projected for 2D
    Nkpa,
    Projected,
    None,       ///< unpreconditioned GMRES
    Direct,     ///< sparse LU of the assembled policy matrix
};

[[nodiscard]] std::string to_string(PreconditionerKind kind);
[[nodiscard]] PreconditionerKind preconditioner_kind_from_string(const std::string& name);
[[nodiscard]] PreconditionerKind resolve_preconditioner(PreconditionerKind kind, const AllAtOnceSystem& system);

struct InnerSolverOptions {
    PreconditionerKind kind = PreconditionerKind::Auto;
    double alpha = 1e-8;
    PsiStrategy psi = PsiStrategy::Average;
    double tol2 = 1e-10;
    ResidualReference reference = ResidualReference::InitialResidual;
    std::size_t max_gmres = 500;
    /// GMRES also stops once the explicit residual is within this multiple
    /// of eps * || |M^(k)| |x0| + |f^(k)| ||, the level round-off allows.
    double floor_factor = 4.0;
    PreconditionerOptions parallel;
};

struct InnerSolverStats {
    std::vector<std::size_t> gmres_iterations;  ///< per policy iteration
    std::vector<std::vector<double>> residual_histories;
    std::size_t factorizations = 0;
    std::size_t warmup_factorizations = 0;  ///< factorizations done before the first solve
    std::size_t floor_limited = 0;          ///< solves accepted on the round-off floor

    [[nodiscard]] std::size_t gmres_total() const noexcept;
};

/// Raised when an inner linear solve fails to reach tol2.
class InnerSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds the inner solver. Statistics accumulate in `stats`; the returned
/// solver references `system`.
[[nodiscard]] PolicyLinearSolver make_inner_solver(const AllAtOnceSystem& system, const InnerSolverOptions& options,
                                                   std::shared_ptr<InnerSolverStats> stats);

// ---------------------------------------------------------------------------
// Spectrum diagnostics
// ---------------------------------------------------------------------------

struct SpectrumReport {
    std::vector<Complex> system;          ///< eigenvalues of the (reduced) policy matrix
    std::vector<Complex> preconditioned;  ///< eigenvalues of precond^{-1} times it
};

/// Dense eigenvalues of A and of P^{-1} A for operators of dimension n.
[[nodiscard]] SpectrumReport operator_spectrum(const LinearOperator& apply_a, const LinearOperator& apply_precond,
                                               std::size_t n, std::size_t max_dim = 4096);

/// Spectrum of M^(k) and its NKPA-preconditioned form, or of the reduced
/// matrix and its projected-preconditioned form.
[[nodiscard]] SpectrumReport spectrum_diagnostics(const AllAtOnceSystem& system, const PolicyMask& mask,
                                                  const InnerSolverOptions& options, std::size_t max_dim = 4096);

/// One "re im" pair per line.
void write_complex_pairs(std::ostream& out, std::span<const Complex> values);

}  // namespace pintlcp
