#pragma once

#include "pintlcp/sparse.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pintlcp {

/// Raised when the inverse transform leaves an imaginary part that a real
/// input cannot produce.
class ImaginaryResidueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unitary DFT across time for a stacked vector of nt blocks of length ns:
/// forward applies F = [w^{jk} / sqrt(nt)], w = exp(-2 pi i / nt), to every
/// spatial index; backward applies F^*. Thread-safe after construction.
class TimeFft {
public:
    TimeFft(std::size_t nt, std::size_t ns);
    ~TimeFft();
    TimeFft(const TimeFft&) = delete;
    TimeFft& operator=(const TimeFft&) = delete;

    [[nodiscard]] std::size_t nt() const noexcept { return nt_; }
    [[nodiscard]] std::size_t ns() const noexcept { return ns_; }

    void forward(std::span<Complex> data) const;
    void backward(std::span<Complex> data) const;

private:
    void run(void* plan, std::span<Complex> data) const;

    std::size_t nt_;
    std::size_t ns_;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

/// Frequencies whose Step-(b) systems are solved, and the mirrored ones
/// obtained by conjugation. Indices are 0-based frequency numbers.
struct ConjugatePairPlan {
    std::vector<std::size_t> solve;
    std::vector<std::pair<std::size_t, std::size_t>> mirror;  ///< (target, source)
};

/// First ceil((nt + 1) / 2) frequencies solved; frequency nt - k mirrors k.
[[nodiscard]] ConjugatePairPlan conjugate_pair_plan(std::size_t nt);

/// Eigenvalues of the alpha-circulant time matrix
///
///     B_alpha = (1/tau) [ 1            -alpha ]
///                       [ -1  1               ]
///                       [      ...  ...       ]
///                       [           -1     1  ]
///
/// in DFT-frequency order: lambda_k = (1 - alpha^{1/nt} w^k) / tau with
/// w = exp(-2 pi i / nt), k = 0..nt-1. Real parts are all positive.
[[nodiscard]] std::vector<Complex> alpha_circulant_eigenvalues(double alpha, std::size_t nt, double tau);

/// Diagonalization B_alpha = V D V^{-1} with V = Lambda^{-1} F^*,
/// Lambda = diag(alpha^{j/nt}), and the block transforms built on it.
class AlphaCirculant {
public:
    AlphaCirculant(double alpha, std::size_t nt, double tau);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] std::size_t nt() const noexcept { return nt_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const std::vector<Complex>& eigenvalues() const noexcept { return eigenvalues_; }
    /// Diagonal of Lambda: alpha^{j/nt}.
    [[nodiscard]] const std::vector<double>& scaling() const noexcept { return scaling_; }

    /// (V^{-1} (x) I_s) r = (F (x) I_s)(Lambda (x) I_s) r.
    [[nodiscard]] std::vector<Complex> step_a(std::span<const double> r, const TimeFft& fft) const;
    [[nodiscard]] std::vector<Complex> step_a(std::span<const Complex> r, const TimeFft& fft) const;

    /// (V (x) I_s) z = (Lambda^{-1} (x) I_s)(F^* (x) I_s) z, real part.
    /// Throws ImaginaryResidueError when max|Im| exceeds residue_tol times
    /// the largest output magnitude (plus an absolute floor).
    [[nodiscard]] std::vector<double> step_c(std::span<const Complex> z, const TimeFft& fft) const;
    /// Same transform without discarding the imaginary part.
    [[nodiscard]] std::vector<Complex> step_c_complex(std::span<const Complex> z, const TimeFft& fft) const;

    /// Tolerance used by step_c. Defaults to max(1e-10, 1e3 eps / alpha):
    /// the scaled transform amplifies round-off by up to 1/alpha.
    [[nodiscard]] double residue_tol() const noexcept { return residue_tol_; }
    void set_residue_tol(double tol) noexcept { residue_tol_ = tol; }

private:
    double alpha_;
    std::size_t nt_;
    double tau_;
    std::vector<Complex> eigenvalues_;
    std::vector<double> scaling_;
    double residue_tol_;
};

}  // namespace pintlcp
