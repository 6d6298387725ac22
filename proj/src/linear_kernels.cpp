#include "pintlcp/linear_kernels.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pintlcp {

SparseMatrix<Complex> to_complex(const SparseMatrix<double>& a) {
    std::vector<Complex> values(a.values().begin(), a.values().end());
    return SparseMatrix<Complex>(a.rows(), a.cols(), a.offsets(), a.columns(), std::move(values));
}

// ---------------------------------------------------------------------------
// Thomas
// ---------------------------------------------------------------------------

ThomasFactorization::ThomasFactorization(std::span<const Complex> lower, std::span<const Complex> diag,
                                         std::span<const Complex> upper) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("thomas: lower/diag/upper must have equal length");
    }
    lower_.assign(lower.begin(), lower.end());
    pivots_.resize(n);
    upper_mod_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex pivot = diag[i];
        double scale = std::abs(diag[i]);
        if (i > 0) {
            pivot -= lower[i] * upper_mod_[i - 1];
            scale += std::abs(lower[i]);
        }
        if (i + 1 < n) scale += std::abs(upper[i]);
        if (!(std::abs(pivot) > 1e-14 * scale)) {
            throw SingularMatrixError("thomas: vanishing pivot at row " + std::to_string(i));
        }
        pivots_[i] = pivot;
        upper_mod_[i] = (i + 1 < n) ? upper[i] / pivot : Complex(0.0);
    }
}

void ThomasFactorization::solve(std::span<Complex> rhs) const {
    const std::size_t n = pivots_.size();
    if (rhs.size() != n) throw std::invalid_argument("thomas: rhs length mismatch");
    if (n == 0) return;
    rhs[0] /= pivots_[0];
    for (std::size_t i = 1; i < n; ++i) {
        rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / pivots_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= upper_mod_[i] * rhs[i + 1];
    }
}

std::vector<Complex> thomas_solve(std::span<const Complex> lower, std::span<const Complex> diag,
                                  std::span<const Complex> upper, std::span<const Complex> rhs) {
    ThomasFactorization factor(lower, diag, upper);
    std::vector<Complex> x(rhs.begin(), rhs.end());
    factor.solve(x);
    return x;
}

// ---------------------------------------------------------------------------
// Sparse LU (Eigen SparseLU behind the interface)
// ---------------------------------------------------------------------------

template <typename Scalar>
struct SparseLu<Scalar>::Impl {
    Eigen::SparseMatrix<Scalar> matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>> lu;
};

template <typename Scalar>
SparseLu<Scalar>::SparseLu(const SparseMatrix<Scalar>& a) : impl_(std::make_unique<Impl>()), n_(a.rows()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sparse_lu: matrix must be square");
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(a.nnz());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) {
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(a.columns()[k]), a.values()[k]);
        }
    }
    const auto n = static_cast<Eigen::Index>(n_);
    impl_->matrix.resize(n, n);
    impl_->matrix.setFromTriplets(triplets.begin(), triplets.end());
    impl_->matrix.makeCompressed();
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
        throw SingularMatrixError("sparse_lu: factorization failed (" + impl_->lu.lastErrorMessage() + ")");
    }
}

template <typename Scalar>
SparseLu<Scalar>::~SparseLu() = default;
template <typename Scalar>
SparseLu<Scalar>::SparseLu(SparseLu&&) noexcept = default;
template <typename Scalar>
SparseLu<Scalar>& SparseLu<Scalar>::operator=(SparseLu&&) noexcept = default;

template <typename Scalar>
std::vector<Scalar> SparseLu<Scalar>::solve(std::span<const Scalar> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("lu_solve: rhs length mismatch");
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Map<const Vec> b(rhs.data(), static_cast<Eigen::Index>(n_));
    Vec x = impl_->lu.solve(b);
    return std::vector<Scalar>(x.data(), x.data() + x.size());
}

template class SparseLu<double>;
template class SparseLu<Complex>;

// ---------------------------------------------------------------------------
// GMRES
// ---------------------------------------------------------------------------

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> residual(const LinearOperator& apply_a, std::span<const double> b,
                             std::span<const double> x) {
    std::vector<double> r(b.size());
    apply_a(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

}  // namespace

GmresOutcome gmres(const LinearOperator& apply_a, const LinearOperator& apply_precond,
                   std::span<const double> b, std::span<const double> x0, const GmresOptions& options) {
    const std::size_t n = b.size();
    if (x0.size() != n) throw std::invalid_argument("gmres: x0 length mismatch");

    GmresOutcome out;
    out.solution.assign(x0.begin(), x0.end());

    std::vector<double> r = residual(apply_a, b, out.solution);
    const double beta0 = norm2(r);
    if (!std::isfinite(beta0)) throw NonFiniteError("gmres: non-finite initial residual");
    if (beta0 == 0.0) {
        out.converged = true;
        out.residual_history.push_back(0.0);
        return out;
    }
    const double b_norm = norm2(b);
    const double scale =
        options.reference == ResidualReference::RightHandSide && b_norm > 0.0 ? b_norm : beta0;
    out.residual_history.push_back(beta0 / scale);
    double floor_scale = options.floor_scale;
    if (!(floor_scale > 0.0)) {
        std::vector<double> ax0(n);
        apply_a(out.solution, ax0);
        floor_scale = b_norm + norm2(ax0);
    }
    const double floor = options.floor_factor * std::numeric_limits<double>::epsilon() * floor_scale;
    const double target = std::max(options.tol * scale, floor);
    if (beta0 <= options.tol * scale) {
        out.converged = true;
        return out;
    }

    std::vector<double> w(n), z(n);
    while (true) {
        const double beta = norm2(r);
        std::vector<std::vector<double>> basis;
        basis.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;

        // Preconditioned directions are kept so the update never re-applies
        // the preconditioner, whose round-off would otherwise cap accuracy.
        std::vector<std::vector<double>> directions;
        // Hessenberg columns after Givens rotation, stored column-wise.
        std::vector<std::vector<double>> hess;
        std::vector<double> cs, sn, g{beta};
        bool inner_done = false;

        while (!inner_done && out.iterations < options.max_iter) {
            const std::size_t j = basis.size() - 1;
            if (apply_precond) {
                apply_precond(basis[j], z);
                directions.push_back(z);
            } else {
                z = basis[j];
            }
            apply_a(z, w);
            const double w_norm = norm2(w);

            std::vector<double> h(j + 2, 0.0);
            for (std::size_t i = 0; i <= j; ++i) {
                h[i] = dot(w, basis[i]);
                for (std::size_t k = 0; k < n; ++k) w[k] -= h[i] * basis[i][k];
            }
            h[j + 1] = norm2(w);
            if (!std::isfinite(h[j + 1])) throw NonFiniteError("gmres: non-finite Hessenberg entry");
            const double h_next = h[j + 1];
            const bool breakdown = h_next <= options.breakdown_tol * w_norm;

            for (std::size_t i = 0; i < j; ++i) {
                const double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            const double denom = std::hypot(h[j], h[j + 1]);
            const double c = denom == 0.0 ? 1.0 : h[j] / denom;
            const double s = denom == 0.0 ? 0.0 : h[j + 1] / denom;
            cs.push_back(c);
            sn.push_back(s);
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = 0.0;
            g.push_back(-s * g[j]);
            g[j] = c * g[j];
            hess.push_back(std::move(h));

            ++out.iterations;
            const double rel = std::abs(g[j + 1]) / scale;
            out.residual_history.push_back(rel);

            if (breakdown) {
                out.breakdown = true;
                inner_done = true;
            } else if (std::abs(g[j + 1]) <= target) {
                inner_done = true;
            } else {
                basis.emplace_back(n);
                for (std::size_t k = 0; k < n; ++k) basis.back()[k] = w[k] / h_next;
            }
        }

        // Back substitution on the rotated Hessenberg system.
        const std::size_t m = hess.size();
        if (m == 0) break;
        std::vector<double> y(m);
        for (std::size_t i = m; i-- > 0;) {
            double acc = g[i];
            for (std::size_t k = i + 1; k < m; ++k) acc -= hess[k][i] * y[k];
            if (hess[i][i] == 0.0) throw SingularMatrixError("gmres: singular Hessenberg system");
            y[i] = acc / hess[i][i];
        }
        const auto& dirs = apply_precond ? directions : basis;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < n; ++k) out.solution[k] += y[i] * dirs[i][k];
        }

        r = residual(apply_a, b, out.solution);
        const double explicit_abs = norm2(r);
        if (!std::isfinite(explicit_abs)) throw NonFiniteError("gmres: non-finite residual");
        if (explicit_abs <= target) {
            out.converged = true;
            out.floor_limited = explicit_abs > options.tol * scale;
            break;
        }
        if (out.breakdown || out.iterations >= options.max_iter) break;
    }
    return out;
}

}  // namespace pintlcp
