#pragma once

// Dense reference constructions used by the unit tests and the acceptance
// binary. Nothing here calls the library's own dense paths.

#include "pintlcp/market_models.hpp"
#include "pintlcp/sparse.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using pintlcp::Complex;
using Eigen::Index;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

inline Index ix(std::size_t i) { return static_cast<Index>(i); }

inline Eigen::MatrixXd dense(const pintlcp::SparseMatrix<double>& a) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ix(a.rows()), ix(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) d(ix(r), ix(a.columns()[k])) = a.values()[k];
    }
    return d;
}

inline Eigen::VectorXd vec(std::span<const double> x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), ix(x.size()));
}

inline std::vector<double> stdvec(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double inf_norm(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

/// B = (1/tau) tridiag(-1, 1, 0) with -alpha/tau in the top-right corner.
inline Eigen::MatrixXd time_matrix(std::size_t nt, double tau, double alpha = 0.0) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ix(nt), ix(nt));
    for (std::size_t i = 0; i < nt; ++i) {
        b(ix(i), ix(i)) = 1.0 / tau;
        if (i > 0) b(ix(i), ix(i - 1)) = -1.0 / tau;
    }
    if (nt > 1) b(0, ix(nt - 1)) += -alpha / tau;
    // nt == 1: the wrap-around entry lands on the diagonal.
    if (nt == 1) b(0, 0) -= alpha / tau;
    return b;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return k;
}

/// M = B (x) I - I (x) L (alpha = 0), or M_alpha.
inline Eigen::MatrixXd space_time_matrix(const Eigen::MatrixXd& l, std::size_t nt, double tau, double alpha = 0.0) {
    const Eigen::MatrixXd is = Eigen::MatrixXd::Identity(l.rows(), l.cols());
    const Eigen::MatrixXd it = Eigen::MatrixXd::Identity(ix(nt), ix(nt));
    return kron(time_matrix(nt, tau, alpha), is) - kron(it, l);
}

/// I + diag(theta) (A - I).
inline Eigen::MatrixXd policy_dense(const Eigen::MatrixXd& a, const std::vector<char>& theta) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        if (theta[static_cast<std::size_t>(i)]) p.row(i) = a.row(i);
    }
    return p;
}

/// Active-set enumeration for min(A x - b, x - c) = 0. Returns the first
/// admissible split, or nothing.
inline std::optional<Eigen::VectorXd> enumerate_lcp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                    const Eigen::VectorXd& c) {
    const auto n = static_cast<std::size_t>(a.rows());
    if (n > 22) throw std::invalid_argument("enumerate_lcp: too large");
    const double scale = 1.0 + a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
    const double eps = 1e-9 * scale;
    for (std::uint64_t set = 0; set < (std::uint64_t{1} << n); ++set) {
        Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(a.rows(), a.cols());
        Eigen::VectorXd rhs = c;
        for (std::size_t i = 0; i < n; ++i) {
            if ((set >> i) & 1U) {
                sys.row(ix(i)) = a.row(ix(i));
                rhs(ix(i)) = b(ix(i));
            }
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
        if (std::abs(lu.determinant()) < 1e-300) continue;
        const Eigen::VectorXd x = lu.solve(rhs);
        const Eigen::VectorXd w = a * x - b;
        const Eigen::VectorXd d = x - c;
        if (w.minCoeff() >= -eps && d.minCoeff() >= -eps && w.cwiseMin(d).cwiseAbs().maxCoeff() <= eps) return x;
    }
    return std::nullopt;
}

/// Dense stacked rhs of the space-time system: f_n = g(t_n) + delta_{n1} phi / tau.
inline Eigen::VectorXd space_time_rhs(const pintlcp::SpatialSystem& sp, std::size_t nt) {
    const double tau = sp.params.maturity / static_cast<double>(nt);
    const std::size_t ns = sp.size();
    Eigen::VectorXd f(ix(nt * ns));
    for (std::size_t n = 0; n < nt; ++n) {
        const auto g = sp.boundary(static_cast<double>(n + 1) * tau);
        for (std::size_t i = 0; i < ns; ++i) f(ix(n * ns + i)) = g[i] + (n == 0 ? sp.payoff[i] / tau : 0.0);
    }
    return f;
}

/// Osborne balancing with powers of two, as done before a dense eigensolve.
inline Eigen::MatrixXd balance(Eigen::MatrixXd a) {
    const double radix = 2.0;
    for (bool done = false; !done;) {
        done = true;
        for (Index i = 0; i < a.rows(); ++i) {
            double c = 0.0, r = 0.0;
            for (Index j = 0; j < a.rows(); ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            while (c < r / radix) {
                f *= radix;
                c *= radix * radix;
            }
            while (c > r * radix) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return a;
}

/// Eigenvalues of a balanced real matrix.
inline std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(balance(a), false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// Largest distance between each expected value and its greedily matched
/// partner in `computed`.
inline double match_spectra(std::vector<std::complex<double>> computed,
                            const std::vector<std::complex<double>>& expected) {
    double worst = 0.0;
    for (const auto& lam : expected) {
        auto it = std::min_element(computed.begin(), computed.end(), [&](const auto& a, const auto& b) {
            return std::abs(a - lam) < std::abs(b - lam);
        });
        worst = std::max(worst, std::abs(*it - lam));
        computed.erase(it);
    }
    return worst;
}

/// Dense unitary DFT matrix F_{jk} = w^{jk} / sqrt(n), w = exp(-2 pi i / n).
inline MatC dft(std::size_t n) {
    MatC f(ix(n), ix(n));
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * pi * static_cast<double>(j * k % n) / static_cast<double>(n);
            f(ix(j), ix(k)) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), ang);
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Random toy instances
// ---------------------------------------------------------------------------

struct Toy {
    std::string label;
    pintlcp::ModelParams params;
    pintlcp::Grid grid;
    std::size_t nt = 1;
};

inline Toy random_toy(std::mt19937& rng, int model, std::size_t max_unknowns, std::size_t max_nt) {
    using namespace pintlcp;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    auto pick_n = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    Toy t;
    t.nt = pick_n(1, max_nt);
    switch (model) {
        case 0: {
            t.params = ModelParams{100.0, pick(0.25, 1.0), pick(0.0, 0.1), BlackScholesParams{pick(0.1, 0.6)}};
            t.grid = black_scholes_grid(pick(200.0, 400.0), pick_n(3, max_unknowns));
            t.label = "bs1d";
            break;
        }
        case 1: {
            t.params = ModelParams{25.0, pick(0.1, 0.5), pick(0.0, 0.08),
                                   SpreadParams{pick(0.2, 0.5), pick(0.2, 0.5), pick(-0.7, 0.7)}};
            const std::size_t ns = pick_n(2, 4);
            const std::size_t nv = pick_n(2, std::max<std::size_t>(2, max_unknowns / ns));
            t.grid = spread_grid(60.0, 60.0, ns, nv);
            t.label = "spread2d";
            break;
        }
        default: {
            t.params = ModelParams{10.0, pick(0.1, 0.5), pick(0.0, 0.1),
                                   HestonParams{pick(0.3, 0.9), pick(1.0, 5.0), pick(0.04, 0.16), pick(-0.5, 0.5)}};
            const std::size_t ns = pick_n(2, 4);
            const std::size_t nv = pick_n(2, std::max<std::size_t>(2, max_unknowns / ns));
            t.grid = heston_grid(20.0, 1.0, ns, nv);
            t.label = "heston2d";
            break;
        }
    }
    t.label += " ns=" + std::to_string(t.grid.ns()) + " nv=" + std::to_string(t.grid.nv()) +
               " nt=" + std::to_string(t.nt);
    return t;
}

}  // namespace oracle
