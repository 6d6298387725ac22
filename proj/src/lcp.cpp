#include "pintlcp/lcp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pintlcp {

Lcp Lcp::from_matrix(SparseMatrix<double> a, std::vector<double> b, std::vector<double> c) {
    if (a.rows() != a.cols() || b.size() != a.rows() || c.size() != a.rows()) {
        throw std::invalid_argument("Lcp: dimensions disagree");
    }
    Lcp lcp;
    lcp.n = a.rows();
    lcp.matrix = std::make_shared<const SparseMatrix<double>>(std::move(a));
    lcp.apply = [m = lcp.matrix](std::span<const double> x, std::span<double> y) { m->multiply(x, y); };
    lcp.b = std::move(b);
    lcp.c = std::move(c);
    return lcp;
}

Lcp Lcp::from_operator(std::size_t n, LinearOperator apply, std::vector<double> b, std::vector<double> c) {
    if (b.size() != n || c.size() != n) throw std::invalid_argument("Lcp: dimensions disagree");
    Lcp lcp;
    lcp.n = n;
    lcp.apply = std::move(apply);
    lcp.b = std::move(b);
    lcp.c = std::move(c);
    return lcp;
}

PolicyMask::PolicyMask(std::vector<char> bits, std::size_t block_size)
    : bits_(std::move(bits)), block_size_(block_size) {
    for (char& b : bits_) b = b != 0 ? 1 : 0;
    if (block_size_ != 0 && bits_.size() % block_size_ != 0) {
        throw std::invalid_argument("PolicyMask: length is not a multiple of the block size");
    }
}

PolicyMask PolicyMask::filled(std::size_t n, bool value, std::size_t block_size) {
    return PolicyMask(std::vector<char>(n, value ? 1 : 0), block_size);
}

std::size_t PolicyMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::size_t PolicyMask::block_count() const noexcept {
    return block_size_ == 0 ? 1 : bits_.size() / block_size_;
}

std::span<const char> PolicyMask::block(std::size_t j) const {
    if (block_size_ == 0) {
        if (j != 0) throw std::out_of_range("PolicyMask::block: no block structure");
        return bits_;
    }
    if (j >= block_count()) throw std::out_of_range("PolicyMask::block: index out of range");
    return std::span<const char>(bits_).subspan(j * block_size_, block_size_);
}

std::vector<double> componentwise_min(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("componentwise_min: length mismatch");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::min(x[i], y[i]);
    return z;
}

namespace {

struct ResidualPair {
    std::vector<double> ax_minus_b;
    std::vector<double> x_minus_c;
};

ResidualPair residual_pair(const Lcp& lcp, std::span<const double> x) {
    if (x.size() != lcp.n) throw std::invalid_argument("Lcp: iterate length mismatch");
    ResidualPair p{std::vector<double>(lcp.n), std::vector<double>(lcp.n)};
    lcp.apply(x, p.ax_minus_b);
    for (std::size_t i = 0; i < lcp.n; ++i) {
        p.ax_minus_b[i] -= lcp.b[i];
        p.x_minus_c[i] = x[i] - lcp.c[i];
    }
    return p;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

LcpResidual lcp_residual(const Lcp& lcp, std::span<const double> x) {
    const auto p = residual_pair(lcp, x);
    LcpResidual res;
    res.r = componentwise_min(p.ax_minus_b, p.x_minus_c);
    res.inf_norm = inf_norm(res.r);
    return res;
}

PolicyMask policy_mask_from(std::span<const double> ax_minus_b, std::span<const double> x_minus_c,
                            std::size_t block_size) {
    if (ax_minus_b.size() != x_minus_c.size()) throw std::invalid_argument("policy mask: length mismatch");
    std::vector<char> bits(ax_minus_b.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = ax_minus_b[i] <= x_minus_c[i] ? 1 : 0;
    return PolicyMask(std::move(bits), block_size);
}

PolicyMask compute_policy_mask(const Lcp& lcp, std::span<const double> x) {
    const auto p = residual_pair(lcp, x);
    return policy_mask_from(p.ax_minus_b, p.x_minus_c);
}

SparseMatrix<double> policy_matrix(const SparseMatrix<double>& a, const PolicyMask& mask) {
    if (mask.size() != a.rows()) throw std::invalid_argument("policy_matrix: mask length mismatch");
    SparseBuilder<double> builder(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        if (!mask[r]) {
            builder.add(r, r, 1.0);
            continue;
        }
        for (std::size_t k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) {
            builder.add(r, a.columns()[k], a.values()[k]);
        }
    }
    return builder.build();
}

PolicySystem build_policy_system(const Lcp& lcp, const PolicyMask& mask) {
    if (mask.size() != lcp.n) throw std::invalid_argument("build_policy_system: mask length mismatch");
    PolicySystem sys;
    sys.rhs.resize(lcp.n);
    for (std::size_t i = 0; i < lcp.n; ++i) sys.rhs[i] = mask[i] ? lcp.b[i] : lcp.c[i];
    sys.apply = [apply = lcp.apply, mask](std::span<const double> x, std::span<double> y) {
        apply(x, y);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!mask[i]) y[i] = x[i];
        }
    };
    if (lcp.matrix) sys.matrix = policy_matrix(*lcp.matrix, mask);
    return sys;
}

PolicyResult solve_lcp_policy(const Lcp& lcp, const PolicyLinearSolver& solver, std::span<const double> x0,
                              const PolicyOptions& options) {
    if (x0.size() != lcp.n) throw std::invalid_argument("solve_lcp_policy: x0 length mismatch");
    PolicyResult result;
    result.x.assign(x0.begin(), x0.end());
    std::optional<PolicyMask> previous;
    auto pair = residual_pair(lcp, result.x);

    for (std::size_t k = 0; k < options.max_iter; ++k) {
        PolicyMask mask = policy_mask_from(pair.ax_minus_b, pair.x_minus_c);
        if (previous && mask == *previous) {
            result.stats.stop = PolicyStop::MaskRepeat;
            return result;
        }
        std::vector<double> rhs(lcp.n);
        for (std::size_t i = 0; i < lcp.n; ++i) rhs[i] = mask[i] ? lcp.b[i] : lcp.c[i];
        result.x = solver(lcp, mask, rhs, result.x);
        ++result.stats.iterations;

        pair = residual_pair(lcp, result.x);
        const double norm = inf_norm(componentwise_min(pair.ax_minus_b, pair.x_minus_c));
        result.stats.residual_history.push_back(norm);
        if (norm <= options.tol) {
            result.stats.stop = PolicyStop::Residual;
            return result;
        }
        previous = std::move(mask);
    }
    result.stats.stop = PolicyStop::MaxIterations;
    return result;
}

PolicyLinearSolver direct_policy_solver() {
    return [](const Lcp& lcp, const PolicyMask& mask, std::span<const double> rhs, std::span<const double>) {
        if (!lcp.matrix) throw std::invalid_argument("direct_policy_solver: LCP has no explicit matrix");
        const SparseLu<double> lu(policy_matrix(*lcp.matrix, mask));
        return lu.solve(rhs);
    };
}

std::vector<double> brute_force_lcp(const Lcp& lcp) {
    if (!lcp.matrix) throw std::invalid_argument("brute_force_lcp: needs an explicit matrix");
    const std::size_t n = lcp.n;
    if (n > 20) throw std::invalid_argument("brute_force_lcp: n must not exceed 20");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = lcp.matrix->at(r, c);
    }
    const Eigen::Map<const Eigen::VectorXd> b(lcp.b.data(), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> c(lcp.c.data(), static_cast<Eigen::Index>(n));
    const double scale = 1.0 + std::max(b.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()) +
                         a.cwiseAbs().maxCoeff();
    const double eps = 1e-10 * scale;

    for (std::uint64_t set = 0; set < (std::uint64_t{1} << n); ++set) {
        // bit set -> row i satisfies (A x)_i = b_i, otherwise x_i = c_i
        Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(a.rows(), a.cols());
        Eigen::VectorXd rhs = c;
        for (std::size_t i = 0; i < n; ++i) {
            if ((set >> i) & 1U) {
                const auto ii = static_cast<Eigen::Index>(i);
                sys.row(ii) = a.row(ii);
                rhs(ii) = b(ii);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd x = lu.solve(rhs);
        const Eigen::VectorXd w = a * x - b;
        const Eigen::VectorXd d = x - c;
        if (w.minCoeff() >= -eps && d.minCoeff() >= -eps && w.cwiseMin(d).cwiseAbs().maxCoeff() <= eps) {
            return std::vector<double>(x.data(), x.data() + x.size());
        }
    }
    throw NoLcpSolutionError("brute_force_lcp: no active set satisfies the LCP (A is not a P-matrix?)");
}

}  // namespace pintlcp
