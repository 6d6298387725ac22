#include "pintlcp/all_at_once.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace pintlcp {

AllAtOnceSystem::AllAtOnceSystem(SpatialSystem spatial, std::size_t nt)
    : spatial_(std::move(spatial)), nt_(nt) {
    if (nt_ == 0) throw std::invalid_argument("AllAtOnceSystem: nt must be positive");
    tau_ = spatial_.params.maturity / static_cast<double>(nt_);
    const std::size_t n = spatial_.size();
    f_.resize(nt_ * n);
    obstacle_.resize(nt_ * n);
    const std::vector<double> g_static = spatial_.boundary(0.0);
    for (std::size_t step = 0; step < nt_; ++step) {
        const double t = static_cast<double>(step + 1) * tau_;
        const std::vector<double> g = spatial_.time_dependent_boundary ? spatial_.boundary(t) : g_static;
        for (std::size_t i = 0; i < n; ++i) {
            f_[step * n + i] = g[i] + (step == 0 ? spatial_.payoff[i] / tau_ : 0.0);
            obstacle_[step * n + i] = spatial_.payoff[i];
        }
    }
}

void AllAtOnceSystem::apply_m(std::span<const double> v, std::span<double> out) const {
    if (v.size() != size() || out.size() != size()) throw std::invalid_argument("apply_M: length mismatch");
    const std::size_t n = ns();
    const double inv_tau = 1.0 / tau_;
    for (std::size_t step = 0; step < nt_; ++step) {
        const auto vn = v.subspan(step * n, n);
        auto on = out.subspan(step * n, n);
        spatial_.operator_matrix.multiply(vn, on);
        for (std::size_t i = 0; i < n; ++i) {
            const double prev = step == 0 ? 0.0 : v[(step - 1) * n + i];
            on[i] = (vn[i] - prev) * inv_tau - on[i];
        }
    }
}

void AllAtOnceSystem::apply_mk(const PolicyMask& mask, std::span<const double> v, std::span<double> out) const {
    if (mask.size() != size()) throw std::invalid_argument("apply_Mk: mask length mismatch");
    apply_m(v, out);
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!mask[k]) out[k] = v[k];
    }
}

std::vector<double> apply_M(const AllAtOnceSystem& system, std::span<const double> v) {
    std::vector<double> out(system.size());
    system.apply_m(v, out);
    return out;
}

std::vector<double> apply_Mk(const AllAtOnceSystem& system, const PolicyMask& mask, std::span<const double> v) {
    std::vector<double> out(system.size());
    system.apply_mk(mask, v, out);
    return out;
}

Lcp AllAtOnceSystem::as_lcp() const {
    return Lcp::from_operator(
        size(), [this](std::span<const double> x, std::span<double> y) { apply_m(x, y); }, f_, obstacle_);
}

SparseMatrix<double> AllAtOnceSystem::explicit_matrix() const {
    const std::size_t n = ns();
    const auto& l = spatial_.operator_matrix;
    SparseBuilder<double> builder(size(), size());
    const double inv_tau = 1.0 / tau_;
    for (std::size_t step = 0; step < nt_; ++step) {
        const std::size_t base = step * n;
        for (std::size_t r = 0; r < n; ++r) {
            builder.add(base + r, base + r, inv_tau);
            if (step > 0) builder.add(base + r, base - n + r, -inv_tau);
            for (std::size_t k = l.offsets()[r]; k < l.offsets()[r + 1]; ++k) {
                builder.add(base + r, base + l.columns()[k], -l.values()[k]);
            }
        }
    }
    return builder.build();
}

AllAtOnceResult policy_iterate_all_at_once(const AllAtOnceSystem& system, const PolicyLinearSolver& inner,
                                           const AllAtOnceOptions& options) {
    const Lcp lcp = system.as_lcp();
    AllAtOnceResult result;
    PolicyLinearSolver solver = inner;
    if (options.record_masks) {
        solver = [&](const Lcp& problem, const PolicyMask& mask, std::span<const double> rhs,
                     std::span<const double> x0) {
            result.masks.emplace_back(mask.bits(), system.ns());
            return inner(problem, mask, rhs, x0);
        };
    }
    PolicyOptions policy;
    policy.tol = options.tol1;
    policy.max_iter = options.max_outer;
    auto solved = solve_lcp_policy(lcp, solver, system.obstacle(), policy);
    result.v = std::move(solved.x);
    result.stats = std::move(solved.stats);
    return result;
}

TmatView tmat_view(const PolicyMask& mask, std::size_t nt, std::size_t ns) {
    if (mask.size() != nt * ns) throw std::invalid_argument("tmat_view: mask size is not nt * ns");
    TmatView view;
    view.ns = ns;
    view.nt = nt;
    view.entries = mask.bits();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nt));
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t i = 0; i < ns; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = view.at(i, j) ? 1.0 : 0.0;
        }
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() > 0 && sv(0) > 0.0) {
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
            if (sv(k) > 1e-10 * sv(0)) ++view.rank;
        }
    }
    return view;
}

}  // namespace pintlcp
