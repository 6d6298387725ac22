#include "pintlcp/pint_preconditioner.hpp"

#include "pintlcp/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <variant>

namespace pintlcp {

std::string to_string(PsiStrategy strategy) {
    switch (strategy) {
        case PsiStrategy::Average: return "average";
        case PsiStrategy::Rounded: return "rounded";
        case PsiStrategy::Mode: return "mode";
    }
    return "unknown";
}

PsiStrategy psi_strategy_from_string(const std::string& name) {
    if (name == "average") return PsiStrategy::Average;
    if (name == "rounded") return PsiStrategy::Rounded;
    if (name == "mode") return PsiStrategy::Mode;
    throw std::invalid_argument("unknown psi strategy '" + name + "' (expected average, rounded or mode)");
}

PsiDiagonal compute_psi(const PolicyMask& mask, std::size_t nt, std::size_t ns, PsiStrategy strategy) {
    if (nt == 0 || ns == 0 || mask.size() != nt * ns) {
        throw std::invalid_argument("compute_psi: mask size is not nt * ns");
    }
    std::vector<std::size_t> ones(ns, 0);
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t i = 0; i < ns; ++i) ones[i] += mask[j * ns + i] ? 1 : 0;
    }
    PsiDiagonal psi;
    psi.strategy = strategy;
    psi.values.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        switch (strategy) {
            case PsiStrategy::Average:
                psi.values[i] = static_cast<double>(ones[i]) / static_cast<double>(nt);
                break;
            case PsiStrategy::Rounded:
                psi.values[i] = static_cast<double>(ones[i]) / static_cast<double>(nt) >= 0.5 ? 1.0 : 0.0;
                break;
            case PsiStrategy::Mode:
                // majority of bits over time; integer comparison avoids rounding
                psi.values[i] = 2 * ones[i] >= nt ? 1.0 : 0.0;
                break;
        }
    }
    return psi;
}

// ---------------------------------------------------------------------------

namespace {

bool is_tridiagonal(const SparseMatrix<double>& a) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) {
            const std::size_t c = a.columns()[k];
            if ((c > r ? c - r : r - c) > 1) return false;
        }
    }
    return true;
}

std::string psi_summary(std::span<const double> psi) {
    std::ostringstream out;
    if (psi.empty()) {
        out << "psi = 1";
        return out.str();
    }
    const auto [lo, hi] = std::minmax_element(psi.begin(), psi.end());
    double sum = 0.0;
    std::size_t fractional = 0;
    for (double p : psi) {
        sum += p;
        if (p != 0.0 && p != 1.0) ++fractional;
    }
    out << "psi min " << *lo << ", max " << *hi << ", mean " << sum / static_cast<double>(psi.size()) << ", "
        << fractional << " fractional entries";
    return out.str();
}

}  // namespace

FrequencySolvers::FrequencySolvers(const SparseMatrix<double>& l, std::span<const double> psi,
                                   const AlphaCirculant& circulant, const PreconditionerOptions& options)
    : nt_(circulant.nt()), ns_(l.rows()), thomas_(is_tridiagonal(l)), options_(options),
      plan_(conjugate_pair_plan(circulant.nt())) {
    if (l.rows() != l.cols()) throw std::invalid_argument("FrequencySolvers: operator must be square");
    if (!psi.empty() && psi.size() != ns_) throw std::invalid_argument("FrequencySolvers: psi length mismatch");
    if (options_.conjugate_pairs) {
        solved_ = plan_.solve;
    } else {
        solved_.resize(nt_);
        for (std::size_t k = 0; k < nt_; ++k) solved_[k] = k;
    }
    const auto psi_at = [&](std::size_t i) { return psi.empty() ? 1.0 : psi[i]; };
    const auto& lambda = circulant.eigenvalues();

    std::vector<std::optional<Factor>> built(solved_.size());
    parallel_for(solved_.size(), options_.workers, [&](std::size_t slot) {
        const std::size_t k = solved_[slot];
        const Complex lam = lambda[k];
        try {
            if (thomas_) {
                std::vector<Complex> lower(ns_, 0.0), diag(ns_, 0.0), upper(ns_, 0.0);
                for (std::size_t r = 0; r < ns_; ++r) {
                    const double p = psi_at(r);
                    diag[r] = lam * p + (1.0 - p);
                    for (std::size_t e = l.offsets()[r]; e < l.offsets()[r + 1]; ++e) {
                        const std::size_t c = l.columns()[e];
                        const Complex v = -p * l.values()[e];
                        if (c + 1 == r) lower[r] += v;
                        else if (c == r) diag[r] += v;
                        else upper[r] += v;
                    }
                }
                built[slot] = Factor(ThomasFactorization(lower, diag, upper));
            } else {
                SparseBuilder<Complex> builder(ns_, ns_);
                for (std::size_t r = 0; r < ns_; ++r) {
                    const double p = psi_at(r);
                    builder.add(r, r, lam * p + (1.0 - p));
                    if (p == 0.0) continue;
                    for (std::size_t e = l.offsets()[r]; e < l.offsets()[r + 1]; ++e) {
                        builder.add(r, l.columns()[e], -p * l.values()[e]);
                    }
                }
                built[slot] = Factor(std::make_shared<const SparseLu<Complex>>(builder.build()));
            }
        } catch (const SingularMatrixError& e) {
            std::ostringstream msg;
            msg << "singular frequency matrix at n = " << k << ", lambda_n = " << lam.real()
                << (lam.imag() < 0 ? " - " : " + ") << std::abs(lam.imag()) << "i (" << psi_summary(psi)
                << "): " << e.what();
            throw SingularMatrixError(msg.str());
        }
    });
    factors_.reserve(built.size());
    for (auto& f : built) factors_.push_back(std::move(*f));
}

void FrequencySolvers::solve(std::span<Complex> z) const {
    if (z.size() != nt_ * ns_) throw std::invalid_argument("FrequencySolvers::solve: length mismatch");
    parallel_for(solved_.size(), options_.workers, [&](std::size_t slot) {
        auto block = z.subspan(solved_[slot] * ns_, ns_);
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ThomasFactorization>) {
                    f.solve(block);
                } else {
                    const auto x = f->solve(block);
                    std::copy(x.begin(), x.end(), block.begin());
                }
            },
            factors_[slot]);
    });
    if (!options_.conjugate_pairs) return;
    // Input came from a real vector, so frequency nt - k is the conjugate of k.
    for (const auto& [target, source] : plan_.mirror) {
        for (std::size_t i = 0; i < ns_; ++i) z[target * ns_ + i] = std::conj(z[source * ns_ + i]);
    }
}

// ---------------------------------------------------------------------------

NkpaPreconditioner::NkpaPreconditioner(const AllAtOnceSystem& system, const AlphaCirculant& circulant,
                                       PsiDiagonal psi, std::shared_ptr<const TimeFft> fft,
                                       const PreconditionerOptions& options)
    : circulant_(circulant), psi_(std::move(psi)), fft_(std::move(fft)),
      solvers_(system.spatial().operator_matrix, psi_.values, circulant, options) {
    if (psi_.values.size() != system.ns()) throw std::invalid_argument("NkpaPreconditioner: psi length mismatch");
    if (circulant.nt() != system.nt()) throw std::invalid_argument("NkpaPreconditioner: nt mismatch");
    if (!fft_) fft_ = std::make_shared<const TimeFft>(system.nt(), system.ns());
}

void NkpaPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    auto w = circulant_.step_a(r, *fft_);
    solvers_.solve(w);
    const auto out = circulant_.step_c(w, *fft_);
    if (z.size() != out.size()) throw std::invalid_argument("NkpaPreconditioner::apply: length mismatch");
    std::copy(out.begin(), out.end(), z.begin());
}

NkpaPreconditioner build_nkpa(const AllAtOnceSystem& system, const AlphaCirculant& circulant, PsiDiagonal psi,
                              const PreconditionerOptions& options) {
    return NkpaPreconditioner(system, circulant, std::move(psi), nullptr, options);
}

std::vector<double> apply_nkpa(const NkpaPreconditioner& precond, std::span<const double> r) {
    std::vector<double> z(r.size());
    precond.apply(r, z);
    return z;
}

// ---------------------------------------------------------------------------

std::vector<double> ReducedSystem::gather(std::span<const double> full) const {
    if (full.size() != full_size) throw std::invalid_argument("ReducedSystem::gather: length mismatch");
    std::vector<double> out(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) out[k] = full[active[k]];
    return out;
}

std::vector<double> ReducedSystem::scatter(std::span<const double> reduced) const {
    if (reduced.size() != active.size()) throw std::invalid_argument("ReducedSystem::scatter: length mismatch");
    std::vector<double> out = fixed;
    for (std::size_t k = 0; k < active.size(); ++k) out[active[k]] = reduced[k];
    return out;
}

ReducedSystem reduce_policy_system(const AllAtOnceSystem& system, const PolicyMask& mask) {
    const std::size_t n = system.size();
    if (mask.size() != n) throw std::invalid_argument("reduce_policy_system: mask length mismatch");
    ReducedSystem red;
    red.full_size = n;
    red.fixed.assign(n, 0.0);
    const auto& phi = system.obstacle();
    for (std::size_t k = 0; k < n; ++k) {
        if (mask[k]) red.active.push_back(k);
        else red.fixed[k] = phi[k];
    }
    if (red.active.empty()) return red;

    std::vector<double> m_fixed(n);
    system.apply_m(red.fixed, m_fixed);
    const auto& f = system.rhs();
    red.rhs.resize(red.active.size());
    for (std::size_t k = 0; k < red.active.size(); ++k) red.rhs[k] = f[red.active[k]] - m_fixed[red.active[k]];

    auto active = std::make_shared<const std::vector<std::size_t>>(red.active);
    red.apply = [&system, active, n](std::span<const double> y, std::span<double> out) {
        std::vector<double> full(n, 0.0), mf(n);
        for (std::size_t k = 0; k < active->size(); ++k) full[(*active)[k]] = y[k];
        system.apply_m(full, mf);
        for (std::size_t k = 0; k < active->size(); ++k) out[k] = mf[(*active)[k]];
    };
    return red;
}

ProjectedPreconditioner::ProjectedPreconditioner(const AllAtOnceSystem& system, const AlphaCirculant& circulant,
                                                 std::shared_ptr<const TimeFft> fft,
                                                 const PreconditionerOptions& options)
    : full_size_(system.size()), circulant_(circulant), fft_(std::move(fft)),
      solvers_(system.spatial().operator_matrix, {}, circulant, options) {
    if (circulant.nt() != system.nt()) throw std::invalid_argument("ProjectedPreconditioner: nt mismatch");
    if (!fft_) fft_ = std::make_shared<const TimeFft>(system.nt(), system.ns());
}

void ProjectedPreconditioner::apply_full(std::span<const double> r, std::span<double> z) const {
    if (r.size() != full_size_ || z.size() != full_size_) {
        throw std::invalid_argument("ProjectedPreconditioner::apply_full: length mismatch");
    }
    auto w = circulant_.step_a(r, *fft_);
    solvers_.solve(w);
    const auto out = circulant_.step_c(w, *fft_);
    std::copy(out.begin(), out.end(), z.begin());
}

void ProjectedPreconditioner::apply(std::span<const std::size_t> active, std::span<const double> r,
                                    std::span<double> z) const {
    if (r.size() != active.size() || z.size() != active.size()) {
        throw std::invalid_argument("ProjectedPreconditioner::apply: length mismatch");
    }
    std::vector<double> full(full_size_, 0.0), out(full_size_);
    for (std::size_t k = 0; k < active.size(); ++k) full[active[k]] = r[k];
    apply_full(full, out);
    for (std::size_t k = 0; k < active.size(); ++k) z[k] = out[active[k]];
}

std::vector<double> apply_projected(const ProjectedPreconditioner& precond, std::span<const std::size_t> active,
                                    std::span<const double> r_reduced) {
    std::vector<double> z(r_reduced.size());
    precond.apply(active, r_reduced, z);
    return z;
}

// ---------------------------------------------------------------------------

std::string to_string(PreconditionerKind kind) {
    switch (kind) {
        case PreconditionerKind::Auto: return "auto";
        case PreconditionerKind::Nkpa: return "nkpa";
        case PreconditionerKind::Projected: return "projected";
        case PreconditionerKind::None: return "none";
        case PreconditionerKind::Direct: return "direct";
    }
    return "unknown";
}

PreconditionerKind preconditioner_kind_from_string(const std::string& name) {
    if (name == "auto") return PreconditionerKind::Auto;
    if (name == "nkpa") return PreconditionerKind::Nkpa;
    if (name == "projected") return PreconditionerKind::Projected;
    if (name == "none") return PreconditionerKind::None;
    if (name == "direct") return PreconditionerKind::Direct;
    throw std::invalid_argument("unknown preconditioner '" + name +
                                "' (expected auto, nkpa, projected, none or direct)");
}

PreconditionerKind resolve_preconditioner(PreconditionerKind kind, const AllAtOnceSystem& system) {
    if (kind != PreconditionerKind::Auto) return kind;
    return system.spatial().grid.v ? PreconditionerKind::Projected : PreconditionerKind::Nkpa;
}

std::size_t InnerSolverStats::gmres_total() const noexcept {
    std::size_t total = 0;
    for (auto it : gmres_iterations) total += it;
    return total;
}

namespace {

SparseMatrix<double> absolute(const SparseMatrix<double>& m) {
    std::vector<double> values(m.values());
    for (auto& v : values) v = std::abs(v);
    return SparseMatrix<double>(m.rows(), m.cols(), m.offsets(), m.columns(), std::move(values));
}

/// || |A| |x| + |b| ||_2 restricted to `rows`, where row i of A is row i of M
/// when the mask bit is set and of the identity otherwise.
double componentwise_scale(const SparseMatrix<double>& abs_m, const PolicyMask& mask, std::span<const double> x,
                           std::span<const std::size_t> rows, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t i = rows[r];
        double acc = std::abs(b[r]);
        if (mask[i]) {
            for (std::size_t k = abs_m.offsets()[i]; k < abs_m.offsets()[i + 1]; ++k)
                acc += abs_m.values()[k] * std::abs(x[abs_m.columns()[k]]);
        } else {
            acc += std::abs(x[i]);
        }
        sum += acc * acc;
    }
    return std::sqrt(sum);
}

GmresOutcome run_gmres(const LinearOperator& a, const LinearOperator& p, std::span<const double> b,
                       std::span<const double> x0, const InnerSolverOptions& options, InnerSolverStats& stats,
                       const std::string& label, double floor_scale) {
    GmresOptions go;
    go.tol = options.tol2;
    go.max_iter = options.max_gmres;
    go.reference = options.reference;
    go.floor_scale = floor_scale;
    go.floor_factor = options.floor_factor;
    auto out = gmres(a, p, b, x0, go);
    stats.gmres_iterations.push_back(out.iterations);
    stats.residual_histories.push_back(out.residual_history);
    if (out.floor_limited) ++stats.floor_limited;
    if (!out.converged) {
        std::ostringstream msg;
        msg << label << " GMRES did not reach tol2 = " << options.tol2 << " in policy iteration "
            << stats.gmres_iterations.size() << " after " << out.iterations << " iterations (relative residual "
            << (out.residual_history.empty() ? 0.0 : out.residual_history.back())
            << (out.breakdown ? ", breakdown" : "") << ")";
        throw InnerSolveError(msg.str());
    }
    return out;
}

}  // namespace

PolicyLinearSolver make_inner_solver(const AllAtOnceSystem& system, const InnerSolverOptions& options,
                                     std::shared_ptr<InnerSolverStats> stats) {
    if (!stats) stats = std::make_shared<InnerSolverStats>();
    const PreconditionerKind kind = resolve_preconditioner(options.kind, system);

    if (kind == PreconditionerKind::Direct) {
        auto m = std::make_shared<const SparseMatrix<double>>(system.explicit_matrix());
        return [m, stats](const Lcp&, const PolicyMask& mask, std::span<const double> rhs, std::span<const double>) {
            const SparseLu<double> lu(policy_matrix(*m, mask));
            ++stats->factorizations;
            return lu.solve(rhs);
        };
    }

    auto abs_m = std::make_shared<const SparseMatrix<double>>(absolute(system.explicit_matrix()));
    auto all_rows = std::make_shared<std::vector<std::size_t>>(system.size());
    std::iota(all_rows->begin(), all_rows->end(), std::size_t{0});

    if (kind == PreconditionerKind::None) {
        return [&system, options, stats, abs_m, all_rows](const Lcp&, const PolicyMask& mask,
                                                          std::span<const double> rhs, std::span<const double> x0) {
            const LinearOperator a = [&](std::span<const double> x, std::span<double> y) {
                system.apply_mk(mask, x, y);
            };
            const double scale = componentwise_scale(*abs_m, mask, x0, *all_rows, rhs);
            return run_gmres(a, {}, rhs, x0, options, *stats, "unpreconditioned", scale).solution;
        };
    }

    auto circulant = std::make_shared<const AlphaCirculant>(options.alpha, system.nt(), system.tau());
    auto fft = std::make_shared<const TimeFft>(system.nt(), system.ns());

    if (kind == PreconditionerKind::Nkpa) {
        return [&system, options, stats, circulant, fft, abs_m, all_rows](
                   const Lcp&, const PolicyMask& mask, std::span<const double> rhs, std::span<const double> x0) {
            const NkpaPreconditioner precond(system, *circulant,
                                             compute_psi(mask, system.nt(), system.ns(), options.psi), fft,
                                             options.parallel);
            stats->factorizations += precond.factorizations();
            const LinearOperator a = [&](std::span<const double> x, std::span<double> y) {
                system.apply_mk(mask, x, y);
            };
            const LinearOperator p = [&](std::span<const double> x, std::span<double> y) { precond.apply(x, y); };
            const double scale = componentwise_scale(*abs_m, mask, x0, *all_rows, rhs);
            return run_gmres(a, p, rhs, x0, options, *stats, "NKPA-preconditioned", scale).solution;
        };
    }

    auto precond = std::make_shared<const ProjectedPreconditioner>(system, *circulant, fft, options.parallel);
    stats->factorizations += precond->factorizations();
    stats->warmup_factorizations = precond->factorizations();
    return [&system, options, stats, circulant, precond, abs_m](const Lcp&, const PolicyMask& mask,
                                                                std::span<const double>, std::span<const double> x0) {
        const ReducedSystem red = reduce_policy_system(system, mask);
        if (red.active.empty()) return red.fixed;
        const auto x0r = red.gather(x0);
        const std::span<const std::size_t> active(red.active);
        const LinearOperator p = [&](std::span<const double> x, std::span<double> y) {
            precond->apply(active, x, y);
        };
        const double scale = componentwise_scale(*abs_m, mask, red.scatter(x0r), active, red.rhs);
        return red.scatter(
            run_gmres(red.apply, p, red.rhs, x0r, options, *stats, "projected-preconditioned", scale).solution);
    };
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Complex> dense_eigenvalues(const Eigen::MatrixXd& a) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigenvalue computation failed");
    std::vector<Complex> out(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index k = 0; k < a.rows(); ++k) out[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

}  // namespace

SpectrumReport operator_spectrum(const LinearOperator& apply_a, const LinearOperator& apply_precond, std::size_t n,
                                 std::size_t max_dim) {
    if (n > max_dim) {
        throw std::invalid_argument("spectrum: dimension " + std::to_string(n) + " exceeds max_dim " +
                                    std::to_string(max_dim));
    }
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(dim, dim), pa(dim, dim);
    std::vector<double> e(n, 0.0), col(n), pcol(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        apply_a(e, col);
        e[j] = 0.0;
        if (apply_precond) apply_precond(col, pcol);
        else pcol = col;
        for (std::size_t i = 0; i < n; ++i) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
            pa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pcol[i];
        }
    }
    SpectrumReport report;
    if (n == 0) return report;
    report.system = dense_eigenvalues(a);
    report.preconditioned = dense_eigenvalues(pa);
    return report;
}

SpectrumReport spectrum_diagnostics(const AllAtOnceSystem& system, const PolicyMask& mask,
                                    const InnerSolverOptions& options, std::size_t max_dim) {
    if (system.size() > max_dim) {
        throw std::invalid_argument("spectrum: dimension " + std::to_string(system.size()) + " exceeds max_dim " +
                                    std::to_string(max_dim));
    }
    const AlphaCirculant circulant(options.alpha, system.nt(), system.tau());
    auto fft = std::make_shared<const TimeFft>(system.nt(), system.ns());
    switch (resolve_preconditioner(options.kind, system)) {
        case PreconditionerKind::Projected: {
            const ProjectedPreconditioner precond(system, circulant, fft, options.parallel);
            const ReducedSystem red = reduce_policy_system(system, mask);
            if (red.active.empty()) return {};
            const std::span<const std::size_t> active(red.active);
            return operator_spectrum(
                red.apply, [&](std::span<const double> x, std::span<double> y) { precond.apply(active, x, y); },
                red.active.size(), max_dim);
        }
        case PreconditionerKind::Nkpa: {
            const NkpaPreconditioner precond(system, circulant, compute_psi(mask, system.nt(), system.ns(), options.psi),
                                             fft, options.parallel);
            return operator_spectrum(
                [&](std::span<const double> x, std::span<double> y) { system.apply_mk(mask, x, y); },
                [&](std::span<const double> x, std::span<double> y) { precond.apply(x, y); }, system.size(),
                max_dim);
        }
        default:
            return operator_spectrum(
                [&](std::span<const double> x, std::span<double> y) { system.apply_mk(mask, x, y); }, {},
                system.size(), max_dim);
    }
}

void write_complex_pairs(std::ostream& out, std::span<const Complex> values) {
    const auto old = out.precision(17);
    for (const auto& z : values) out << z.real() << ' ' << z.imag() << '\n';
    out.precision(old);
}

}  // namespace pintlcp
