#include "pintlcp/market_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace pintlcp {

Axis Axis::make(double max, std::size_t n, BoundaryKind low, BoundaryKind high) {
    if (!(max > 0.0)) throw std::invalid_argument("Axis: truncation bound must be positive");
    if (n < 2) throw std::invalid_argument("Axis: need at least two unknowns per axis");
    if (high == BoundaryKind::Included) throw std::invalid_argument("Axis: high edge must be eliminated");
    Axis a;
    a.max = max;
    a.n = n;
    a.low = low;
    a.high = high;
    a.h = max / static_cast<double>(n + a.first());
    return a;
}

ModelKind ModelParams::kind() const noexcept {
    switch (model.index()) {
        case 0: return ModelKind::BlackScholes1D;
        case 1: return ModelKind::Spread2D;
        default: return ModelKind::Heston2D;
    }
}

void ModelParams::validate() const {
    if (!(strike > 0.0)) throw std::invalid_argument("strike must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
    if (!(rate >= 0.0)) throw std::invalid_argument("rate must be nonnegative");
    auto check_rho = [](double rho) {
        if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("correlation must lie in [-1, 1]");
    };
    if (const auto* bs = std::get_if<BlackScholesParams>(&model)) {
        if (!(bs->sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    } else if (const auto* sp = std::get_if<SpreadParams>(&model)) {
        if (!(sp->sigma1 > 0.0) || !(sp->sigma2 >= 0.0)) throw std::invalid_argument("spread volatilities must be positive");
        check_rho(sp->rho);
    } else if (const auto* he = std::get_if<HestonParams>(&model)) {
        if (!(he->sigma > 0.0)) throw std::invalid_argument("Heston vol-of-vol must be positive");
        if (!(he->kappa > 0.0) || !(he->eta > 0.0)) throw std::invalid_argument("Heston kappa and eta must be positive");
        check_rho(he->rho);
    }
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BlackScholes1D: return "bs1d";
        case ModelKind::Spread2D: return "spread2d";
        case ModelKind::Heston2D: return "heston2d";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "bs1d" || name == "ex1" || name == "1") return ModelKind::BlackScholes1D;
    if (name == "spread2d" || name == "ex2" || name == "2") return ModelKind::Spread2D;
    if (name == "heston2d" || name == "ex3" || name == "3") return ModelKind::Heston2D;
    throw std::invalid_argument("unknown model '" + name + "'");
}

std::vector<double> SpatialSystem::boundary(double t) const {
    std::vector<double> g(size(), 0.0);
    for (const auto& term : boundary_terms) g[term.row] += term.coef * dirichlet(term.s, term.v, t);
    return g;
}

// ---------------------------------------------------------------------------
// Grids and payoff
// ---------------------------------------------------------------------------

Grid black_scholes_grid(double s_max, std::size_t ns) {
    return Grid{Axis::make(s_max, ns, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet), std::nullopt};
}

Grid spread_grid(double s_max, double v_max, std::size_t ns, std::size_t nv) {
    return Grid{Axis::make(s_max, ns, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet),
                Axis::make(v_max, nv, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet)};
}

Grid heston_grid(double s_max, double v_max, std::size_t ns, std::size_t nv) {
    return Grid{Axis::make(s_max, ns, BoundaryKind::Dirichlet, BoundaryKind::Neumann),
                Axis::make(v_max, nv, BoundaryKind::Included, BoundaryKind::Neumann)};
}

namespace {

double payoff_at(const ModelParams& params, double s, double v) {
    const double k = params.strike;
    switch (params.kind()) {
        case ModelKind::Spread2D: return std::max(k - (s - v), 0.0);
        default: return std::max(k - s, 0.0);
    }
}

void check_grid_matches(const ModelParams& params, const Grid& grid) {
    const bool two_d = params.kind() != ModelKind::BlackScholes1D;
    if (two_d != (grid.dims() == 2)) throw std::invalid_argument("grid dimension does not match the model");
}

}  // namespace

std::vector<double> build_payoff(const ModelParams& params, const Grid& grid) {
    check_grid_matches(params, grid);
    std::vector<double> phi(grid.size());
    for (std::size_t j = 0; j < grid.nv(); ++j) {
        const double v = grid.v ? grid.v->node(j) : 0.0;
        for (std::size_t i = 0; i < grid.ns(); ++i) {
            phi[grid.index(i, j)] = payoff_at(params, grid.s.node(i), v);
        }
    }
    return phi;
}

// ---------------------------------------------------------------------------
// Stencil assembly
// ---------------------------------------------------------------------------

namespace {

/// One term of the expansion of an extended-index node along an axis.
struct AxisTerm {
    bool dirichlet = false;
    std::size_t unknown = 0;
    double weight = 1.0;
};

std::vector<AxisTerm> resolve_axis(const Axis& axis, long ext) {
    if (ext < 0 || ext > static_cast<long>(axis.last_ext())) {
        throw std::logic_error("stencil reaches outside the grid");
    }
    const auto e = static_cast<std::size_t>(ext);
    const std::size_t n = axis.n;
    auto edge = [&](BoundaryKind kind, std::size_t near, std::size_t far) -> std::vector<AxisTerm> {
        if (kind == BoundaryKind::Dirichlet) return {AxisTerm{true, 0, 1.0}};
        // (3 u_edge - 4 u_near + u_far) = 0
        return {AxisTerm{false, near, 4.0 / 3.0}, AxisTerm{false, far, -1.0 / 3.0}};
    };
    if (axis.first() == 1 && e == 0) return edge(axis.low, 0, 1);
    if (e == axis.last_ext()) return edge(axis.high, n - 1, n - 2);
    return {AxisTerm{false, e - axis.first(), 1.0}};
}

/// Local PDE coefficients a_ss u_ss + a_vv u_vv + a_sv u_sv + b_s u_s + b_v u_v + c u.
struct Coefficients {
    double ass = 0.0;
    double avv = 0.0;
    double asv = 0.0;
    double bs = 0.0;
    double bv = 0.0;
    double c = 0.0;
};

class StencilAssembler {
public:
    StencilAssembler(const Grid& grid, CrossStencil cross)
        : grid_(grid), cross_(cross), builder_(grid.size(), grid.size()) {}

    void add_node(std::size_t i, std::size_t j, const Coefficients& k) {
        const std::size_t row = grid_.index(i, j);
        const long ie = static_cast<long>(i + grid_.s.first());
        const long je = grid_.v ? static_cast<long>(j + grid_.v->first()) : 0;

        double cross_axis = 0.0;  // amount the seven-point stencil removes from axis neighbours
        if (grid_.v && k.asv != 0.0) {
            const double hs = grid_.s.h;
            const double hv = grid_.v->h;
            if (cross_ == CrossStencil::SevenPoint) {
                const double kk = std::abs(k.asv) / (2.0 * hs * hv);
                const long dj = k.asv > 0.0 ? 1 : -1;
                emit(row, ie + 1, je + dj, kk);
                emit(row, ie - 1, je - dj, kk);
                emit(row, ie, je, 2.0 * kk);
                cross_axis = kk;
            } else {
                const double kk = k.asv / (4.0 * hs * hv);
                emit(row, ie + 1, je + 1, kk);
                emit(row, ie - 1, je - 1, kk);
                emit(row, ie + 1, je - 1, -kk);
                emit(row, ie - 1, je + 1, -kk);
            }
        }

        axis_terms(row, ie, je, k.ass, k.bs, grid_.s.h, cross_axis, /*along_s=*/true);
        if (grid_.v) axis_terms(row, ie, je, k.avv, k.bv, grid_.v->h, cross_axis, /*along_s=*/false);
        emit(row, ie, je, k.c);
    }

    SparseMatrix<double> matrix() const { return builder_.build(); }
    std::vector<BoundaryTerm> take_boundary_terms() { return std::move(boundary_); }

private:
    /// Diffusion a u_xx plus convection b u_x along one axis. Central
    /// differencing is used when the neighbour weights stay nonnegative after
    /// the cross-stencil reduction; otherwise first-order upwinding.
    void axis_terms(std::size_t row, long ie, long je, double a, double b, double h, double cross_axis,
                    bool along_s) {
        auto at = [&](long d, double coef) {
            if (along_s) {
                emit(row, ie + d, je, coef);
            } else {
                emit(row, ie, je + d, coef);
            }
        };
        const double diffusion = a / (h * h);
        if (diffusion != 0.0) {
            at(-1, diffusion);
            at(+1, diffusion);
            at(0, -2.0 * diffusion);
        }
        if (cross_axis != 0.0) {
            at(-1, -cross_axis);
            at(+1, -cross_axis);
        }
        if (b == 0.0) return;
        const double half = b / (2.0 * h);
        if (diffusion - cross_axis - std::abs(half) >= 0.0) {
            at(+1, half);
            at(-1, -half);
        } else if (b > 0.0) {
            at(+1, b / h);
            at(0, -b / h);
        } else {
            at(-1, -b / h);
            at(0, b / h);
        }
    }

    void emit(std::size_t row, long ie, long je, double coef) {
        if (coef == 0.0) return;
        const auto s_terms = resolve_axis(grid_.s, ie);
        const std::vector<AxisTerm> v_terms =
            grid_.v ? resolve_axis(*grid_.v, je) : std::vector<AxisTerm>{AxisTerm{false, 0, 1.0}};
        if (s_terms.front().dirichlet || v_terms.front().dirichlet) {
            const double s = static_cast<double>(ie) * grid_.s.h;
            const double v = grid_.v ? static_cast<double>(je) * grid_.v->h : 0.0;
            boundary_.push_back(BoundaryTerm{row, coef, s, v});
            return;
        }
        for (const auto& ts : s_terms) {
            for (const auto& tv : v_terms) {
                builder_.add(row, grid_.index(ts.unknown, tv.unknown), coef * ts.weight * tv.weight);
            }
        }
    }

    const Grid& grid_;
    CrossStencil cross_;
    SparseBuilder<double> builder_;
    std::vector<BoundaryTerm> boundary_;
};

}  // namespace

SpatialSystem assemble_blackscholes_1d(const ModelParams& params, const Grid& grid) {
    params.validate();
    const auto* bs = std::get_if<BlackScholesParams>(&params.model);
    if (!bs) throw std::invalid_argument("assemble_blackscholes_1d: wrong model variant");
    check_grid_matches(params, grid);
    if (!(grid.s.h > 0.0)) throw std::invalid_argument("assemble_blackscholes_1d: nonpositive spacing");

    const double r = params.rate;
    StencilAssembler assembler(grid, CrossStencil::SevenPoint);
    for (std::size_t i = 0; i < grid.ns(); ++i) {
        const double s = grid.s.node(i);
        Coefficients k;
        k.ass = 0.5 * bs->sigma * bs->sigma * s * s;
        k.bs = r * s;
        k.c = -r;
        assembler.add_node(i, 0, k);
    }

    SpatialSystem sys;
    sys.params = params;
    sys.grid = grid;
    sys.operator_matrix = assembler.matrix();
    sys.payoff = build_payoff(params, grid);
    sys.boundary_terms = assembler.take_boundary_terms();
    const double strike = params.strike;
    sys.dirichlet = [strike](double s, double, double) { return s == 0.0 ? strike : 0.0; };
    sys.time_dependent_boundary = false;
    return sys;
}

SpatialSystem assemble_spread_2d(const ModelParams& params, const Grid& grid) {
    params.validate();
    const auto* sp = std::get_if<SpreadParams>(&params.model);
    if (!sp) throw std::invalid_argument("assemble_spread_2d: wrong model variant");
    check_grid_matches(params, grid);

    const double r = params.rate;
    StencilAssembler assembler(grid, sp->cross);
    for (std::size_t j = 0; j < grid.nv(); ++j) {
        const double v = grid.v->node(j);
        for (std::size_t i = 0; i < grid.ns(); ++i) {
            const double s = grid.s.node(i);
            Coefficients k;
            k.ass = 0.5 * sp->sigma1 * sp->sigma1 * s * s;
            k.avv = 0.5 * sp->sigma2 * sp->sigma2 * v * v;
            k.asv = sp->rho * sp->sigma1 * sp->sigma2 * s * v;
            k.bs = r * s;
            k.bv = r * v;
            k.c = -r;
            assembler.add_node(i, j, k);
        }
    }

    SpatialSystem sys;
    sys.params = params;
    sys.grid = grid;
    sys.operator_matrix = assembler.matrix();
    sys.payoff = build_payoff(params, grid);
    sys.boundary_terms = assembler.take_boundary_terms();
    const double strike = params.strike;
    const bool homogeneous_s0 = sp->homogeneous_s0;
    sys.dirichlet = [strike, r, homogeneous_s0](double s, double v, double t) {
        if (homogeneous_s0 && s == 0.0) return 0.0;
        return std::max(strike * std::exp(-r * t) - (s - v), 0.0);
    };
    sys.time_dependent_boundary = r != 0.0;
    return sys;
}

SpatialSystem assemble_heston_2d(const ModelParams& params, const Grid& grid) {
    params.validate();
    const auto* he = std::get_if<HestonParams>(&params.model);
    if (!he) throw std::invalid_argument("assemble_heston_2d: wrong model variant");
    check_grid_matches(params, grid);

    const double r = params.rate;
    StencilAssembler assembler(grid, he->cross);
    for (std::size_t j = 0; j < grid.nv(); ++j) {
        const double v = grid.v->node(j);
        for (std::size_t i = 0; i < grid.ns(); ++i) {
            const double s = grid.s.node(i);
            Coefficients k;
            k.ass = 0.5 * v * s * s;
            k.avv = 0.5 * he->sigma * he->sigma * v;
            k.asv = he->rho * he->sigma * s * v;
            k.bs = r * s;
            k.bv = he->kappa * (he->eta - v);
            k.c = -r;
            assembler.add_node(i, j, k);
        }
    }

    SpatialSystem sys;
    sys.params = params;
    sys.grid = grid;
    sys.operator_matrix = assembler.matrix();
    sys.payoff = build_payoff(params, grid);
    sys.boundary_terms = assembler.take_boundary_terms();
    const double strike = params.strike;
    sys.dirichlet = [strike](double, double, double) { return strike; };
    sys.time_dependent_boundary = false;
    return sys;
}

SpatialSystem assemble(const ModelParams& params, const Grid& grid) {
    switch (params.kind()) {
        case ModelKind::BlackScholes1D: return assemble_blackscholes_1d(params, grid);
        case ModelKind::Spread2D: return assemble_spread_2d(params, grid);
        case ModelKind::Heston2D: return assemble_heston_2d(params, grid);
    }
    throw std::logic_error("unreachable");
}

ZMatrixReport check_z_matrix(const SparseMatrix<double>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("check_z_matrix: matrix must be square");
    ZMatrixReport report;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double scale = std::abs(a.at(r, r));
        for (std::size_t k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) {
            const std::size_t c = a.columns()[k];
            if (c == r) continue;
            const double neg = -a.values()[k];
            if (neg > 1e-12 * scale) report.violations.push_back(ZViolation{r, c, neg});
        }
    }
    report.passed = report.violations.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

namespace {

double node_value(const SpatialSystem& sys, std::span<const double> u, double t, long ie, long je) {
    const Grid& g = sys.grid;
    const auto s_terms = resolve_axis(g.s, ie);
    const std::vector<AxisTerm> v_terms =
        g.v ? resolve_axis(*g.v, je) : std::vector<AxisTerm>{AxisTerm{false, 0, 1.0}};
    if (s_terms.front().dirichlet || v_terms.front().dirichlet) {
        return sys.dirichlet(static_cast<double>(ie) * g.s.h, g.v ? static_cast<double>(je) * g.v->h : 0.0, t);
    }
    double value = 0.0;
    for (const auto& ts : s_terms) {
        for (const auto& tv : v_terms) value += ts.weight * tv.weight * u[g.index(ts.unknown, tv.unknown)];
    }
    return value;
}

/// Cell (lower extended index) and fractional offset containing x.
std::pair<long, double> locate(const Axis& axis, double x) {
    if (!(x >= 0.0 && x <= axis.max)) throw std::out_of_range("evaluation point outside the domain");
    const double pos = x / axis.h;
    long cell = static_cast<long>(std::floor(pos));
    cell = std::clamp<long>(cell, 0, static_cast<long>(axis.last_ext()) - 1);
    double frac = pos - static_cast<double>(cell);
    // Snap round-off so on-node points reproduce node values exactly.
    if (std::abs(frac) < 1e-12) frac = 0.0;
    if (std::abs(frac - 1.0) < 1e-12) frac = 1.0;
    return {cell, frac};
}

/// Window start (extended index) and Lagrange weights of a 4-node cubic
/// stencil around the cell containing x.
std::pair<long, std::array<double, 4>> cubic_window(const Axis& axis, double x) {
    const auto [cell, frac] = locate(axis, x);
    const long last = static_cast<long>(axis.last_ext());
    const long start = std::clamp<long>(cell - 1, 0, last - 3);
    const double p = static_cast<double>(cell - start) + frac;
    std::array<double, 4> w{};
    for (int k = 0; k < 4; ++k) {
        double acc = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m != k) acc *= (p - m) / static_cast<double>(k - m);
        }
        w[static_cast<std::size_t>(k)] = acc;
    }
    return {start, w};
}

}  // namespace

std::string to_string(Interpolation method) {
    return method == Interpolation::Linear ? "linear" : "cubic";
}

Interpolation interpolation_from_string(const std::string& name) {
    if (name == "linear") return Interpolation::Linear;
    if (name == "cubic") return Interpolation::Cubic;
    throw std::invalid_argument("unknown interpolation '" + name + "' (expected linear or cubic)");
}

double interpolate_value(const SpatialSystem& sys, std::span<const double> slice, double t, EvalPoint point,
                         Interpolation method) {
    if (slice.size() != sys.size()) throw std::invalid_argument("interpolate_value: slice length mismatch");
    if (method == Interpolation::Cubic) {
        const auto [s0, ws] = cubic_window(sys.grid.s, point.s);
        if (sys.grid.s.last_ext() < 3) throw std::invalid_argument("cubic interpolation needs 4 nodes per axis");
        if (!sys.grid.v) {
            double value = 0.0;
            for (int k = 0; k < 4; ++k) value += ws[static_cast<std::size_t>(k)] * node_value(sys, slice, t, s0 + k, 0);
            return value;
        }
        if (sys.grid.v->last_ext() < 3) throw std::invalid_argument("cubic interpolation needs 4 nodes per axis");
        const auto [v0, wv] = cubic_window(*sys.grid.v, point.v);
        double value = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                value += ws[static_cast<std::size_t>(a)] * wv[static_cast<std::size_t>(b)] *
                         node_value(sys, slice, t, s0 + a, v0 + b);
            }
        }
        return value;
    }
    const auto [is, fs] = locate(sys.grid.s, point.s);
    if (!sys.grid.v) {
        const double lo = fs == 1.0 ? 0.0 : node_value(sys, slice, t, is, 0);
        const double hi = fs == 0.0 ? 0.0 : node_value(sys, slice, t, is + 1, 0);
        return (1.0 - fs) * lo + fs * hi;
    }
    const auto [jv, fv] = locate(*sys.grid.v, point.v);
    double value = 0.0;
    for (int di = 0; di < 2; ++di) {
        const double ws = di == 0 ? 1.0 - fs : fs;
        if (ws == 0.0) continue;
        for (int dj = 0; dj < 2; ++dj) {
            const double wv = dj == 0 ? 1.0 - fv : fv;
            if (wv == 0.0) continue;
            value += ws * wv * node_value(sys, slice, t, is + di, jv + dj);
        }
    }
    return value;
}

}  // namespace pintlcp
