#pragma once

#include "pintlcp/sparse.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pintlcp {

/// How the edge of an axis enters the discrete system.
enum class BoundaryKind {
    Dirichlet,  ///< value prescribed, eliminated into the boundary vector
    Neumann,    ///< zero normal derivative, eliminated by a one-sided difference
    Included,   ///< the edge node is itself an unknown (degenerate PDE row)
};

/// One uniform axis on [0, max].
///
/// The high edge is always eliminated. The low edge is eliminated unless it is
/// `Included`, in which case node 0 sits at coordinate 0. Unknown i lives at
/// (first + i) * h with first = 0 for an included low edge and 1 otherwise,
/// so h = max / (n + first).
struct Axis {
    double max = 0.0;
    std::size_t n = 0;
    double h = 0.0;
    BoundaryKind low = BoundaryKind::Dirichlet;
    BoundaryKind high = BoundaryKind::Dirichlet;

    static Axis make(double max, std::size_t n, BoundaryKind low, BoundaryKind high);

    [[nodiscard]] std::size_t first() const noexcept { return low == BoundaryKind::Included ? 0 : 1; }
    /// Index of the high edge in the extended (boundary-inclusive) numbering.
    [[nodiscard]] std::size_t last_ext() const noexcept { return n + first(); }
    [[nodiscard]] double node(std::size_t i) const noexcept { return static_cast<double>(first() + i) * h; }
};

/// Lexicographic tensor grid: unknown (i, j) maps to j * s.n + i. One-
/// dimensional models carry no v axis.
struct Grid {
    Axis s;
    std::optional<Axis> v;

    [[nodiscard]] std::size_t dims() const noexcept { return v ? 2 : 1; }
    [[nodiscard]] std::size_t ns() const noexcept { return s.n; }
    [[nodiscard]] std::size_t nv() const noexcept { return v ? v->n : 1; }
    [[nodiscard]] std::size_t size() const noexcept { return ns() * nv(); }
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * s.n + i; }
};

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

enum class ModelKind { BlackScholes1D, Spread2D, Heston2D };

enum class CrossStencil {
    SevenPoint,  ///< corners aligned with the sign of the mixed coefficient
    FourPoint,   ///< plain central product stencil, not sign-preserving
};

struct BlackScholesParams {
    double sigma = 0.15;
};

struct SpreadParams {
    double sigma1 = 0.35;
    double sigma2 = 0.38;
    double rho = 0.6;
    /// u(0, v, t) = 0 instead of max(K e^{-rt} + v, 0).
    bool homogeneous_s0 = false;
    CrossStencil cross = CrossStencil::SevenPoint;
};

struct HestonParams {
    double sigma = 0.9;  ///< volatility of variance
    double kappa = 5.0;
    double eta = 0.16;
    double rho = 0.1;
    CrossStencil cross = CrossStencil::SevenPoint;
};

struct ModelParams {
    double strike = 100.0;
    double maturity = 1.0;
    double rate = 0.03;
    std::variant<BlackScholesParams, SpreadParams, HestonParams> model;

    [[nodiscard]] ModelKind kind() const noexcept;
    /// Throws std::invalid_argument on K <= 0, T <= 0, r < 0, nonpositive
    /// volatilities or |rho| > 1.
    void validate() const;
};

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Spatial system
// ---------------------------------------------------------------------------

/// Contribution coef * u_b(s, v, t) of a Dirichlet node to row `row` of g.
struct BoundaryTerm {
    std::size_t row;
    double coef;
    double s;
    double v;
};

using DirichletValue = std::function<double(double s, double v, double t)>;

/// Assembled semi-discrete operator du/dt = L_h u + g(t). Immutable after
/// assembly and safe to share between threads.
struct SpatialSystem {
    ModelParams params;
    Grid grid;
    SparseMatrix<double> operator_matrix;  ///< L_h
    std::vector<double> payoff;            ///< phi
    std::vector<BoundaryTerm> boundary_terms;
    DirichletValue dirichlet;
    bool time_dependent_boundary = false;

    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
    [[nodiscard]] ModelKind kind() const noexcept { return params.kind(); }
    /// Boundary vector g evaluated at time t (time to maturity).
    [[nodiscard]] std::vector<double> boundary(double t) const;
};

/// Vanilla put max(K - s, 0), spread put max(K - (s - v), 0), or the vanilla
/// put on the first coordinate for Heston.
[[nodiscard]] std::vector<double> build_payoff(const ModelParams& params, const Grid& grid);

[[nodiscard]] Grid black_scholes_grid(double s_max, std::size_t ns);
[[nodiscard]] Grid spread_grid(double s_max, double v_max, std::size_t ns, std::size_t nv);
[[nodiscard]] Grid heston_grid(double s_max, double v_max, std::size_t ns, std::size_t nv);

/// 1/2 sigma^2 s^2 d_ss + r s d_s - r with Dirichlet u(0) = K, u(s_max) = 0.
[[nodiscard]] SpatialSystem assemble_blackscholes_1d(const ModelParams& params, const Grid& grid);

/// Two-asset spread operator with Dirichlet data u_b = max(K e^{-rt} - (s - v), 0)
/// on all four sides. The boundary vector depends on t.
[[nodiscard]] SpatialSystem assemble_spread_2d(const ModelParams& params, const Grid& grid);

/// Heston operator. Dirichlet u(0, v) = K, second-order one-sided Neumann at
/// s_max and v_max, and the degenerate operator on the v = 0 row.
[[nodiscard]] SpatialSystem assemble_heston_2d(const ModelParams& params, const Grid& grid);

/// Dispatches on params.kind().
[[nodiscard]] SpatialSystem assemble(const ModelParams& params, const Grid& grid);

struct ZViolation {
    std::size_t row;
    std::size_t col;
    double value;  ///< entry of -L_h, positive
};

struct ZMatrixReport {
    bool passed = true;
    std::vector<ZViolation> violations;
};

/// Scans -L for positive off-diagonal entries. Entries within 1e-12 of the
/// row's diagonal magnitude count as zero.
[[nodiscard]] ZMatrixReport check_z_matrix(const SparseMatrix<double>& operator_matrix);

struct EvalPoint {
    double s = 0.0;
    double v = 0.0;
};

enum class Interpolation {
    Linear,  ///< (bi)linear on the enclosing cell
    Cubic,   ///< tensor-product cubic Lagrange on a 4-node window per axis
};

[[nodiscard]] std::string to_string(Interpolation method);
[[nodiscard]] Interpolation interpolation_from_string(const std::string& name);

/// Interpolates a solution slice at time t. Nodes on an eliminated edge use
/// the boundary data at t (Dirichlet) or the one-sided extrapolation
/// (Neumann). Cubic windows are shifted inward next to the domain edges.
[[nodiscard]] double interpolate_value(const SpatialSystem& system, std::span<const double> slice, double t,
                                       EvalPoint point, Interpolation method = Interpolation::Linear);

}  // namespace pintlcp
