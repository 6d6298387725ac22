#pragma once

#include "pintlcp/market_models.hpp"
#include "pintlcp/pint_preconditioner.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pintlcp {

/// Bad configuration: unknown key, unparsable value, violated invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Outer iteration or an inner solve failed to converge.
class SolverNonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { Sequential, Pint };

[[nodiscard]] std::string to_string(Method method);
[[nodiscard]] Method method_from_string(const std::string& name);

enum class ReportFormat { Csv, Markdown, Json };

[[nodiscard]] ReportFormat report_format_from_string(const std::string& name);

struct RunConfig {
    std::string model = "ex1";  ///< tag written to reports
    ModelParams params;
    double s_max = 300.0;
    double v_max = 0.0;  ///< unused for 1D models
    std::size_t ns = 1280;
    std::size_t nv = 0;
    std::vector<std::size_t> nt_list{80};
    std::vector<std::size_t> ns_list;   ///< table2 columns
    std::vector<double> sigma_list;     ///< sweep-sigma values
    std::vector<Method> methods{Method::Pint};

    double alpha = 1e-8;
    double tol1 = 1e-6;
    double tol2 = 1e-10;
    PsiStrategy psi = PsiStrategy::Average;
    PreconditionerKind precond = PreconditionerKind::Auto;
    ResidualReference gmres_reference = ResidualReference::InitialResidual;
    std::size_t max_outer = 200;
    std::size_t max_gmres = 500;

    EvalPoint eval{100.0, 0.0};
    Interpolation interpolation = Interpolation::Cubic;
    std::optional<double> reference;

    std::size_t workers = 1;
    std::string out;  ///< empty: stdout
    ReportFormat format = ReportFormat::Csv;
    bool timings = true;  ///< include wall_seconds in emitted reports

    [[nodiscard]] bool two_dimensional() const noexcept { return params.kind() != ModelKind::BlackScholes1D; }
    [[nodiscard]] Grid grid(std::size_t ns_override = 0) const;
    /// Throws ConfigError.
    void validate() const;
};

/// Parameters, grid, evaluation point and reference value of example 1, 2 or 3.
[[nodiscard]] RunConfig example_config(int id);

/// Sets one key. Keys match the long CLI flags without dashes; model
/// parameters use strike, maturity, rate, sigma, sigma1, sigma2, rho, kappa,
/// eta, s_max, v_max, eval_s, eval_v, reference. Lists are comma separated.
/// Setting `model` to an example tag resets everything to that example.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

/// Flat key=value lines; '#' starts a comment.
[[nodiscard]] ConfigPairs read_config_pairs(std::istream& in);

/// Applies `model` first (it resets the problem), then the rest in order.
void apply_settings(RunConfig& config, const ConfigPairs& pairs);

void apply_config_text(RunConfig& config, std::istream& in);
void apply_config_file(RunConfig& config, const std::string& path);

struct SolveReport {
    std::string model;
    Method method = Method::Pint;
    std::size_t ns = 0;
    std::optional<std::size_t> nv;
    std::size_t nt = 0;
    std::optional<double> alpha;  ///< PinT only
    double value = 0.0;
    std::optional<double> error;
    std::size_t p_iter = 0;
    std::optional<std::size_t> gmres_total;  ///< Krylov solves only
    std::optional<double> gmres_avg;
    double wall_seconds = 0.0;

    // Not part of the CSV schema.
    double sigma = 0.0;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
    std::size_t floor_limited = 0;
    std::vector<std::size_t> gmres_per_iteration;
    std::vector<std::vector<double>> residual_histories;
    std::vector<double> policy_residuals;
    std::vector<double> slice;  ///< solution at maturity on the grid
};

/// One solve with the given method and N_t. Throws SolverNonConvergence.
[[nodiscard]] SolveReport solve_once(const RunConfig& config, Method method, std::size_t nt);

/// Every configured method at every configured N_t.
[[nodiscard]] std::vector<SolveReport> run_example(const RunConfig& config);

struct ConvergenceRow {
    SolveReport report;
    std::optional<double> order;  ///< log2(e(N_t / 2) / e(N_t)) against the previous row
};

/// Requires at least three N_t values and a reference value.
[[nodiscard]] std::vector<ConvergenceRow> convergence_sweep(const RunConfig& config);

/// PinT grid over ns_list x nt_list, rows ordered by N_t then N_s.
[[nodiscard]] std::vector<SolveReport> iteration_matrix(const RunConfig& config);

/// PinT at the first N_t for every sigma in sigma_list (1D models only).
[[nodiscard]] std::vector<SolveReport> sigma_sweep(const RunConfig& config);

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "model,method,N_s,N_v,N_t,alpha,value,error,p_iter,gmres_total,gmres_avg,wall_seconds";

void write_csv(std::ostream& out, const std::vector<SolveReport>& reports, bool timings = true);
void write_markdown(std::ostream& out, const std::vector<SolveReport>& reports, bool timings = true);
void write_json(std::ostream& out, const std::vector<SolveReport>& reports, bool timings = true);

/// Convergence table with an order column, markdown only.
void write_convergence_markdown(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// N_t x N_s grid of "p_iter (gmres_avg)" cells.
void write_iteration_matrix(std::ostream& out, const std::vector<SolveReport>& reports);

/// Writes to `path`, or to stdout when it is empty. Throws std::runtime_error
/// when the file cannot be opened.
void emit_report(const std::vector<SolveReport>& reports, ReportFormat format, const std::string& path,
                 bool timings = true);

/// Parses CSV written by write_csv. Only schema columns are restored.
[[nodiscard]] std::vector<SolveReport> read_csv(std::istream& in);

}  // namespace pintlcp
