#include "pintlcp/pricing.hpp"

#include "pintlcp/all_at_once.hpp"
#include "pintlcp/sequential.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace pintlcp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        const unsigned long long x = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

template <typename Parse>
auto parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<decltype(parse(key, value))> out;
    for (const auto& item : split(value, ',')) {
        if (item.empty()) throw ConfigError(key + ": empty list entry");
        out.push_back(parse(key, item));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

template <typename Fn>
auto wrap_enum(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

template <typename T>
T& model_params(RunConfig& config, const std::string& key) {
    if (auto* p = std::get_if<T>(&config.params.model)) return *p;
    throw ConfigError(key + " does not apply to model " + to_string(config.params.kind()));
}

}  // namespace

std::string to_string(Method method) { return method == Method::Sequential ? "sequential" : "pint"; }

Method method_from_string(const std::string& name) {
    if (name == "sequential" || name == "seq") return Method::Sequential;
    if (name == "pint") return Method::Pint;
    throw std::invalid_argument("unknown method '" + name + "' (expected sequential or pint)");
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    if (name == "json") return ReportFormat::Json;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv, markdown or json)");
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

Grid RunConfig::grid(std::size_t ns_override) const {
    const std::size_t n = ns_override ? ns_override : ns;
    switch (params.kind()) {
        case ModelKind::BlackScholes1D: return black_scholes_grid(s_max, n);
        case ModelKind::Spread2D: return spread_grid(s_max, v_max, n, nv);
        case ModelKind::Heston2D: return heston_grid(s_max, v_max, n, nv);
    }
    throw ConfigError("unknown model");
}

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(tol1 > 0.0) || !(tol2 > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (ns < 2) throw ConfigError("ns must be at least 2");
    if (nt_list.empty()) throw ConfigError("nt list is empty");
    if (std::find(nt_list.begin(), nt_list.end(), std::size_t{0}) != nt_list.end()) {
        throw ConfigError("nt values must be positive");
    }
    if (methods.empty()) throw ConfigError("method list is empty");
    if (workers == 0) throw ConfigError("workers must be positive");
    if (!(s_max > 0.0)) throw ConfigError("s_max must be positive");
    if (!(eval.s >= 0.0 && eval.s <= s_max)) throw ConfigError("evaluation point s outside [0, s_max]");
    if (two_dimensional()) {
        if (nv < 2) throw ConfigError("nv must be at least 2 for two-dimensional models");
        if (!(v_max > 0.0)) throw ConfigError("v_max must be positive");
        if (!(eval.v >= 0.0 && eval.v <= v_max)) throw ConfigError("evaluation point v outside [0, v_max]");
    }
    for (double s : sigma_list) {
        if (!(s > 0.0)) throw ConfigError("sigma sweep values must be positive");
    }
    for (std::size_t n : ns_list) {
        if (n < 2) throw ConfigError("ns list entries must be at least 2");
    }
}

RunConfig example_config(int id) {
    RunConfig c;
    switch (id) {
        case 1:
            c.model = "ex1";
            c.params = ModelParams{100.0, 1.0, 0.03, BlackScholesParams{0.15}};
            c.s_max = 300.0;
            c.ns = 1280;
            c.nt_list = {20, 40, 80, 160, 320};
            c.eval = {100.0, 0.0};
            c.reference = 4.820608;
            break;
        case 2:
            c.model = "ex2";
            c.params = ModelParams{25.0, 122.0 / 365.0, 0.035, SpreadParams{0.35, 0.38, 0.6}};
            c.s_max = 300.0;
            c.v_max = 300.0;
            c.ns = 64;
            c.nv = 64;
            c.nt_list = {10};
            c.eval = {127.68, 99.43};
            c.reference = 6.932875;
            break;
        case 3:
            c.model = "ex3";
            c.params = ModelParams{10.0, 0.25, 0.1, HestonParams{0.9, 5.0, 0.16, 0.1}};
            c.s_max = 20.0;
            c.v_max = 1.0;
            c.ns = 80;
            c.nv = 40;
            c.nt_list = {10};
            c.eval = {10.0, 0.25};
            c.reference = 0.795968;
            break;
        default:
            throw ConfigError("example id must be 1, 2 or 3");
    }
    return c;
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(raw_value);

    if (key == "model") {
        const ModelKind kind = wrap_enum(key, [&] { return model_kind_from_string(value); });
        const int id = kind == ModelKind::BlackScholes1D ? 1 : kind == ModelKind::Spread2D ? 2 : 3;
        const RunConfig fresh = example_config(id);
        // Keep solver and output settings, replace the problem.
        c.model = value.starts_with("ex") || value.size() == 1 ? fresh.model : value;
        c.params = fresh.params;
        c.s_max = fresh.s_max;
        c.v_max = fresh.v_max;
        c.ns = fresh.ns;
        c.nv = fresh.nv;
        c.nt_list = fresh.nt_list;
        c.eval = fresh.eval;
        c.reference = fresh.reference;
    } else if (key == "ns") {
        c.ns = parse_size(key, value);
    } else if (key == "nv") {
        c.nv = parse_size(key, value);
    } else if (key == "nt") {
        c.nt_list = parse_list(key, value, parse_size);
    } else if (key == "ns_list") {
        c.ns_list = parse_list(key, value, parse_size);
    } else if (key == "sigma_list") {
        c.sigma_list = parse_list(key, value, parse_double);
    } else if (key == "method") {
        c.methods.clear();
        if (value == "both") {
            c.methods = {Method::Sequential, Method::Pint};
        } else {
            for (const auto& m : split(value, ',')) c.methods.push_back(wrap_enum(key, [&] { return method_from_string(m); }));
        }
    } else if (key == "alpha") {
        c.alpha = parse_double(key, value);
    } else if (key == "tol1") {
        c.tol1 = parse_double(key, value);
    } else if (key == "tol2") {
        c.tol2 = parse_double(key, value);
    } else if (key == "psi") {
        c.psi = wrap_enum(key, [&] { return psi_strategy_from_string(value); });
    } else if (key == "precond") {
        c.precond = wrap_enum(key, [&] { return preconditioner_kind_from_string(value); });
    } else if (key == "gmres_reference") {
        if (value == "initial") {
            c.gmres_reference = ResidualReference::InitialResidual;
        } else if (value == "rhs") {
            c.gmres_reference = ResidualReference::RightHandSide;
        } else {
            throw ConfigError(key + ": expected initial or rhs");
        }
    } else if (key == "max_outer") {
        c.max_outer = parse_size(key, value);
    } else if (key == "max_gmres") {
        c.max_gmres = parse_size(key, value);
    } else if (key == "interpolation") {
        c.interpolation = wrap_enum(key, [&] { return interpolation_from_string(value); });
    } else if (key == "workers") {
        c.workers = parse_size(key, value);
    } else if (key == "out") {
        c.out = value;
    } else if (key == "format") {
        c.format = wrap_enum(key, [&] { return report_format_from_string(value); });
    } else if (key == "timings") {
        c.timings = parse_bool(key, value);
    } else if (key == "strike") {
        c.params.strike = parse_double(key, value);
    } else if (key == "maturity") {
        c.params.maturity = parse_double(key, value);
    } else if (key == "rate") {
        c.params.rate = parse_double(key, value);
    } else if (key == "sigma") {
        const double s = parse_double(key, value);
        if (auto* bs = std::get_if<BlackScholesParams>(&c.params.model)) {
            bs->sigma = s;
        } else {
            model_params<HestonParams>(c, key).sigma = s;
        }
    } else if (key == "sigma1") {
        model_params<SpreadParams>(c, key).sigma1 = parse_double(key, value);
    } else if (key == "sigma2") {
        model_params<SpreadParams>(c, key).sigma2 = parse_double(key, value);
    } else if (key == "rho") {
        const double r = parse_double(key, value);
        if (auto* sp = std::get_if<SpreadParams>(&c.params.model)) {
            sp->rho = r;
        } else {
            model_params<HestonParams>(c, key).rho = r;
        }
    } else if (key == "kappa") {
        model_params<HestonParams>(c, key).kappa = parse_double(key, value);
    } else if (key == "eta") {
        model_params<HestonParams>(c, key).eta = parse_double(key, value);
    } else if (key == "s_max") {
        c.s_max = parse_double(key, value);
    } else if (key == "v_max") {
        c.v_max = parse_double(key, value);
    } else if (key == "eval_s") {
        c.eval.s = parse_double(key, value);
    } else if (key == "eval_v") {
        c.eval.v = parse_double(key, value);
    } else if (key == "reference") {
        if (value.empty() || value == "none") {
            c.reference.reset();
        } else {
            c.reference = parse_double(key, value);
        }
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

ConfigPairs read_config_pairs(std::istream& in) {
    ConfigPairs pairs;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
        }
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

void apply_settings(RunConfig& config, const ConfigPairs& pairs) {
    for (const auto& [k, v] : pairs) {
        if (k == "model") apply_setting(config, k, v);
    }
    for (const auto& [k, v] : pairs) {
        if (k != "model") apply_setting(config, k, v);
    }
}

void apply_config_text(RunConfig& config, std::istream& in) { apply_settings(config, read_config_pairs(in)); }

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    apply_config_text(config, in);
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

SolveReport solve_once(const RunConfig& config, Method method, std::size_t nt) {
    config.validate();
    SolveReport rep;
    rep.model = config.model;
    rep.method = method;
    rep.ns = config.ns;
    if (config.two_dimensional()) rep.nv = config.nv;
    rep.nt = nt;
    if (const auto* bs = std::get_if<BlackScholesParams>(&config.params.model)) rep.sigma = bs->sigma;

    const auto t_start = Clock::now();
    const SpatialSystem spatial = assemble(config.params, config.grid());
    rep.assemble_seconds = seconds_since(t_start);
    const double maturity = config.params.maturity;

    const auto t_solve = Clock::now();
    if (method == Method::Sequential) {
        const auto result = price_sequential(spatial, nt, SequentialOptions{config.tol1, config.max_outer});
        if (!result.converged) {
            throw SolverNonConvergence("sequential policy iteration hit max_outer at some time step");
        }
        rep.p_iter = result.total_corrections;
        rep.slice = result.final_slice();
    } else {
        const AllAtOnceSystem system(spatial, nt);
        InnerSolverOptions inner;
        inner.kind = config.precond;
        inner.alpha = config.alpha;
        inner.psi = config.psi;
        inner.tol2 = config.tol2;
        inner.reference = config.gmres_reference;
        inner.max_gmres = config.max_gmres;
        inner.parallel.workers = config.workers;
        auto stats = std::make_shared<InnerSolverStats>();
        AllAtOnceResult result;
        try {
            result = policy_iterate_all_at_once(system, make_inner_solver(system, inner, stats),
                                                AllAtOnceOptions{config.tol1, config.max_outer, false});
        } catch (const InnerSolveError& e) {
            throw SolverNonConvergence(e.what());
        }
        if (!result.stats.converged()) {
            throw SolverNonConvergence("all-at-once policy iteration did not converge in " +
                                       std::to_string(config.max_outer) + " iterations");
        }
        rep.alpha = config.alpha;
        rep.p_iter = result.stats.iterations;
        rep.policy_residuals = result.stats.residual_history;
        if (resolve_preconditioner(config.precond, system) != PreconditionerKind::Direct) {
            rep.gmres_total = stats->gmres_total();
            rep.gmres_avg = rep.p_iter ? static_cast<double>(*rep.gmres_total) / static_cast<double>(rep.p_iter)
                                       : 0.0;
            rep.gmres_per_iteration = stats->gmres_iterations;
            rep.residual_histories = stats->residual_histories;
            rep.floor_limited = stats->floor_limited;
        }
        const auto last = system.block(result.v, nt - 1);
        rep.slice.assign(last.begin(), last.end());
    }
    rep.solve_seconds = seconds_since(t_solve);
    rep.value = interpolate_value(spatial, rep.slice, maturity, config.eval, config.interpolation);
    if (config.reference) rep.error = std::abs(rep.value - *config.reference);
    rep.wall_seconds = seconds_since(t_start);
    return rep;
}

std::vector<SolveReport> run_example(const RunConfig& config) {
    config.validate();
    std::vector<SolveReport> reports;
    for (Method m : config.methods) {
        for (std::size_t nt : config.nt_list) reports.push_back(solve_once(config, m, nt));
    }
    return reports;
}

std::vector<ConvergenceRow> convergence_sweep(const RunConfig& config) {
    if (config.nt_list.size() < 3) throw ConfigError("convergence sweep needs at least three nt values");
    if (!config.reference) throw ConfigError("convergence sweep needs a reference value");
    std::vector<ConvergenceRow> rows;
    for (std::size_t nt : config.nt_list) {
        ConvergenceRow row{solve_once(config, config.methods.front(), nt), std::nullopt};
        if (!rows.empty()) {
            const double prev = *rows.back().report.error;
            const double cur = *row.report.error;
            if (prev > 0.0 && cur > 0.0) row.order = std::log2(prev / cur);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SolveReport> iteration_matrix(const RunConfig& config) {
    if (config.ns_list.empty()) throw ConfigError("table2 needs an ns list");
    std::vector<SolveReport> reports;
    for (std::size_t nt : config.nt_list) {
        for (std::size_t ns : config.ns_list) {
            RunConfig cell = config;
            cell.ns = ns;
            reports.push_back(solve_once(cell, Method::Pint, nt));
        }
    }
    return reports;
}

std::vector<SolveReport> sigma_sweep(const RunConfig& config) {
    if (config.sigma_list.empty()) throw ConfigError("sigma sweep needs a sigma list");
    if (config.params.kind() != ModelKind::BlackScholes1D) throw ConfigError("sigma sweep applies to bs1d only");
    std::vector<SolveReport> reports;
    for (double sigma : config.sigma_list) {
        RunConfig cell = config;
        std::get<BlackScholesParams>(cell.params.model).sigma = sigma;
        // The reference value belongs to one sigma only.
        if (sigma != std::get<BlackScholesParams>(config.params.model).sigma) cell.reference.reset();
        reports.push_back(solve_once(cell, Method::Pint, config.nt_list.front()));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double x, int precision = 17) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

template <typename T>
std::string opt_cell(const std::optional<T>& x) {
    if (!x) return {};
    if constexpr (std::is_floating_point_v<T>) {
        return fmt(*x);
    } else {
        return std::to_string(*x);
    }
}

std::string sci(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << x;
    return os.str();
}

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SolveReport>& reports, bool timings) {
    out << kCsvHeader << '\n';
    for (const auto& r : reports) {
        out << r.model << ',' << to_string(r.method) << ',' << r.ns << ',' << opt_cell(r.nv) << ',' << r.nt << ','
            << opt_cell(r.alpha) << ',' << fmt(r.value) << ',' << opt_cell(r.error) << ',' << r.p_iter << ','
            << opt_cell(r.gmres_total) << ',' << opt_cell(r.gmres_avg) << ','
            << (timings ? fmt(r.wall_seconds, 6) : std::string{}) << '\n';
    }
}

void write_markdown(std::ostream& out, const std::vector<SolveReport>& reports, bool timings) {
    out << "| model | method | N_s | N_v | N_t | value | error | P-Iter | G-Iter | G-avg |"
        << (timings ? " CPU (s) |" : "") << '\n';
    out << "|---|---|---|---|---|---|---|---|---|---|" << (timings ? "---|" : "") << '\n';
    for (const auto& r : reports) {
        out << "| " << r.model << " | " << to_string(r.method) << " | " << r.ns << " | " << opt_cell(r.nv) << " | "
            << r.nt << " | " << fixed(r.value, 6) << " | " << (r.error ? sci(*r.error) : "") << " | " << r.p_iter
            << " | " << opt_cell(r.gmres_total) << " | " << (r.gmres_avg ? fixed(*r.gmres_avg, 2) : "") << " |";
        if (timings) out << ' ' << fixed(r.wall_seconds, 2) << " |";
        out << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<SolveReport>& reports, bool timings) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["model"] = r.model;
        j["method"] = to_string(r.method);
        j["N_s"] = r.ns;
        j["N_v"] = r.nv ? nlohmann::json(*r.nv) : nlohmann::json(nullptr);
        j["N_t"] = r.nt;
        j["alpha"] = r.alpha ? nlohmann::json(*r.alpha) : nlohmann::json(nullptr);
        j["value"] = r.value;
        j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
        j["p_iter"] = r.p_iter;
        j["gmres_total"] = r.gmres_total ? nlohmann::json(*r.gmres_total) : nlohmann::json(nullptr);
        j["gmres_avg"] = r.gmres_avg ? nlohmann::json(*r.gmres_avg) : nlohmann::json(nullptr);
        j["gmres_per_iteration"] = r.gmres_per_iteration;
        j["policy_residuals"] = r.policy_residuals;
        j["floor_limited"] = r.floor_limited;
        if (timings) {
            j["wall_seconds"] = r.wall_seconds;
            j["assemble_seconds"] = r.assemble_seconds;
            j["solve_seconds"] = r.solve_seconds;
        }
        doc.push_back(std::move(j));
    }
    out << doc.dump(2) << '\n';
}

void write_convergence_markdown(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "| N_t | value | error | order | P-Iter | G-Iter |\n|---|---|---|---|---|---|\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << "| " << r.nt << " | " << fixed(r.value, 6) << " | " << (r.error ? sci(*r.error) : "") << " | "
            << (row.order ? fixed(*row.order, 3) : "") << " | " << r.p_iter << " | " << opt_cell(r.gmres_total)
            << " |\n";
    }
}

void write_iteration_matrix(std::ostream& out, const std::vector<SolveReport>& reports) {
    std::vector<std::size_t> ns_values;
    std::map<std::size_t, std::map<std::size_t, const SolveReport*>> grid;
    for (const auto& r : reports) {
        if (std::find(ns_values.begin(), ns_values.end(), r.ns) == ns_values.end()) ns_values.push_back(r.ns);
        grid[r.nt][r.ns] = &r;
    }
    out << "N_t";
    for (std::size_t ns : ns_values) out << ",N_s=" << ns;
    out << '\n';
    for (const auto& [nt, row] : grid) {
        out << nt;
        for (std::size_t ns : ns_values) {
            out << ',';
            const auto it = row.find(ns);
            if (it == row.end()) continue;
            out << it->second->p_iter;
            if (it->second->gmres_avg) out << " (" << fixed(*it->second->gmres_avg, 2) << ')';
        }
        out << '\n';
    }
}

void emit_report(const std::vector<SolveReport>& reports, ReportFormat format, const std::string& path,
                 bool timings) {
    if (reports.empty()) throw std::invalid_argument("emit_report: no reports");
    std::ofstream file;
    if (!path.empty()) {
        file.open(path);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
    }
    std::ostream& out = path.empty() ? std::cout : file;
    switch (format) {
        case ReportFormat::Csv: write_csv(out, reports, timings); break;
        case ReportFormat::Markdown: write_markdown(out, reports, timings); break;
        case ReportFormat::Json: write_json(out, reports, timings); break;
    }
    if (!out) throw std::runtime_error("write failed for '" + (path.empty() ? std::string("stdout") : path) + "'");
}

std::vector<SolveReport> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) throw std::invalid_argument("read_csv: bad header");
    std::vector<SolveReport> reports;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        if (cells.size() != 12) throw std::invalid_argument("read_csv: expected 12 cells, got " + std::to_string(cells.size()));
        SolveReport r;
        r.model = cells[0];
        r.method = method_from_string(cells[1]);
        r.ns = std::stoull(cells[2]);
        if (!cells[3].empty()) r.nv = std::stoull(cells[3]);
        r.nt = std::stoull(cells[4]);
        if (!cells[5].empty()) r.alpha = std::stod(cells[5]);
        r.value = std::stod(cells[6]);
        if (!cells[7].empty()) r.error = std::stod(cells[7]);
        r.p_iter = std::stoull(cells[8]);
        if (!cells[9].empty()) r.gmres_total = std::stoull(cells[9]);
        if (!cells[10].empty()) r.gmres_avg = std::stod(cells[10]);
        if (!cells[11].empty()) r.wall_seconds = std::stod(cells[11]);
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace pintlcp
