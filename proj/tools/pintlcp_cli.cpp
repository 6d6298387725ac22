// Command-line front end: price, convergence, table2, sweep-sigma, spectrum.

#include "pintlcp/all_at_once.hpp"
#include "pintlcp/pricing.hpp"

#include <CLI11.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

using namespace pintlcp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;

/// Flag values as raw strings so that they can be layered over a config file.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::string config_path;
};

void add_common_flags(CLI::App& cmd, FlagSet& flags) {
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        cmd.add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
    };
    flag("--model", "model", "ex1|ex2|ex3 (or bs1d|spread2d|heston2d)");
    flag("--ns", "ns", "spatial nodes in s");
    flag("--nv", "nv", "spatial nodes in v (2D models)");
    flag("--nt", "nt", "time steps, comma-separated list allowed");
    flag("--alpha", "alpha", "alpha-circulant parameter (default 1e-8)");
    flag("--method", "method", "sequential|pint|both");
    flag("--psi", "psi", "average|rounded|mode");
    flag("--tol1", "tol1", "policy iteration tolerance (default 1e-6)");
    flag("--tol2", "tol2", "GMRES relative tolerance (default 1e-10)");
    flag("--precond", "precond", "auto|nkpa|projected|none|direct");
    flag("--gmres-reference", "gmres_reference", "initial|rhs: GMRES residual scale");
    flag("--interpolation", "interpolation", "cubic|linear evaluation at the spot");
    flag("--workers", "workers", "threads for the frequency solves");
    flag("--out", "out", "output path (default stdout)");
    flag("--format", "format", "csv|markdown|json");
    flag("--timings", "timings", "include wall-clock columns (true|false)");
    cmd.add_option_function<std::vector<std::string>>(
        "--set",
        [&flags](const std::vector<std::string>& items) {
            for (const auto& item : items) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
                flags.values[item.substr(0, eq)] = item.substr(eq + 1);
            }
        },
        "extra key=value settings (strike, sigma, eval_s, ...)");
    cmd.add_option("--config", flags.config_path, "key=value config file; flags override it");
}

RunConfig build_config(const FlagSet& flags, const ConfigPairs& defaults) {
    ConfigPairs pairs = defaults;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw ConfigError("cannot read config file '" + flags.config_path + "'");
        for (auto& kv : read_config_pairs(in)) pairs.push_back(std::move(kv));
    }
    for (const auto& [k, v] : flags.values) {
        std::erase_if(pairs, [&](const auto& kv) { return kv.first == k; });
        pairs.emplace_back(k, v);
    }
    RunConfig config = example_config(1);
    apply_settings(config, pairs);
    config.validate();
    return config;
}

std::ostream& open_out(const RunConfig& config, std::ofstream& file) {
    if (config.out.empty()) return std::cout;
    file.open(config.out);
    if (!file) throw std::runtime_error("cannot write '" + config.out + "'");
    return file;
}

int cmd_price(const RunConfig& config) {
    emit_report(run_example(config), config.format, config.out, config.timings);
    return kExitOk;
}

int cmd_convergence(const RunConfig& config) {
    const auto rows = convergence_sweep(config);
    std::ofstream file;
    std::ostream& out = open_out(config, file);
    if (config.format == ReportFormat::Markdown) {
        write_convergence_markdown(out, rows);
        return kExitOk;
    }
    std::vector<SolveReport> reports;
    for (const auto& r : rows) reports.push_back(r.report);
    if (config.format == ReportFormat::Json) {
        write_json(out, reports, config.timings);
        return kExitOk;
    }
    // CSV keeps the fixed schema; orders go to stderr.
    write_csv(out, reports, config.timings);
    for (const auto& r : rows) {
        if (r.order) std::cerr << "N_t=" << r.report.nt << " order=" << *r.order << '\n';
    }
    return kExitOk;
}

int cmd_table2(const RunConfig& config, bool grid_layout) {
    const auto reports = iteration_matrix(config);
    std::ofstream file;
    std::ostream& out = open_out(config, file);
    if (grid_layout) {
        write_iteration_matrix(out, reports);
    } else if (config.format == ReportFormat::Markdown) {
        write_markdown(out, reports, config.timings);
    } else if (config.format == ReportFormat::Json) {
        write_json(out, reports, config.timings);
    } else {
        write_csv(out, reports, config.timings);
    }
    return kExitOk;
}

int cmd_sweep_sigma(const RunConfig& config) {
    const auto reports = sigma_sweep(config);
    std::ofstream file;
    std::ostream& out = open_out(config, file);
    if (config.format == ReportFormat::Csv) {
        // Schema columns plus sigma, since the model tag alone is ambiguous.
        std::ostringstream body;
        write_csv(body, reports, config.timings);
        std::istringstream lines(body.str());
        std::string line;
        std::getline(lines, line);
        out << "sigma," << line << '\n';
        for (const auto& r : reports) {
            std::getline(lines, line);
            out << r.sigma << ',' << line << '\n';
        }
    } else {
        emit_report(reports, config.format, config.out, config.timings);
    }
    return kExitOk;
}

int cmd_spectrum(const RunConfig& config, std::size_t iteration, std::size_t max_dim) {
    const std::size_t nt = config.nt_list.front();
    const AllAtOnceSystem system(assemble(config.params, config.grid()), nt);
    if (system.size() > max_dim) {
        throw ConfigError("spectrum: system size " + std::to_string(system.size()) + " exceeds --max-dim " +
                          std::to_string(max_dim));
    }
    InnerSolverOptions inner;
    inner.kind = config.precond;
    inner.alpha = config.alpha;
    inner.psi = config.psi;
    inner.tol2 = config.tol2;
    inner.parallel.workers = config.workers;
    auto stats = std::make_shared<InnerSolverStats>();
    const auto result = policy_iterate_all_at_once(system, make_inner_solver(system, inner, stats),
                                                   AllAtOnceOptions{config.tol1, config.max_outer, true});
    if (iteration == 0 || iteration > result.masks.size()) {
        throw ConfigError("spectrum: --iteration must lie in 1.." + std::to_string(result.masks.size()));
    }
    const auto report = spectrum_diagnostics(system, result.masks[iteration - 1], inner, max_dim);

    const std::string stem = config.out.empty() ? std::string("spectrum") : config.out;
    for (const auto& [suffix, values] : {std::pair{"_system.txt", &report.system},
                                         std::pair{"_preconditioned.txt", &report.preconditioned}}) {
        std::ofstream file(stem + suffix);
        if (!file) throw std::runtime_error("cannot write '" + stem + suffix + "'");
        write_complex_pairs(file, *values);
    }
    std::size_t clustered = 0;
    for (const auto& z : report.preconditioned) clustered += std::abs(z - Complex(1.0)) <= 0.5;
    std::cout << "iteration " << iteration << " of " << result.masks.size() << ", dimension "
              << report.system.size() << '\n'
              << "preconditioned eigenvalues with |z-1| <= 0.5: " << clustered << " / "
              << report.preconditioned.size() << '\n'
              << "wrote " << stem << "_system.txt and " << stem << "_preconditioned.txt\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"American option pricing by policy iteration, sequential or parallel-in-time"};
    app.require_subcommand(1);

    FlagSet price_flags, conv_flags, table_flags, sigma_flags, spec_flags;

    auto* price = app.add_subcommand("price", "price one example at every configured N_t");
    add_common_flags(*price, price_flags);

    auto* conv = app.add_subcommand("convergence", "N_t sweep with errors and observed temporal order");
    add_common_flags(*conv, conv_flags);

    auto* table = app.add_subcommand("table2", "PinT iteration counts over an N_t x N_s grid");
    add_common_flags(*table, table_flags);
    table->add_option_function<std::string>(
        "--ns-list", [&](const std::string& v) { table_flags.values["ns_list"] = v; }, "N_s values");
    bool grid_layout = false;
    table->add_flag("--grid", grid_layout, "print the N_t x N_s layout instead of report rows");

    auto* sigma = app.add_subcommand("sweep-sigma", "PinT iteration counts for several volatilities");
    add_common_flags(*sigma, sigma_flags);
    sigma->add_option_function<std::string>(
        "--sigmas", [&](const std::string& v) { sigma_flags.values["sigma_list"] = v; }, "sigma values");

    auto* spec = app.add_subcommand("spectrum", "eigenvalues of the policy matrix and its preconditioned form");
    add_common_flags(*spec, spec_flags);
    std::size_t iteration = 1;
    std::size_t max_dim = 4096;
    spec->add_option("--iteration", iteration, "policy iteration whose mask is used (1-based)");
    spec->add_option("--max-dim", max_dim, "largest dense eigenproblem allowed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (price->parsed()) return cmd_price(build_config(price_flags, {}));
        if (conv->parsed()) return cmd_convergence(build_config(conv_flags, {}));
        if (table->parsed()) {
            return cmd_table2(build_config(table_flags, {{"nt", "20,40,80,160,320"}, {"ns_list", "20,40,80,160,320"}}),
                              grid_layout);
        }
        if (sigma->parsed()) {
            return cmd_sweep_sigma(build_config(sigma_flags, {{"nt", "80"}, {"sigma_list", "0.1,0.25,0.5,1.0"}}));
        }
        if (spec->parsed()) {
            return cmd_spectrum(build_config(spec_flags, {{"ns", "20"}, {"nt", "8"}}), iteration, max_dim);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverNonConvergence& e) {
        std::cerr << "solver did not converge: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const InnerSolveError& e) {
        std::cerr << "solver did not converge: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
