#include "pintlcp/pricing.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <sstream>

using namespace pintlcp;

namespace {

RunConfig small_bs() {
    RunConfig c = example_config(1);
    c.ns = 64;
    c.nt_list = {8, 16, 32};
    c.timings = false;
    return c;
}

std::string csv_of(const std::vector<SolveReport>& reports, bool timings = false) {
    std::ostringstream out;
    write_csv(out, reports, timings);
    return out.str();
}

}  // namespace

TEST(Config, ExamplesValidate) {
    for (int id : {1, 2, 3}) EXPECT_NO_THROW(example_config(id).validate()) << id;
    EXPECT_THROW((void)example_config(4), ConfigError);
    EXPECT_FALSE(example_config(1).two_dimensional());
    EXPECT_TRUE(example_config(3).two_dimensional());
    EXPECT_EQ(example_config(2).grid().size(), 64u * 64u);
}

TEST(Config, SettingsParse) {
    RunConfig c = example_config(1);
    apply_setting(c, "nt", "10, 20");
    apply_setting(c, "alpha", "1e-4");
    apply_setting(c, "method", "both");
    apply_setting(c, "gmres-reference", "rhs");
    apply_setting(c, "psi", "mode");
    apply_setting(c, "sigma", "0.3");
    apply_setting(c, "reference", "none");
    EXPECT_EQ(c.nt_list, (std::vector<std::size_t>{10, 20}));
    EXPECT_EQ(c.alpha, 1e-4);
    EXPECT_EQ(c.methods.size(), 2u);
    EXPECT_EQ(c.gmres_reference, ResidualReference::RightHandSide);
    EXPECT_EQ(c.psi, PsiStrategy::Mode);
    EXPECT_EQ(std::get<BlackScholesParams>(c.params.model).sigma, 0.3);
    EXPECT_FALSE(c.reference);
}

TEST(Config, Errors) {
    RunConfig c = example_config(1);
    EXPECT_THROW(apply_setting(c, "colour", "red"), ConfigError);
    EXPECT_THROW(apply_setting(c, "ns", "-4"), ConfigError);
    EXPECT_THROW(apply_setting(c, "ns", "12x"), ConfigError);
    EXPECT_THROW(apply_setting(c, "alpha", "abc"), ConfigError);
    EXPECT_THROW(apply_setting(c, "kappa", "2"), ConfigError);  // Heston only
    EXPECT_THROW(apply_setting(c, "method", "euler"), ConfigError);

    c.alpha = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = example_config(2);
    c.nv = 1;
    EXPECT_THROW(c.validate(), ConfigError);

    std::istringstream bad("ns 12\n");
    EXPECT_THROW((void)read_config_pairs(bad), ConfigError);
    EXPECT_THROW(apply_config_file(c, "/nonexistent/pintlcp.cfg"), ConfigError);
}

TEST(Config, ModelIsAppliedFirst) {
    RunConfig c = example_config(1);
    std::istringstream text("# heston with a coarser grid\nns = 20\nmodel = ex3\nnv=10\n");
    apply_config_text(c, text);
    EXPECT_EQ(c.params.kind(), ModelKind::Heston2D);
    EXPECT_EQ(c.ns, 20u);
    EXPECT_EQ(c.nv, 10u);
    EXPECT_EQ(c.model, "ex3");
}

TEST(Config, ModelResetKeepsSolverSettings) {
    RunConfig c = example_config(1);
    apply_setting(c, "tol2", "1e-9");
    apply_setting(c, "model", "spread2d");
    EXPECT_EQ(c.tol2, 1e-9);
    EXPECT_EQ(c.ns, 64u);
    EXPECT_EQ(c.model, "spread2d");
}

TEST(Solve, SequentialAndPintAgree) {
    const RunConfig c = small_bs();
    const auto seq = solve_once(c, Method::Sequential, 16);
    const auto pint = solve_once(c, Method::Pint, 16);
    EXPECT_NEAR(seq.value, pint.value, 1e-6);
    EXPECT_FALSE(seq.alpha);
    EXPECT_FALSE(seq.gmres_total);
    ASSERT_TRUE(pint.gmres_total && pint.gmres_avg && pint.alpha);
    EXPECT_EQ(pint.gmres_per_iteration.size(), pint.p_iter);
    EXPECT_NEAR(*pint.error, std::abs(pint.value - 4.820608), 1e-15);
    EXPECT_EQ(pint.slice.size(), 64u);
}

TEST(Solve, DirectInnerSolverHasNoGmresFields) {
    RunConfig c = small_bs();
    c.precond = PreconditionerKind::Direct;
    const auto rep = solve_once(c, Method::Pint, 8);
    EXPECT_FALSE(rep.gmres_total);
    EXPECT_GE(rep.p_iter, 1u);
}

TEST(Solve, NonConvergenceIsReported) {
    RunConfig c = small_bs();
    c.max_outer = 1;
    c.tol1 = 1e-15;
    EXPECT_THROW((void)solve_once(c, Method::Pint, 16), SolverNonConvergence);
    c = small_bs();
    c.max_gmres = 1;
    c.precond = PreconditionerKind::None;
    EXPECT_THROW((void)solve_once(c, Method::Pint, 16), SolverNonConvergence);
}

TEST(Convergence, OrdersAndErrors) {
    const auto rows = convergence_sweep(small_bs());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].order);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        ASSERT_TRUE(rows[k].order);
        const double e0 = *rows[k - 1].report.error, e1 = *rows[k].report.error;
        EXPECT_DOUBLE_EQ(*rows[k].order, std::log2(e0 / e1));
    }
    RunConfig c = small_bs();
    c.nt_list = {8, 16};
    EXPECT_THROW((void)convergence_sweep(c), ConfigError);
    c = small_bs();
    c.reference.reset();
    EXPECT_THROW((void)convergence_sweep(c), ConfigError);
}

TEST(Convergence, DeepInTheMoneyHasZeroError) {
    // At s = 5 the exercise region covers the point for every N_t.
    RunConfig c = small_bs();
    c.eval = {5.0, 0.0};
    c.interpolation = Interpolation::Linear;
    c.reference = 95.0;
    const auto rows = convergence_sweep(c);
    for (const auto& row : rows) EXPECT_NEAR(*row.report.error, 0.0, 1e-12);
}

TEST(Sweeps, IterationMatrixAndSigma) {
    RunConfig c = small_bs();
    c.ns_list = {16, 32};
    c.nt_list = {4, 8};
    const auto grid = iteration_matrix(c);
    ASSERT_EQ(grid.size(), 4u);
    EXPECT_EQ(grid[1].ns, 32u);
    EXPECT_EQ(grid[2].nt, 8u);
    std::ostringstream out;
    write_iteration_matrix(out, grid);
    EXPECT_NE(out.str().find("16"), std::string::npos);

    c.sigma_list = {0.15, 0.5};
    const auto sweep = sigma_sweep(c);
    ASSERT_EQ(sweep.size(), 2u);
    EXPECT_EQ(sweep[1].sigma, 0.5);
    EXPECT_TRUE(sweep[0].error);
    EXPECT_FALSE(sweep[1].error);
    EXPECT_GT(sweep[1].value, sweep[0].value);
}

TEST(Output, CsvSchemaAndRoundTrip) {
    const RunConfig c = small_bs();
    const std::vector<SolveReport> reports{solve_once(c, Method::Pint, 8), solve_once(c, Method::Sequential, 8)};
    const std::string text = csv_of(reports);
    std::istringstream lines(text);
    std::string header, row;
    std::getline(lines, header);
    EXPECT_EQ(header, kCsvHeader);
    std::getline(lines, row);
    // model,method,N_s,N_v(empty),N_t
    EXPECT_EQ(row.rfind("ex1,pint,64,,8,", 0), 0u) << row;
    EXPECT_EQ(row.back(), ',');  // wall_seconds omitted

    std::istringstream in(text);
    const auto back = read_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].value, reports[0].value);
    EXPECT_EQ(back[0].gmres_total, reports[0].gmres_total);
    EXPECT_FALSE(back[1].gmres_total);
    EXPECT_FALSE(back[0].nv);
    EXPECT_EQ(csv_of(back), text);
}

TEST(Output, MarkdownAndJson) {
    const auto rep = solve_once(small_bs(), Method::Pint, 8);
    std::ostringstream md, js;
    write_markdown(md, {rep}, false);
    write_json(js, {rep}, false);
    EXPECT_EQ(md.str().rfind("| model", 0), 0u);
    const auto doc = nlohmann::json::parse(js.str());
    ASSERT_TRUE(doc.is_array());
    EXPECT_EQ(doc[0]["N_s"], 64);
    EXPECT_TRUE(doc[0]["N_v"].is_null());
    EXPECT_EQ(doc[0]["value"].get<double>(), rep.value);
    EXPECT_FALSE(doc[0].contains("wall_seconds") && !doc[0]["wall_seconds"].is_null());
}

TEST(Output, EmitErrors) {
    EXPECT_THROW(emit_report({}, ReportFormat::Csv, ""), std::invalid_argument);
    SolveReport r;
    EXPECT_THROW(emit_report({r}, ReportFormat::Csv, "/nonexistent/dir/out.csv"), std::runtime_error);
    std::istringstream bad("value\n1\n");
    EXPECT_THROW((void)read_csv(bad), std::invalid_argument);
}

TEST(Determinism, RepeatedRunsAndWorkers) {
    RunConfig c = small_bs();
    c.nt_list = {16};
    const std::string a = csv_of(run_example(c));
    const std::string b = csv_of(run_example(c));
    EXPECT_EQ(a, b);
    c.workers = 3;
    const auto three = run_example(c);
    c.workers = 1;
    const auto one = run_example(c);
    ASSERT_EQ(one[0].slice.size(), three[0].slice.size());
    for (std::size_t i = 0; i < one[0].slice.size(); ++i) EXPECT_NEAR(one[0].slice[i], three[0].slice[i], 1e-12);
}
