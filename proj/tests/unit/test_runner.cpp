#include "sll/acceptance.hpp"
#include "sll/error.hpp"
#include "sll/report.hpp"
#include "sll/runner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sll;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sll_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST(Report, PassFlagFollowsRule) {
    EXPECT_TRUE(make_row("a", "", 1, 1, 0.001, 0.01).pass);
    EXPECT_FALSE(make_row("a", "", 1, 1, 0.1, 0.01).pass);
    EXPECT_TRUE(make_row("a", "", 1, 1, 0.0, -1e-3, PassRule::ge).pass);
    EXPECT_FALSE(make_row("a", "", 1, 1, -0.1, -1e-3, PassRule::ge).pass);
    EXPECT_TRUE(make_row("a", "", 1, NAN, NAN, NAN, PassRule::info).pass);
    EXPECT_FALSE(make_row("a", "", 1, 1, NAN, 0.01).pass);
}

TEST(Report, CsvHasSchemaAndFullPrecision) {
    ExperimentReport rep;
    rep.rows.push_back(make_row("x.y", "a, \"b\"", 0.1, 1.0 / 3.0, 0.0, 1e-9));
    std::ostringstream os;
    write_report_csv(os, rep);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, kReportSchema);
    std::getline(is, line);
    EXPECT_EQ(line, "experiment,inputs,computed,reference,error,tolerance,rule,pass,wall_time");
    std::getline(is, line);
    EXPECT_NE(line.find("\"a, \"\"b\"\"\""), std::string::npos);
    EXPECT_NE(line.find("0.33333333333333331"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
    ExperimentReport rep;
    rep.generated_at = "2026-01-01T00:00:00Z";
    rep.rows.push_back(make_row("r1", "in", 1.0 / 7.0, 2.0, 3e-17, 1e-3));
    rep.rows.push_back(make_row("r2", "in", NAN, INFINITY, -INFINITY, NAN, PassRule::info));
    rep.rows.back().wall_time = 1.25;
    std::stringstream ss;
    write_report_json(ss, rep);
    const auto back = read_report_json(ss);
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_EQ(back.generated_at, rep.generated_at);
    EXPECT_EQ(back.rows[0].computed, rep.rows[0].computed);
    EXPECT_EQ(back.rows[0].error, rep.rows[0].error);
    EXPECT_TRUE(std::isnan(back.rows[1].computed));
    EXPECT_EQ(back.rows[1].reference, INFINITY);
    EXPECT_EQ(back.rows[1].rule, PassRule::info);
    EXPECT_EQ(back.rows[1].wall_time, 1.25);
    for (const auto& r : back.rows) EXPECT_EQ(r.pass, row_passes(r));
}

TEST(Config, JsonRoundTripIsLossless) {
    RunConfig c;
    c.command = Command::verify;
    c.sub = VerifySub::chain;
    c.op = "lame_traction";
    c.domain = "annulus:0.25";
    c.mu = 0.1;
    c.lambda = 1.0 / 3.0;
    c.lambda_grid = {-0.5, 0.0, 1e4};
    c.k = 7;
    c.levels = 2;
    c.output_dir = "out dir";
    c.format = OutputFormat::json;
    c.workers = 3;
    c.fast = true;
    c.projected_div = DivergenceMode::projected;
    c.timestamps = false;
    c.analytic = true;
    EXPECT_EQ(config_from_json(config_to_json(c)), c);
    EXPECT_EQ(config_from_json(config_to_json(RunConfig{})), RunConfig{});
}

TEST(Config, MissingFieldsKeepBase) {
    RunConfig base;
    base.k = 12;
    const auto c = config_from_json(R"({"mu": 2.5})", base);
    EXPECT_EQ(c.mu, 2.5);
    EXPECT_EQ(c.k, 12);
}

TEST(Config, Diagnostics) {
    auto message = [](const std::string& text) {
        try {
            config_from_json(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("").find("empty"), std::string::npos);
    EXPECT_NE(message("{\n  \"k\": 4,\n  \"mu\" 1\n}").find("line 3"), std::string::npos);
    EXPECT_NE(message(R"({"k": 2.5})").find("'k'"), std::string::npos);
    EXPECT_NE(message(R"({"mu": "one"})").find("'mu'"), std::string::npos);
    EXPECT_NE(message(R"({"colour": 1})").find("unknown field"), std::string::npos);
    EXPECT_NE(message(R"({"command": "dance"})").find("'command'"), std::string::npos);
    EXPECT_NE(message("[1, 2]").find("object"), std::string::npos);
}

TEST(Config, DomainAndGridParsing) {
    EXPECT_EQ(parse_domain("square").kind, DomainKind::unit_square);
    EXPECT_EQ(parse_domain("disk").kind, DomainKind::unit_disk);
    EXPECT_DOUBLE_EQ(parse_domain("annulus:0.4").inner_radius, 0.4);
    EXPECT_THROW(parse_domain("annulus:x"), InvalidArgument);
    EXPECT_THROW(parse_domain("triangle"), InvalidArgument);
    EXPECT_EQ(parse_grid("-1.5,0,1e4"), (std::vector<double>{-1.5, 0.0, 1e4}));
    EXPECT_THROW(parse_grid("1,,2"), InvalidArgument);
    EXPECT_EQ(parse_div_mode("on"), DivergenceMode::projected);
    EXPECT_THROW(parse_div_mode("maybe"), InvalidArgument);
}

TEST(Runner, SolveScalarDirichletSquare) {
    RunConfig c;
    c.command = Command::solve;
    c.op = "scalar_dirichlet";
    c.domain = "square";
    c.levels = 3;
    c.k = 4;
    c.timestamps = false;
    c.output_dir = scratch_dir("solve").string();
    const auto rep = run(c);
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_TRUE(rep.verdict());
    for (int level = 1; level <= 3; ++level) {
        EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / ("spectrum_scalar_dirichlet_square_L" + std::to_string(level) + ".txt")));
    }
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "report.csv"));
}

TEST(Runner, VerifyMonotoneRowsPass) {
    RunConfig c;
    c.command = Command::verify;
    c.sub = VerifySub::monotone;
    c.levels = 1;
    c.k = 5;
    c.timestamps = false;
    c.output_dir = scratch_dir("monotone").string();
    const auto rep = run(c);
    // 7 lambda pairs x 5 eigenvalues x 2 boundary conditions.
    EXPECT_EQ(rep.rows.size(), 70u);
    EXPECT_TRUE(rep.verdict());
}

TEST(Runner, OutputIsBitwiseReproducible) {
    RunConfig c;
    c.command = Command::sweep;
    c.levels = 1;
    c.k = 4;
    c.lambda_grid = {0.0, 1.0, 1e3};
    c.timestamps = false;
    c.format = OutputFormat::json;
    c.output_dir = scratch_dir("repro_a").string();
    run(c);
    const std::string a = slurp(fs::path(c.output_dir) / "report.json");
    const std::string sa = slurp(fs::path(c.output_dir) / "sweep.csv");
    c.output_dir = scratch_dir("repro_b").string();
    run(c);
    EXPECT_EQ(a, slurp(fs::path(c.output_dir) / "report.json"));
    EXPECT_EQ(sa, slurp(fs::path(c.output_dir) / "sweep.csv"));
}

TEST(Runner, HeatTraceAnalytic) {
    RunConfig c;
    c.command = Command::heat_trace;
    c.analytic = true;
    c.k = 10000;
    c.timestamps = false;
    c.output_dir = scratch_dir("heat").string();
    const auto rep = run(c);
    EXPECT_TRUE(rep.verdict());
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "Zt.dat"));
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "fit.csv"));
}

TEST(Runner, ErrorsNameTheExperiment) {
    RunConfig c;
    c.command = Command::penalty;
    c.lambda = 1.0; // below the 10 mu floor
    c.levels = 0;
    c.output_dir = scratch_dir("penalty").string();
    try {
        run(c);
        FAIL() << "expected ExperimentError";
    } catch (const ExperimentError& e) {
        EXPECT_EQ(e.experiment(), "penalty");
    }
}

TEST(Runner, HeatTraceRejectsTruncatedSpectrum) {
    RunConfig c;
    c.command = Command::heat_trace;
    c.analytic = true;
    c.k = 10;
    c.output_dir = scratch_dir("heat_short").string();
    try {
        run(c);
        FAIL() << "expected ExperimentError";
    } catch (const ExperimentError& e) {
        EXPECT_EQ(e.experiment(), "heat-trace");
        EXPECT_NE(std::string(e.what()).find("--k"), std::string::npos);
    }
}

TEST(Acceptance, FastSubsetAndTitles) {
    EXPECT_EQ(fast_criteria(), (std::vector<int>{1, 3, 8, 10, 11}));
    for (int i = 1; i <= kCriterionCount; ++i) EXPECT_FALSE(criterion_title(i).empty());
    EXPECT_THROW(criterion_title(0), InvalidArgument);
}

TEST(Acceptance, CoefficientCriterionPasses) {
    AcceptanceOptions opts;
    const auto r = run_criterion(10, opts);
    EXPECT_TRUE(r.error.empty());
    EXPECT_TRUE(r.report.verdict());
    const auto merged = merge_results({r}, false);
    EXPECT_EQ(merged.rows.size(), r.report.rows.size());
    EXPECT_NE(summary_line(r).find("PASS"), std::string::npos);
}
