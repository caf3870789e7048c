#include "sll/error.hpp"
#include "sll/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <set>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

const char* kUsage = R"(usage: sll <command> [flags]

commands:
  mesh         generate the mesh at --levels and write it to --out
  solve        spectrum of --op at levels L-2..L with Richardson extrapolation
  sweep        Lame eigenvalues over a lambda grid on one mesh, with monotonicity rows
  penalty      Stokes eigenvalues through the projected Lame penalty (--lambda >= 10 mu)
  heat-trace   partition function and three-term fit (--analytic for the exact square spectrum)
  verify       --sub sandwich | identity | chain | monotone | all

common flags:
  --config FILE  --domain {square|disk|annulus:R|polygon:FILE}  --op NAME  --mu F
  --lambda F  --lambda-grid F,F,...  --k N  --levels N  --out DIR  --format {csv|json}
  --workers N  --fast  --projected-div {on|off|auto}  --no-timestamps  --dump-config

Flags override fields of the --config JSON document, which override the defaults.
Exit status: 0 all rows pass, 1 some row fails, 2 usage or config error, 3 run error.
)";

} // namespace

int main(int argc, char** argv) {
    const std::set<std::string> commands{"mesh", "solve", "sweep", "penalty", "heat-trace", "verify"};
    if (argc < 2) {
        std::cerr << kUsage;
        return kExitUsage;
    }
    const std::string first = argv[1];
    if (first == "-h" || first == "--help") {
        std::cout << kUsage;
        return 0;
    }
    if (!commands.count(first)) {
        std::cerr << "sll: unknown command '" << first << "'\n\n" << kUsage;
        return kExitUsage;
    }

    CLI::App app{"Spectral experiments for the Lame, Stokes and buckling operators", "sll"};
    app.require_subcommand(1);

    std::string config_path;
    std::string op;
    std::string domain;
    double mu = 0.0;
    double lambda = 0.0;
    std::string grid;
    int k = 0;
    int levels = 0;
    std::string out;
    std::string format;
    int workers = 0;
    bool fast = false;
    std::string projected;
    bool no_timestamps = false;
    bool dump = false;
    std::string sub;
    bool analytic = false;

    auto* cfg_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* op_opt = app.add_option("--op", op, "operator name");
    auto* dom_opt = app.add_option("--domain", domain, "square | disk | annulus:R | polygon:FILE");
    auto* mu_opt = app.add_option("--mu", mu, "shear modulus");
    auto* lam_opt = app.add_option("--lambda", lambda, "first Lame parameter");
    auto* grid_opt = app.add_option("--lambda-grid", grid, "comma-separated lambda grid in units of mu");
    auto* k_opt = app.add_option("--k", k, "number of eigenvalues");
    auto* lev_opt = app.add_option("--levels", levels, "finest refinement level");
    auto* out_opt = app.add_option("--out", out, "output directory");
    auto* fmt_opt = app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    auto* w_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    auto* fast_opt = app.add_flag("--fast", fast, "coarse-mesh acceptance subset");
    auto* pd_opt = app.add_option("--projected-div", projected, "on | off | auto")
                       ->check(CLI::IsMember({"on", "off", "auto"}));
    auto* nts_opt = app.add_flag("--no-timestamps", no_timestamps, "omit timestamps and wall times");
    app.add_flag("--dump-config", dump, "print the effective configuration and exit");

    std::map<std::string, CLI::App*> subs;
    for (const auto& name : commands) {
        auto* s = app.add_subcommand(name, name);
        s->fallthrough();
        subs[name] = s;
    }
    auto* sub_opt = subs["verify"]->add_option("--sub", sub, "sandwich | identity | chain | monotone | all")
                        ->check(CLI::IsMember({"sandwich", "identity", "chain", "monotone", "all"}));
    auto* an_opt = subs["heat-trace"]->add_flag("--analytic", analytic, "use the exact square spectrum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << kUsage;
            return 0;
        }
        std::cerr << "sll: " << e.what() << "\n\n" << kUsage;
        return kExitUsage;
    }

    sll::RunConfig cfg;
    try {
        if (*cfg_opt) cfg = sll::load_config_file(config_path, cfg);
        cfg.command = sll::command_from_name(first);
        if (*op_opt) cfg.op = op;
        if (*dom_opt) cfg.domain = domain;
        if (*mu_opt) cfg.mu = mu;
        if (*lam_opt) cfg.lambda = lambda;
        if (*grid_opt) cfg.lambda_grid = sll::parse_grid(grid);
        if (*k_opt) cfg.k = k;
        if (*lev_opt) cfg.levels = levels;
        if (*out_opt) cfg.output_dir = out;
        if (*fmt_opt) cfg.format = format == "csv" ? sll::OutputFormat::csv : sll::OutputFormat::json;
        if (*w_opt) cfg.workers = workers;
        if (*fast_opt) cfg.fast = fast;
        if (*pd_opt) cfg.projected_div = sll::parse_div_mode(projected);
        if (*nts_opt) cfg.timestamps = !no_timestamps;
        if (*sub_opt) cfg.sub = sll::verify_sub_from_name(sub);
        if (*an_opt) cfg.analytic = analytic;
    } catch (const std::exception& e) {
        std::cerr << "sll: " << e.what() << '\n';
        return kExitUsage;
    }
    if (dump) {
        std::cout << sll::config_to_json(cfg) << '\n';
        return 0;
    }

    sll::ExperimentReport report;
    try {
        report = sll::run(cfg);
    } catch (const sll::ExperimentError& e) {
        std::cerr << "sll: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "sll: " << e.what() << '\n';
        return kExitError;
    }

    std::size_t failed = 0;
    for (const auto& row : report.rows) {
        if (row.pass) continue;
        ++failed;
        std::cout << "FAIL " << row.experiment << "  " << row.inputs << "  error=" << row.error
                  << " tolerance=" << row.tolerance << " (" << sll::rule_name(row.rule) << ")\n";
    }
    std::cout << report.rows.size() << " rows, " << failed << " failing; report written to " << cfg.output_dir
              << '\n';
    return report.verdict() ? 0 : kExitFail;
}
