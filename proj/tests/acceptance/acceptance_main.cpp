#include "sll/acceptance.hpp"
#include "sll/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite: one pass/fail line per criterion", "sll_acceptance"};
    sll::AcceptanceOptions opts;
    std::string report_path;
    app.add_flag("--fast", opts.fast, "coarse-mesh subset of the mesh-independent criteria");
    app.add_option("--criteria", opts.criteria, "criterion ids to run (default: all)")
        ->delimiter(',')
        ->check(CLI::Range(1, sll::kCriterionCount));
    app.add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--report", report_path, "write the merged rows as CSV to this file");
    CLI11_PARSE(app, argc, argv);

    std::vector<sll::CriterionResult> results;
    std::vector<int> ids = opts.criteria;
    if (ids.empty()) ids = opts.fast ? sll::fast_criteria() : std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    bool all = true;
    for (int id : ids) {
        sll::AcceptanceOptions one = opts;
        results.push_back(sll::run_criterion(id, one));
        const auto& r = results.back();
        std::cout << sll::summary_line(r) << std::endl;
        for (const auto& row : r.report.rows) {
            if (!row.pass) {
                std::cout << "    failing row " << row.experiment << "  " << row.inputs << "  computed=" << row.computed
                          << " reference=" << row.reference << " error=" << row.error
                          << " tolerance=" << row.tolerance << '\n';
            }
        }
        all = all && r.pass();
    }
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        sll::write_report_csv(os, sll::merge_results(results, true));
    }
    std::cout << (all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
    return all ? 0 : 1;
}
