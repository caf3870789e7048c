#pragma once

#include "sll/report.hpp"

#include <string>
#include <vector>

namespace sll {

struct AcceptanceOptions {
    bool fast = false;          // coarse-mesh subset of the mesh-independent criteria
    int workers = 1;
    std::vector<int> criteria;  // empty: all (or the fast subset)
};

struct CriterionResult {
    int id = 0;
    std::string title;
    ExperimentReport report;
    double wall_time = 0.0;
    double budget = 0.0; // seconds
    std::string error;   // set when the criterion threw

    [[nodiscard]] bool within_budget() const { return wall_time <= budget; }
    [[nodiscard]] bool pass() const { return error.empty() && report.verdict() && within_budget(); }
};

inline constexpr int kCriterionCount = 11;

std::vector<int> fast_criteria();
std::string criterion_title(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Concatenated rows of all criteria. With `timestamps`, one runtime row per
/// criterion (wall time against the budget) is appended.
ExperimentReport merge_results(const std::vector<CriterionResult>& results, bool timestamps);

/// "criterion N  PASS|FAIL  title  (rows, seconds)"
std::string summary_line(const CriterionResult& result);

} // namespace sll
