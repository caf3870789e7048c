#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sll {

inline constexpr const char* kReportSchema = "sll-report/1";

/// How `pass` follows from the row: `le` means error <= tolerance, `ge`
/// means error >= tolerance, `info` rows are observations and always pass.
enum class PassRule { le, ge, info };

struct ReportRow {
    std::string experiment;
    std::string inputs;
    double computed = 0.0;
    double reference = 0.0;
    double error = 0.0;
    double tolerance = 0.0;
    PassRule rule = PassRule::le;
    bool pass = true;
    double wall_time = 0.0;
};

/// Evaluates the pass rule of a row.
bool row_passes(const ReportRow& row);
/// Builds a row and sets `pass` from its own columns.
ReportRow make_row(std::string experiment, std::string inputs, double computed, double reference, double error,
                   double tolerance, PassRule rule = PassRule::le);

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::string generated_at; // empty in --no-timestamps mode

    [[nodiscard]] bool verdict() const;
    void append(const ExperimentReport& other);
};

std::string rule_name(PassRule rule);
PassRule rule_from_name(const std::string& name);

/// CSV: the schema string on the first row, then a header and one line per
/// row. Floats use 17 significant digits. `timestamps` false drops wall times.
void write_report_csv(std::ostream& os, const ExperimentReport& report, bool timestamps = true);
void write_report_json(std::ostream& os, const ExperimentReport& report, bool timestamps = true);
ExperimentReport read_report_json(std::istream& is);

/// One eigenvalue per line, 17 significant digits.
void write_spectrum(std::ostream& os, const std::vector<double>& values);

std::string format_double(double v);
std::string current_timestamp();

} // namespace sll
