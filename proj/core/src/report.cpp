#include "sll/report.hpp"

#include "sll/error.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sll {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

double from_number(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw ParseError("expected a number, got '" + s + "'");
}

} // namespace

bool row_passes(const ReportRow& row) {
    switch (row.rule) {
    case PassRule::le: return row.error <= row.tolerance;
    case PassRule::ge: return row.error >= row.tolerance;
    case PassRule::info: return true;
    }
    return false;
}

ReportRow make_row(std::string experiment, std::string inputs, double computed, double reference, double error,
                   double tolerance, PassRule rule) {
    ReportRow r;
    r.experiment = std::move(experiment);
    r.inputs = std::move(inputs);
    r.computed = computed;
    r.reference = reference;
    r.error = error;
    r.tolerance = tolerance;
    r.rule = rule;
    r.pass = row_passes(r);
    return r;
}

bool ExperimentReport::verdict() const {
    for (const auto& r : rows) {
        if (!r.pass) return false;
    }
    return true;
}

void ExperimentReport::append(const ExperimentReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string rule_name(PassRule rule) {
    switch (rule) {
    case PassRule::le: return "le";
    case PassRule::ge: return "ge";
    case PassRule::info: return "info";
    }
    return "?";
}

PassRule rule_from_name(const std::string& name) {
    if (name == "le") return PassRule::le;
    if (name == "ge") return PassRule::ge;
    if (name == "info") return PassRule::info;
    throw ParseError("unknown pass rule '" + name + "'");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

std::string current_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_report_csv(std::ostream& os, const ExperimentReport& report, bool timestamps) {
    os << kReportSchema << '\n';
    os << "experiment,inputs,computed,reference,error,tolerance,rule,pass,wall_time\n";
    for (const auto& r : report.rows) {
        os << csv_field(r.experiment) << ',' << csv_field(r.inputs) << ',' << format_double(r.computed) << ','
           << format_double(r.reference) << ',' << format_double(r.error) << ',' << format_double(r.tolerance)
           << ',' << rule_name(r.rule) << ',' << (r.pass ? "true" : "false") << ','
           << format_double(timestamps ? r.wall_time : 0.0) << '\n';
    }
}

void write_report_json(std::ostream& os, const ExperimentReport& report, bool timestamps) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    if (timestamps && !report.generated_at.empty()) j["generated_at"] = report.generated_at;
    j["verdict"] = report.verdict();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["experiment"] = r.experiment;
        row["inputs"] = r.inputs;
        row["computed"] = number(r.computed);
        row["reference"] = number(r.reference);
        row["error"] = number(r.error);
        row["tolerance"] = number(r.tolerance);
        row["rule"] = rule_name(r.rule);
        row["pass"] = r.pass;
        row["wall_time"] = timestamps ? r.wall_time : 0.0;
        rows.push_back(row);
    }
    j["rows"] = rows;
    os << j.dump(2) << '\n';
}

ExperimentReport read_report_json(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report json: ") + e.what());
    }
    if (j.value("schema", "") != kReportSchema) throw ParseError("report json: unknown schema");
    ExperimentReport rep;
    rep.generated_at = j.value("generated_at", "");
    for (const auto& row : j.at("rows")) {
        ReportRow r;
        r.experiment = row.at("experiment").get<std::string>();
        r.inputs = row.at("inputs").get<std::string>();
        r.computed = from_number(row.at("computed"));
        r.reference = from_number(row.at("reference"));
        r.error = from_number(row.at("error"));
        r.tolerance = from_number(row.at("tolerance"));
        r.rule = rule_from_name(row.at("rule").get<std::string>());
        r.pass = row.at("pass").get<bool>();
        r.wall_time = row.at("wall_time").get<double>();
        rep.rows.push_back(r);
    }
    return rep;
}

void write_spectrum(std::ostream& os, const std::vector<double>& values) {
    for (double v : values) os << format_double(v) << '\n';
}

} // namespace sll
