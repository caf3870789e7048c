#pragma once

#include "sll/assembly.hpp"
#include "sll/geometry.hpp"
#include "sll/report.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sll {

enum class Command { mesh, solve, sweep, penalty, heat_trace, verify };
enum class VerifySub { sandwich, identity, chain, monotone, all };
enum class OutputFormat { csv, json };

struct RunConfig {
    Command command = Command::solve;
    VerifySub sub = VerifySub::all;
    std::string op = "scalar_dirichlet";
    std::string domain = "square"; // square | disk | annulus:R | polygon:FILE
    double mu = 1.0;
    double lambda = 0.0;
    std::vector<double> lambda_grid; // in units of mu; empty selects the command default
    int k = 10;
    int levels = 3;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::csv;
    int workers = 1;
    bool fast = false;
    DivergenceMode projected_div = DivergenceMode::automatic;
    bool timestamps = true;
    bool analytic = false; // heat-trace on the exact square spectrum

    bool operator==(const RunConfig&) const = default;
};

std::string command_name(Command c);
Command command_from_name(const std::string& name);
std::string verify_sub_name(VerifySub s);
VerifySub verify_sub_from_name(const std::string& name);

/// Every field is written, so parsing the output reproduces the config.
std::string config_to_json(const RunConfig& config);
/// Fields missing from the document keep the values already in `base`.
/// Unknown fields, wrong types and syntax errors throw ParseError naming the
/// field or the line and column.
RunConfig config_from_json(const std::string& text, const RunConfig& base = {});
RunConfig load_config_file(const std::string& path, const RunConfig& base = {});

DomainSpec parse_domain(const std::string& selector);
DivergenceMode parse_div_mode(const std::string& value); // on | off | auto
std::vector<double> parse_grid(const std::string& list);  // "a,b,c"

/// Error raised by `run` with the id of the failing experiment.
class ExperimentError : public std::runtime_error {
public:
    ExperimentError(const std::string& experiment, const std::string& what)
        : std::runtime_error("experiment " + experiment + ": " + what), experiment_(experiment) {}
    [[nodiscard]] const std::string& experiment() const noexcept { return experiment_; }

private:
    std::string experiment_;
};

/// Dispatches the command, writes report.csv or report.json plus the command's
/// data files into `output_dir`, and returns the report.
ExperimentReport run(const RunConfig& config);

} // namespace sll
