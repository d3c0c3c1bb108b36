#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace quantcert::cli {

/// Exit codes of the command-line tool.
inline constexpr int exit_yes = 0;
inline constexpr int exit_no = 1;
inline constexpr int exit_inconclusive = 2;
inline constexpr int exit_usage = 64;
inline constexpr int exit_internal = 70;

/// Everything that determines the output of a run. Embedded in every report
/// under "config"; feeding it back through --config reproduces the run.
/// Thread count and output path are excluded since they do not affect results.
struct RunConfig {
    std::string command;

    double theta = 0.0;
    double eta = 0.0;
    double delta = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::string strategy = "bincert";

    std::optional<double> bernoulli;
    std::optional<std::string> model;
    std::optional<std::string> center_file;
    std::size_t center_row = 0;
    std::optional<std::vector<double>> x0;
    std::string norm = "linf";
    std::optional<double> eps;
    std::optional<std::string> oracle_cmd;
    std::optional<std::size_t> reference_label;

    std::optional<std::vector<double>> eps_grid;
    std::optional<double> eps_lo;
    std::optional<double> eps_hi;
    std::optional<double> resolution;

    std::string p_grid = "0:1:0.05";
    std::uint64_t trials = 500;
    std::string format = "csv";

    std::uint64_t seed = 0;
    std::optional<std::uint64_t> max_samples;
    std::optional<double> max_wall_ms;
    std::size_t batch_size = 128;
    bool timing = true;
};

nlohmann::json config_to_json(const RunConfig& config);
/// Throws quantcert::Error{parse_error} on a malformed document.
RunConfig config_from_json(const nlohmann::json& j);

/// Runs one command. Reports go to `out` (or the --out file), diagnostics to
/// `err`. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace quantcert::cli
