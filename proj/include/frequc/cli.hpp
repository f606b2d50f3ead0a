#pragma once

// Batch front end: simulate, tightness, solve, report.
//
// Exit codes: 0 success, 1 internal error, 2 bad input or configuration,
// 3 infeasible model, 4 time limit reached without any incumbent.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace frequc::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kBadInput = 2,
    kInfeasible = 3,
    kNoIncumbent = 4,
};

struct RunConfig {
    std::string command;
    std::vector<std::filesystem::path> inputs;  ///< report accepts several
    std::filesystem::path output = ".";
    std::string mode = "freq_full";
    std::optional<int> segments;
    int bound_depth = 1;
    std::optional<std::string> drcc_strategy;
    double gap = 1e-3;
    double time_limit = 3600.0;
    double dt = 1e-3;
    int jobs = 1;
    std::optional<int> hour;           ///< 1-based, simulate from a system
    std::optional<double> imbalance;   ///< MW override for simulate
    std::optional<std::filesystem::path> solution;  ///< schedule for simulate
    bool quiet = false;

    /// Type and range checks done before any compute; throws ConfigError.
    void validate() const;
};

int cmd_simulate(const RunConfig& cfg);
int cmd_tightness(const RunConfig& cfg);
int cmd_solve(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

/// Parse arguments, dispatch, and map exceptions to exit codes.
int main(int argc, const char* const* argv);

}  // namespace frequc::cli
