#pragma once

// Frequency-constrained unit commitment: model assembly, solve, solution
// extraction, and oracle-based security validation.
//
// Hours are 0-based. Before hour 0 every unit is offline with no pending
// minimum up/down obligation and zero output. Start-up and shut-down
// indicators of hour h describe the transition from h-1 into h.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frequc/freq_algebra.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/milp.hpp"

namespace frequc::uc {

enum class Mode {
    no_freq,    ///< total reserve >= imbalance only
    freq_full,  ///< RoCoF, QSS, nadir and reserve-trajectory constraints
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string& name);

struct BuildOptions {
    Mode mode = Mode::freq_full;
    int bound_depth = 1;
    std::optional<freq::SegmentGrid> grid;  ///< default: policy horizon and fractions
};

/// Binaries fixed to given values (used by the enumeration oracle).
struct FixedBinaries {
    std::vector<std::vector<int>> commitment;  ///< [unit][hour]
    std::vector<std::vector<double>> droop;    ///< [farm][hour], MW/Hz
};

/// MILP plus the handles needed to read a solution back.
struct UcModel {
    milp::MilpModel model;
    Mode mode = Mode::freq_full;
    int hours = 0;
    freq::SegmentGrid grid;
    std::vector<std::vector<milp::LinExpr>> commit;     ///< [unit][hour]
    std::vector<std::vector<milp::LinExpr>> startup;    ///< [unit][hour]
    std::vector<std::vector<milp::LinExpr>> shutdown;   ///< [unit][hour]
    std::vector<std::vector<milp::VarId>> power;        ///< [unit][hour]
    std::vector<std::vector<milp::VarId>> reserve;      ///< [unit][hour]
    std::vector<std::vector<std::vector<milp::VarId>>> segment;  ///< [unit][hour][k]
    std::vector<std::vector<milp::VarId>> wind_power;   ///< [farm][hour]
    std::vector<std::vector<milp::VarId>> wind_reserve; ///< [farm][hour]
    std::vector<std::vector<milp::LinExpr>> droop;      ///< [farm][hour], MW/Hz
    std::vector<std::vector<double>> threshold;         ///< [farm][hour] DRCC rhs, MW
    std::vector<std::vector<bool>> threshold_clipped;   ///< [farm][hour]
    std::vector<freq::FreqBlock> blocks;                ///< [hour], freq_full with free binaries
    /// Rows whose every term is constant; the model is infeasible if one fails.
    std::vector<std::string> violated_constant_rows;
};

/// Assemble the model. Throws ValidationError for an invalid system and
/// ConfigError for bad options.
UcModel build(const grid::PowerSystem& sys, const BuildOptions& options);

/// Same constraint set with every binary replaced by a constant.
UcModel build_fixed(const grid::PowerSystem& sys, const BuildOptions& options,
                    const FixedBinaries& fixed);

struct CostBreakdown {
    double startup_shutdown = 0.0;
    double fuel = 0.0;
    double thermal_reserve = 0.0;
    double wind_reserve = 0.0;
    double total() const { return startup_shutdown + fuel + thermal_reserve + wind_reserve; }
};

struct UcSolution {
    std::string mode;
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    double objective = 0.0;
    double gap = 0.0;
    double wall_time = 0.0;
    CostBreakdown cost;
    int hours = 0;
    std::vector<std::string> unit_ids;
    std::vector<std::string> farm_ids;
    std::vector<std::vector<int>> commitment;     ///< [unit][hour]
    std::vector<std::vector<int>> startup;        ///< [unit][hour]
    std::vector<std::vector<int>> shutdown;       ///< [unit][hour]
    std::vector<std::vector<double>> dispatch;    ///< [unit][hour]
    std::vector<std::vector<double>> reserve;     ///< [unit][hour]
    std::vector<std::vector<double>> wind_power;  ///< [farm][hour]
    std::vector<std::vector<double>> wind_reserve;
    std::vector<std::vector<double>> droop;       ///< [farm][hour]
    std::vector<std::vector<double>> threshold;   ///< [farm][hour]

    bool has_schedule() const { return !commitment.empty(); }
};

/// Solve and extract. An infeasible or timed-out solve returns a solution
/// with the status set and no schedule.
UcSolution solve(const UcModel& model, const grid::PowerSystem& sys, milp::SolverBackend& backend,
                 const milp::SolveOptions& options);

struct HourSecurity {
    int hour = 0;
    double imbalance = 0.0;
    double inertia = 0.0;
    double droop = 0.0;  ///< G_sys
    double rocof = 0.0;
    double nadir = 0.0;
    double nadir_t = 0.0;
    double qss = 0.0;
    bool qss_converged = true;
    double reserve_excess = 0.0;  ///< max over resources of simulated PFR minus reserve, MW
    bool rocof_ok = true;
    bool nadir_ok = true;
    bool qss_ok = true;
    bool reserve_ok = true;

    bool pass() const { return rocof_ok && nadir_ok && qss_ok; }
};

struct SecurityReport {
    double tolerance = 0.01;  ///< relative slack on the limits
    double rocof_limit = 0.0;
    double nadir_limit = 0.0;
    double qss_limit = 0.0;
    std::vector<HourSecurity> hours;

    bool all_pass() const;
    int failures() const;
    double max_rocof() const;
    double max_nadir() const;
    double max_qss() const;
};

/// Simulate the event of every hour for the scheduled commitment and droop.
SecurityReport validate(const UcSolution& sol, const grid::PowerSystem& sys,
                        double tolerance = 0.01, double dt = 1e-3);

/// Independent re-checks of a schedule.
struct Audit {
    double balance = 0.0;  ///< max |generation - load|, MW
    double drcc = 0.0;     ///< max (P_w + R_w - threshold), MW
    double cost = 0.0;     ///< |breakdown total - objective| / max(1, |objective|)
    std::vector<std::string> commitment;  ///< logic or min up/down violations
};

Audit audit(const UcSolution& sol, const grid::PowerSystem& sys);

struct BruteForceResult {
    bool feasible = false;
    double objective = 0.0;
    FixedBinaries best;
    int assignments = 0;  ///< enumerated binary assignments
    int lp_solves = 0;
};

/// Enumerate every commitment and droop choice and solve each restriction
/// as an LP. Refuses (ConfigError) more than 2 units, 3 hours or 4 droop
/// levels per farm.
BruteForceResult brute_force_small(const grid::PowerSystem& sys, const BuildOptions& options,
                                   milp::SolverBackend& backend);

nlohmann::json solution_to_json(const UcSolution& sol, const SecurityReport* report = nullptr);
UcSolution solution_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const SecurityReport& report);
SecurityReport report_from_json(const nlohmann::json& j);

}  // namespace frequc::uc
