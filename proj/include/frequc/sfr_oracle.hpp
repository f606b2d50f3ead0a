#pragma once

// Time-domain reference simulator for the two-stage system frequency
// response (SFR) model with a governor dead band.
//
// Deviations use the under-frequency convention df = f0 - f >= 0. Stage 1
// (df below the dead band) has no primary response and is solved in closed
// form; stage 2 integrates the frequency and first-order governor states with
// fixed-step RK4, with inverter-based wind response algebraic in df.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace frequc::sfr {

struct Governor {
    std::string name;
    double response_time = 0.0;  ///< T_g, s
    double droop = 0.0;          ///< MW/Hz, already multiplied by commitment status
};

/// Optional saturation of each primary-response term (MW).
struct ReserveCaps {
    std::vector<double> governors;  ///< one per governor, same order
    double wind = 0.0;
};

struct SfrScenario {
    double inertia = 0.0;     ///< H_sys, MW*s/Hz
    double damping = 0.0;     ///< k_D * P_d, MW/Hz
    double imbalance = 0.0;   ///< power deficit, MW
    std::vector<Governor> governors;
    double wind_droop = 0.0;  ///< aggregate G_w, MW/Hz
    double dead_band = 0.0;   ///< Hz
    double horizon = 30.0;    ///< s
    std::optional<ReserveCaps> reserve_caps;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    /// Sum of governor droops plus wind droop.
    double total_droop() const;
};

/// Closed-form stage-1 solution.
struct Stage1 {
    double inertia = 0.0;
    double damping = 0.0;
    double imbalance = 0.0;
    std::optional<double> t_db;  ///< none when the dead band is never reached

    double deviation(double t) const;
    double slope(double t) const;
};

Stage1 stage1_analytic(const SfrScenario& s);

struct Trajectory {
    std::vector<std::string> governor_names;
    std::vector<double> t;
    std::vector<double> df;
    std::vector<std::vector<double>> pfr_g;  ///< [governor][sample]
    std::vector<double> pfr_w;
    std::optional<double> t_db;
    double initial_slope = 0.0;  ///< d(df)/dt at t=0
    double final_slope = 0.0;    ///< d(df)/dt at the last sample

    std::size_t size() const { return t.size(); }
    double pfr_total(std::size_t i) const;
};

struct Metrics {
    double rocof0 = 0.0;   ///< Hz/s
    double nadir_df = 0.0; ///< Hz
    double nadir_t = 0.0;  ///< s
    double qss_df = 0.0;   ///< Hz
    bool qss_converged = true;
};

/// Slope magnitude above which the end of the horizon is not treated as steady.
inline constexpr double kQssSlopeTol = 1e-4;

inline constexpr double kDefaultDt = 1e-3;

/// Simulate the event over [0, horizon] with step dt (dt <= horizon / 100).
/// Throws ConfigError for a bad step and NumericalError if the state blows up.
Trajectory simulate(const SfrScenario& s, double dt = kDefaultDt);

/// dP / (2 H_sys).
double rocof_initial(const SfrScenario& s);

/// Steady-state deviation implied by the stage-2 equilibrium, or the
/// damping-only equilibrium when that one stays inside the dead band.
double qss_closed_form(const SfrScenario& s);

Metrics metrics(const Trajectory& traj);

/// CSV with header `t,df_hz,pfr_total_mw,pfr_g_<name>...,pfr_w`.
std::string trajectory_csv(const Trajectory& traj);

SfrScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const SfrScenario& s);

}  // namespace frequc::sfr
