#pragma once

// Power-system data: thermal units, wind farms, DC network with shift
// factors, hourly load, and the frequency-security policy. Hours are
// 0-based in the API and 1-based in files and reports.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frequc/risk.hpp"

namespace frequc::grid {

struct ThermalUnit {
    std::string id;
    std::string bus;
    double p_max = 0.0;          ///< MW
    double p_min = 0.0;          ///< MW
    double inertia_const = 0.0;  ///< s, machine base
    double resp_const = 0.0;     ///< governor response time T_g, s
    double droop = 0.0;          ///< MW/Hz
    double ramp_up = 0.0;        ///< MW/h
    double ramp_down = 0.0;      ///< MW/h
    double ramp_startup = 0.0;   ///< MW
    double ramp_shutdown = 0.0;  ///< MW
    int min_up = 1;              ///< h
    int min_down = 1;            ///< h
    double cost_startup = 0.0;   ///< $
    double cost_shutdown = 0.0;  ///< $
    double cost_online = 0.0;    ///< $/h
    double reserve_cost = 0.0;   ///< $/MWh
    std::vector<double> fuel_segments;  ///< incremental cost per segment, $/MWh

    friend bool operator==(const ThermalUnit&, const ThermalUnit&) = default;
};

struct WindFarm {
    std::string id;
    std::string bus;
    double capacity = 0.0;       ///< MW
    double inertia_const = 0.0;  ///< s, virtual inertia on the farm rating
    double droop_min = 0.0;      ///< MW/Hz
    double droop_max = 0.0;      ///< MW/Hz
    double droop_step = 1.0;     ///< MW/Hz
    double droop_default = 0.0;  ///< MW/Hz, used when droop is not optimized
    double reserve_cost = 0.0;   ///< $/MWh
    std::vector<double> forecast;  ///< per-hour mean, MW
    std::vector<double> sigma;     ///< per-hour standard deviation, MW

    friend bool operator==(const WindFarm&, const WindFarm&) = default;
};

struct Line {
    std::string id;
    std::string from;
    std::string to;
    double reactance = 0.0;  ///< p.u.
    double limit = 0.0;      ///< MW

    friend bool operator==(const Line&, const Line&) = default;
};

struct Network {
    std::vector<std::string> buses;
    std::vector<Line> lines;
    std::string slack_bus;
    Eigen::MatrixXd ptdf;  ///< lines x buses
    bool ptdf_from_file = false;

    int bus_index(const std::string& bus) const;  ///< -1 if absent
};

bool operator==(const Network& a, const Network& b);

struct FrequencyPolicy {
    double f0 = 50.0;            ///< Hz
    double dead_band = 0.0;      ///< Hz
    double damping_frac = 0.0;   ///< fraction of load per Hz
    double rocof_max = 0.0;      ///< Hz/s
    double nadir_max = 0.0;      ///< Hz
    double qss_max = 0.0;        ///< Hz
    double imbalance_frac = 0.0; ///< fraction of hourly load
    double horizon = 30.0;       ///< s
    std::vector<double> segment_fracs{0.1, 0.2, 0.3, 0.4};

    friend bool operator==(const FrequencyPolicy&, const FrequencyPolicy&) = default;
};

struct PowerSystem {
    std::vector<ThermalUnit> units;
    std::vector<WindFarm> winds;
    Network network;
    std::vector<std::vector<double>> load;  ///< [bus index][hour], MW
    int hours = 0;
    FrequencyPolicy policy;
    risk::RiskConfig risk;
    double wind_sigma_frac = 0.05;

    double total_load(int hour) const;
    double peak_load() const;
    int peak_hour() const;

    /// Re-check every invariant; throws ValidationError naming the entity.
    void validate() const;
};

bool operator==(const PowerSystem& a, const PowerSystem& b);

/// Read units.csv, fuel.csv, wind.csv, wind_profile.csv, lines.csv, load.csv,
/// policy.json and (optionally) ptdf.csv from `dir`, then validate.
PowerSystem load_system(const std::filesystem::path& dir);

/// Write the file set read by load_system (full precision).
void save_system(const PowerSystem& sys, const std::filesystem::path& dir);

/// DC shift factors (lines x buses) with a zero slack column.
/// Throws ValidationError for a disconnected network or a non-positive reactance.
Eigen::MatrixXd compute_ptdf(const Network& net);

/// Line flows for a per-bus net injection vector.
Eigen::VectorXd line_flows(const Network& net, const Eigen::VectorXd& injection);

struct EventParams {
    double imbalance = 0.0;  ///< MW
    double damping = 0.0;    ///< k_D * P_d, MW/Hz
};

EventParams event_params(const PowerSystem& sys, int hour);

/// Inertia constant (s) on `capacity` converted to MW*s/Hz.
double inertia_mwspherz(double inertia_const, double capacity, double f0);

double unit_inertia(const PowerSystem& sys, const ThermalUnit& u);
double wind_inertia(const PowerSystem& sys, const WindFarm& w);

/// Sum over wind farms; their virtual inertia is always present.
double total_wind_inertia(const PowerSystem& sys);

}  // namespace frequc::grid
