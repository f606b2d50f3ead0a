#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frequc/errors.hpp"
#include "frequc/format.hpp"
#include "frequc/sfr_oracle.hpp"
#include "frequc/uc_milp.hpp"

namespace frequc::uc {

using nlohmann::json;

namespace {

// Values are rounded to the 9 significant digits used by every artifact.
double num(double v) {
    const std::string s = format_number(v);
    if (s == "nan" || s == "inf" || s == "-inf") return v;
    return std::stod(s);
}

json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

template <class T>
std::vector<std::vector<T>> table(std::size_t rows, int hours, T init) {
    return std::vector<std::vector<T>>(rows, std::vector<T>(static_cast<std::size_t>(hours), init));
}

milp::SolveStatus status_from_string(const std::string& s) {
    for (auto st : {milp::SolveStatus::optimal, milp::SolveStatus::feasible_gap,
                    milp::SolveStatus::infeasible, milp::SolveStatus::timeout})
        if (milp::to_string(st) == s) return st;
    throw ParseError("unknown solve status '" + s + "'");
}

}  // namespace

UcSolution solve(const UcModel& m, const grid::PowerSystem& sys, milp::SolverBackend& backend,
                 const milp::SolveOptions& options) {
    UcSolution sol;
    sol.mode = to_string(m.mode);
    sol.hours = m.hours;
    for (const auto& u : sys.units) sol.unit_ids.push_back(u.id);
    for (const auto& w : sys.winds) sol.farm_ids.push_back(w.id);
    if (!m.violated_constant_rows.empty()) {
        sol.status = milp::SolveStatus::infeasible;
        return sol;
    }

    const auto res = backend.solve(m.model, options);
    sol.status = res.status;
    sol.gap = res.gap;
    sol.wall_time = res.wall_time;
    if (!res.has_solution()) return sol;
    sol.objective = res.objective;
    const auto& x = res.values;

    const std::size_t nu = sys.units.size(), nf = sys.winds.size();
    const int T = m.hours;
    sol.commitment = table<int>(nu, T, 0);
    sol.startup = table<int>(nu, T, 0);
    sol.shutdown = table<int>(nu, T, 0);
    sol.dispatch = table<double>(nu, T, 0.0);
    sol.reserve = table<double>(nu, T, 0.0);
    sol.wind_power = table<double>(nf, T, 0.0);
    sol.wind_reserve = table<double>(nf, T, 0.0);
    sol.droop = table<double>(nf, T, 0.0);
    sol.threshold = m.threshold;

    for (std::size_t i = 0; i < nu; ++i) {
        const auto& u = sys.units[i];
        for (int h = 0; h < T; ++h) {
            const int on = static_cast<int>(std::lround(m.commit[i][h].evaluate(x)));
            const int up = static_cast<int>(std::lround(m.startup[i][h].evaluate(x)));
            const int down = static_cast<int>(std::lround(m.shutdown[i][h].evaluate(x)));
            sol.commitment[i][h] = on;
            sol.startup[i][h] = up;
            sol.shutdown[i][h] = down;
            sol.dispatch[i][h] = x[m.power[i][h]];
            sol.reserve[i][h] = x[m.reserve[i][h]];
            sol.cost.startup_shutdown += u.cost_startup * up + u.cost_shutdown * down;
            sol.cost.fuel += u.cost_online * on;
            for (std::size_t k = 0; k < u.fuel_segments.size(); ++k)
                sol.cost.fuel += u.fuel_segments[k] * x[m.segment[i][h][k]];
            sol.cost.thermal_reserve += u.reserve_cost * sol.reserve[i][h];
        }
    }
    for (std::size_t f = 0; f < nf; ++f) {
        for (int h = 0; h < T; ++h) {
            sol.wind_power[f][h] = x[m.wind_power[f][h]];
            sol.wind_reserve[f][h] = x[m.wind_reserve[f][h]];
            sol.droop[f][h] = m.droop[f][h].evaluate(x);
            sol.cost.wind_reserve += sys.winds[f].reserve_cost * sol.wind_reserve[f][h];
        }
    }
    return sol;
}

bool SecurityReport::all_pass() const {
    return std::all_of(hours.begin(), hours.end(), [](const HourSecurity& h) { return h.pass(); });
}

int SecurityReport::failures() const {
    return static_cast<int>(
        std::count_if(hours.begin(), hours.end(), [](const HourSecurity& h) { return !h.pass(); }));
}

double SecurityReport::max_rocof() const {
    double m = 0.0;
    for (const auto& h : hours) m = std::max(m, h.rocof);
    return m;
}

double SecurityReport::max_nadir() const {
    double m = 0.0;
    for (const auto& h : hours) m = std::max(m, h.nadir);
    return m;
}

double SecurityReport::max_qss() const {
    double m = 0.0;
    for (const auto& h : hours) m = std::max(m, h.qss);
    return m;
}

SecurityReport validate(const UcSolution& sol, const grid::PowerSystem& sys, double tolerance,
                        double dt) {
    if (!sol.has_schedule()) throw ValidationError("solution has no schedule to validate");
    if (sol.hours != sys.hours || sol.commitment.size() != sys.units.size() ||
        sol.droop.size() != sys.winds.size())
        throw ValidationError("solution does not match the system");
    SecurityReport rep;
    rep.tolerance = tolerance;
    rep.rocof_limit = sys.policy.rocof_max;
    rep.nadir_limit = sys.policy.nadir_max;
    rep.qss_limit = sys.policy.qss_max;
    const double slack = 1.0 + tolerance;

    for (int h = 0; h < sys.hours; ++h) {
        HourSecurity hs;
        hs.hour = h;
        const auto ev = grid::event_params(sys, h);
        hs.imbalance = ev.imbalance;

        sfr::SfrScenario s;
        s.inertia = grid::total_wind_inertia(sys);
        s.damping = ev.damping;
        s.imbalance = ev.imbalance;
        s.dead_band = sys.policy.dead_band;
        s.horizon = sys.policy.horizon;
        std::vector<double> caps;
        for (std::size_t i = 0; i < sys.units.size(); ++i) {
            if (!sol.commitment[i][h]) continue;
            const auto& u = sys.units[i];
            s.inertia += grid::unit_inertia(sys, u);
            s.governors.push_back({u.id, u.resp_const, u.droop});
            caps.push_back(sol.reserve[i][h]);
        }
        double wind_reserve = 0.0;
        for (std::size_t f = 0; f < sys.winds.size(); ++f) {
            s.wind_droop += sol.droop[f][h];
            wind_reserve += sol.wind_reserve[f][h];
        }
        hs.inertia = s.inertia;
        hs.droop = s.total_droop();

        if (ev.imbalance > 0.0) {
            const auto traj = sfr::simulate(s, dt);
            const auto met = sfr::metrics(traj);
            hs.rocof = sfr::rocof_initial(s);
            hs.nadir = met.nadir_df;
            hs.nadir_t = met.nadir_t;
            hs.qss = met.qss_df;
            hs.qss_converged = met.qss_converged;
            double excess = -std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < caps.size(); ++g) {
                const auto& p = traj.pfr_g[g];
                excess = std::max(excess, *std::max_element(p.begin(), p.end()) - caps[g]);
            }
            excess = std::max(excess, *std::max_element(traj.pfr_w.begin(), traj.pfr_w.end()) -
                                          wind_reserve);
            hs.reserve_excess = excess;
            hs.reserve_ok = excess <= tolerance * ev.imbalance + 1e-6;
        }
        hs.rocof_ok = hs.rocof <= rep.rocof_limit * slack;
        hs.nadir_ok = hs.nadir <= rep.nadir_limit * slack;
        hs.qss_ok = hs.qss <= rep.qss_limit * slack;
        rep.hours.push_back(hs);
    }
    return rep;
}

Audit audit(const UcSolution& sol, const grid::PowerSystem& sys) {
    Audit a;
    if (!sol.has_schedule()) return a;
    const int T = sol.hours;
    for (int h = 0; h < T; ++h) {
        double gen = 0.0;
        for (const auto& d : sol.dispatch) gen += d[h];
        for (const auto& w : sol.wind_power) gen += w[h];
        a.balance = std::max(a.balance, std::abs(gen - sys.total_load(h)));
        for (std::size_t f = 0; f < sol.wind_power.size(); ++f)
            a.drcc = std::max(a.drcc, sol.wind_power[f][h] + sol.wind_reserve[f][h] - sol.threshold[f][h]);
    }
    a.cost = std::abs(sol.cost.total() - sol.objective) / std::max(1.0, std::abs(sol.objective));

    for (std::size_t i = 0; i < sys.units.size(); ++i) {
        const auto& u = sys.units[i];
        const auto& on = sol.commitment[i];
        auto flag = [&](int h, const std::string& what) {
            a.commitment.push_back("unit '" + u.id + "' hour " + std::to_string(h + 1) + ": " + what);
        };
        for (int h = 0; h < T; ++h) {
            const int prev = h > 0 ? on[h - 1] : 0;
            const int up = sol.startup[i][h], down = sol.shutdown[i][h];
            if (up + down > 1) flag(h, "start-up and shut-down together");
            if (up - down != on[h] - prev) flag(h, "start/stop inconsistent with commitment");
            if (on[h] && !prev) {
                for (int k = h; k < std::min(T, h + u.min_up); ++k)
                    if (!on[k]) {
                        flag(h, "minimum up time violated");
                        break;
                    }
            }
            if (!on[h] && prev) {
                for (int k = h; k < std::min(T, h + u.min_down); ++k)
                    if (on[k]) {
                        flag(h, "minimum down time violated");
                        break;
                    }
            }
        }
    }
    return a;
}

json report_to_json(const SecurityReport& r) {
    json j;
    j["tolerance"] = r.tolerance;
    j["limits"] = {{"rocof", num(r.rocof_limit)}, {"nadir", num(r.nadir_limit)}, {"qss", num(r.qss_limit)}};
    j["all_pass"] = r.all_pass();
    j["failures"] = r.failures();
    j["max"] = {{"rocof", num(r.max_rocof())}, {"nadir", num(r.max_nadir())}, {"qss", num(r.max_qss())}};
    json hours = json::array();
    for (const auto& h : r.hours) {
        hours.push_back({{"hour", h.hour + 1},
                         {"imbalance_mw", num(h.imbalance)},
                         {"inertia", num(h.inertia)},
                         {"droop", num(h.droop)},
                         {"rocof", num(h.rocof)},
                         {"nadir_df", num(h.nadir)},
                         {"nadir_t", num(h.nadir_t)},
                         {"qss_df", num(h.qss)},
                         {"qss_converged", h.qss_converged},
                         {"reserve_excess_mw", num(h.reserve_excess)},
                         {"rocof_ok", h.rocof_ok},
                         {"nadir_ok", h.nadir_ok},
                         {"qss_ok", h.qss_ok},
                         {"reserve_ok", h.reserve_ok},
                         {"pass", h.pass()},
                         {"margin",
                          {{"rocof", num(r.rocof_limit - h.rocof)},
                           {"nadir", num(r.nadir_limit - h.nadir)},
                           {"qss", num(r.qss_limit - h.qss)}}}});
    }
    j["hours"] = hours;
    return j;
}

SecurityReport report_from_json(const json& j) {
    try {
        SecurityReport r;
        r.tolerance = j.at("tolerance").get<double>();
        r.rocof_limit = j.at("limits").at("rocof").get<double>();
        r.nadir_limit = j.at("limits").at("nadir").get<double>();
        r.qss_limit = j.at("limits").at("qss").get<double>();
        for (const auto& h : j.at("hours")) {
            HourSecurity hs;
            hs.hour = h.at("hour").get<int>() - 1;
            hs.imbalance = h.at("imbalance_mw").get<double>();
            hs.inertia = h.at("inertia").get<double>();
            hs.droop = h.at("droop").get<double>();
            hs.rocof = h.at("rocof").get<double>();
            hs.nadir = h.at("nadir_df").get<double>();
            hs.nadir_t = h.at("nadir_t").get<double>();
            hs.qss = h.at("qss_df").get<double>();
            hs.qss_converged = h.at("qss_converged").get<bool>();
            hs.reserve_excess = h.at("reserve_excess_mw").get<double>();
            hs.rocof_ok = h.at("rocof_ok").get<bool>();
            hs.nadir_ok = h.at("nadir_ok").get<bool>();
            hs.qss_ok = h.at("qss_ok").get<bool>();
            hs.reserve_ok = h.at("reserve_ok").get<bool>();
            r.hours.push_back(hs);
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("security report: ") + e.what());
    }
}

json solution_to_json(const UcSolution& sol, const SecurityReport* report) {
    json j;
    j["mode"] = sol.mode;
    j["status"] = milp::to_string(sol.status);
    j["objective"] = num(sol.objective);
    j["gap"] = num(sol.gap);
    j["wall_time_s"] = num(sol.wall_time);
    j["hours"] = sol.hours;
    j["cost"] = {{"startup_shutdown", num(sol.cost.startup_shutdown)},
                 {"fuel", num(sol.cost.fuel)},
                 {"thermal_reserve", num(sol.cost.thermal_reserve)},
                 {"wind_reserve", num(sol.cost.wind_reserve)},
                 {"total", num(sol.cost.total())}};
    json units = json::array();
    for (std::size_t i = 0; i < sol.unit_ids.size(); ++i) {
        json u{{"id", sol.unit_ids[i]}};
        if (sol.has_schedule()) {
            u["commitment"] = sol.commitment[i];
            u["startup"] = sol.startup[i];
            u["shutdown"] = sol.shutdown[i];
            u["dispatch_mw"] = num_array(sol.dispatch[i]);
            u["reserve_mw"] = num_array(sol.reserve[i]);
        }
        units.push_back(u);
    }
    j["units"] = units;
    json farms = json::array();
    for (std::size_t f = 0; f < sol.farm_ids.size(); ++f) {
        json w{{"id", sol.farm_ids[f]}};
        if (sol.has_schedule()) {
            w["power_mw"] = num_array(sol.wind_power[f]);
            w["reserve_mw"] = num_array(sol.wind_reserve[f]);
            w["droop_mw_hz"] = num_array(sol.droop[f]);
            w["drcc_threshold_mw"] = num_array(sol.threshold[f]);
        }
        farms.push_back(w);
    }
    j["wind"] = farms;
    if (report) j["security"] = report_to_json(*report);
    return j;
}

UcSolution solution_from_json(const json& j) {
    try {
        UcSolution s;
        s.mode = j.at("mode").get<std::string>();
        s.status = status_from_string(j.at("status").get<std::string>());
        s.objective = j.at("objective").get<double>();
        s.gap = j.at("gap").get<double>();
        s.wall_time = j.at("wall_time_s").get<double>();
        s.hours = j.at("hours").get<int>();
        const auto& c = j.at("cost");
        s.cost.startup_shutdown = c.at("startup_shutdown").get<double>();
        s.cost.fuel = c.at("fuel").get<double>();
        s.cost.thermal_reserve = c.at("thermal_reserve").get<double>();
        s.cost.wind_reserve = c.at("wind_reserve").get<double>();
        for (const auto& u : j.at("units")) {
            s.unit_ids.push_back(u.at("id").get<std::string>());
            if (!u.contains("commitment")) continue;
            s.commitment.push_back(u.at("commitment").get<std::vector<int>>());
            s.startup.push_back(u.at("startup").get<std::vector<int>>());
            s.shutdown.push_back(u.at("shutdown").get<std::vector<int>>());
            s.dispatch.push_back(u.at("dispatch_mw").get<std::vector<double>>());
            s.reserve.push_back(u.at("reserve_mw").get<std::vector<double>>());
        }
        for (const auto& w : j.at("wind")) {
            s.farm_ids.push_back(w.at("id").get<std::string>());
            if (!w.contains("power_mw")) continue;
            s.wind_power.push_back(w.at("power_mw").get<std::vector<double>>());
            s.wind_reserve.push_back(w.at("reserve_mw").get<std::vector<double>>());
            s.droop.push_back(w.at("droop_mw_hz").get<std::vector<double>>());
            s.threshold.push_back(w.at("drcc_threshold_mw").get<std::vector<double>>());
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("solution: ") + e.what());
    }
}

}  // namespace frequc::uc
