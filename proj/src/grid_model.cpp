#include "frequc/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "frequc/errors.hpp"
#include "frequc/format.hpp"

namespace frequc::grid {

namespace fs = std::filesystem;
using detail::CsvTable;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

std::string full(double v) { return format_number(v, 17); }

FrequencyPolicy parse_policy(const nlohmann::json& j, PowerSystem& sys,
                             std::string& slack_override) {
    FrequencyPolicy p;
    p.f0 = j.at("f0_hz").get<double>();
    p.dead_band = j.at("dead_band_hz").get<double>();
    p.damping_frac = j.at("damping_frac_per_hz").get<double>();
    p.rocof_max = j.at("rocof_max").get<double>();
    p.nadir_max = j.at("nadir_max").get<double>();
    p.qss_max = j.at("qss_max").get<double>();
    p.imbalance_frac = j.at("imbalance_frac").get<double>();
    p.horizon = j.at("dyn_horizon_s").get<double>();
    p.segment_fracs = j.at("segment_fracs").get<std::vector<double>>();

    sys.risk.epsilon = j.value("drcc_epsilon", 0.1);
    sys.risk.radius = j.value("drcc_radius", 0.0);
    sys.risk.strategy = risk::strategy_from_string(j.value("drcc_strategy", std::string("gaussian")));
    if (j.contains("drcc_cp_fixed")) sys.risk.fixed_cp = j.at("drcc_cp_fixed").get<double>();
    sys.wind_sigma_frac = j.value("wind_sigma_frac", 0.05);
    slack_override = j.value("slack_bus", std::string());
    return p;
}

void validate_unit(const ThermalUnit& u) {
    const std::string who = "unit '" + u.id + "': ";
    require(u.p_min >= 0.0 && u.p_min <= u.p_max, who + "requires 0 <= p_min <= p_max");
    require(u.min_up >= 1 && u.min_down >= 1, who + "min up/down times must be >= 1 h");
    require(u.inertia_const >= 0.0, who + "inertia constant must be >= 0");
    require(u.resp_const > 0.0, who + "response constant must be > 0");
    require(u.droop >= 0.0, who + "droop must be >= 0");
    require(u.ramp_up >= 0.0 && u.ramp_down >= 0.0 && u.ramp_startup >= 0.0 &&
                u.ramp_shutdown >= 0.0,
            who + "ramp limits must be >= 0");
    require(u.cost_startup >= 0.0 && u.cost_shutdown >= 0.0 && u.reserve_cost >= 0.0,
            who + "costs must be >= 0");
    require(!u.fuel_segments.empty(), who + "needs at least one fuel segment");
    for (std::size_t k = 1; k < u.fuel_segments.size(); ++k) {
        require(u.fuel_segments[k] >= u.fuel_segments[k - 1],
                who + "fuel cost increments must be nondecreasing (convex cost)");
    }
}

void validate_wind(const WindFarm& w, int hours) {
    const std::string who = "wind farm '" + w.id + "': ";
    require(w.capacity >= 0.0, who + "capacity must be >= 0");
    require(w.droop_min >= 0.0 && w.droop_min <= w.droop_max,
            who + "requires 0 <= droop_min <= droop_max");
    require(w.droop_step > 0.0, who + "droop step must be > 0");
    const double levels = (w.droop_max - w.droop_min) / w.droop_step;
    require(std::abs(levels - std::round(levels)) <= 1e-9,
            who + "droop range must be a multiple of the droop step");
    require(w.droop_default >= w.droop_min - 1e-9 && w.droop_default <= w.droop_max + 1e-9,
            who + "default droop outside [droop_min, droop_max]");
    require(static_cast<int>(w.forecast.size()) == hours &&
                static_cast<int>(w.sigma.size()) == hours,
            who + "forecast must cover every hour");
    for (int h = 0; h < hours; ++h) {
        require(w.forecast[h] >= 0.0 && w.forecast[h] <= w.capacity + 1e-9,
                who + "forecast outside [0, capacity] at hour " + std::to_string(h + 1));
        require(w.sigma[h] >= 0.0, who + "negative sigma at hour " + std::to_string(h + 1));
    }
}

bool connected(const Network& net) {
    if (net.buses.empty()) return false;
    std::vector<std::vector<int>> adj(net.buses.size());
    for (const auto& l : net.lines) {
        const int a = net.bus_index(l.from), b = net.bus_index(l.to);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(net.buses.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
        }
    }
    return count == net.buses.size();
}

}  // namespace

int Network::bus_index(const std::string& bus) const {
    const auto it = std::find(buses.begin(), buses.end(), bus);
    return it == buses.end() ? -1 : static_cast<int>(it - buses.begin());
}

bool operator==(const Network& a, const Network& b) {
    if (a.buses != b.buses || a.lines != b.lines || a.slack_bus != b.slack_bus ||
        a.ptdf_from_file != b.ptdf_from_file)
        return false;
    if (a.ptdf.rows() != b.ptdf.rows() || a.ptdf.cols() != b.ptdf.cols()) return false;
    return a.ptdf.size() == 0 || (a.ptdf - b.ptdf).cwiseAbs().maxCoeff() <= 1e-12;
}

bool operator==(const PowerSystem& a, const PowerSystem& b) {
    return a.units == b.units && a.winds == b.winds && a.network == b.network &&
           a.load == b.load && a.hours == b.hours && a.policy == b.policy && a.risk == b.risk &&
           a.wind_sigma_frac == b.wind_sigma_frac;
}

double PowerSystem::total_load(int hour) const {
    double s = 0.0;
    for (const auto& bus : load) s += bus.at(static_cast<std::size_t>(hour));
    return s;
}

double PowerSystem::peak_load() const { return total_load(peak_hour()); }

int PowerSystem::peak_hour() const {
    int best = 0;
    for (int h = 1; h < hours; ++h)
        if (total_load(h) > total_load(best)) best = h;
    return best;
}

void PowerSystem::validate() const {
    require(!units.empty(), "system has no thermal units");
    require(hours >= 1, "system has no hours");
    std::set<std::string> ids;
    for (const auto& u : units) {
        require(ids.insert(u.id).second, "duplicate device id '" + u.id + "'");
        require(network.bus_index(u.bus) >= 0, "unit '" + u.id + "': unknown bus '" + u.bus + "'");
        validate_unit(u);
    }
    for (const auto& w : winds) {
        require(ids.insert(w.id).second, "duplicate device id '" + w.id + "'");
        require(network.bus_index(w.bus) >= 0,
                "wind farm '" + w.id + "': unknown bus '" + w.bus + "'");
        validate_wind(w, hours);
    }
    std::set<std::string> line_ids;
    for (const auto& l : network.lines) {
        require(line_ids.insert(l.id).second, "duplicate line id '" + l.id + "'");
        require(l.reactance > 0.0, "line '" + l.id + "': reactance must be > 0");
        require(l.limit > 0.0, "line '" + l.id + "': limit must be > 0");
    }
    require(network.bus_index(network.slack_bus) >= 0,
            "slack bus '" + network.slack_bus + "' is not a network bus");
    require(static_cast<Eigen::Index>(network.lines.size()) == network.ptdf.rows() &&
                static_cast<Eigen::Index>(network.buses.size()) == network.ptdf.cols(),
            "PTDF shape does not match the network");
    if (network.ptdf.size() > 0) {
        const int slack = network.bus_index(network.slack_bus);
        require(network.ptdf.col(slack).cwiseAbs().maxCoeff() <= 1e-9,
                "PTDF column of the slack bus must be zero");
        require(network.ptdf.cwiseAbs().maxCoeff() <= 1.0 + 1e-6,
                "PTDF entries must satisfy |S| <= 1");
    }
    require(load.size() == network.buses.size(), "load table does not match the bus list");
    for (int h = 0; h < hours; ++h) {
        for (std::size_t b = 0; b < load.size(); ++b)
            require(load[b].size() == static_cast<std::size_t>(hours) && load[b][h] >= 0.0,
                    "bus '" + network.buses[b] + "': load must be >= 0 at hour " +
                        std::to_string(h + 1));
        require(total_load(h) > 0.0, "total load must be > 0 at hour " + std::to_string(h + 1));
    }

    const auto& p = policy;
    require(p.f0 > 0.0, "policy: f0_hz must be > 0");
    require(p.dead_band >= 0.0, "policy: dead_band_hz must be >= 0");
    require(p.damping_frac >= 0.0, "policy: damping_frac_per_hz must be >= 0");
    require(p.rocof_max > 0.0 && p.nadir_max > 0.0 && p.qss_max > 0.0,
            "policy: security limits must be > 0");
    require(p.imbalance_frac >= 0.0, "policy: imbalance_frac must be >= 0");
    require(p.horizon > 0.0, "policy: dyn_horizon_s must be > 0");
    require(!p.segment_fracs.empty(), "policy: segment_fracs must not be empty");
    double sum = 0.0;
    for (double f : p.segment_fracs) {
        require(f > 0.0, "policy: segment fractions must be positive");
        sum += f;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "policy: segment fractions must sum to 1");
    require(risk.epsilon > 0.0 && risk.epsilon <= 0.5, "policy: drcc_epsilon must lie in (0, 0.5]");
    require(risk.radius >= 0.0, "policy: drcc_radius must be >= 0");
    require(wind_sigma_frac >= 0.0, "policy: wind_sigma_frac must be >= 0");
}

PowerSystem load_system(const fs::path& dir) {
    PowerSystem sys;

    // policy.json
    std::string slack_override;
    {
        const auto path = dir / "policy.json";
        std::ifstream in(path);
        if (!in) throw ParseError(path.string() + ": cannot open file");
        try {
            const auto j = nlohmann::json::parse(in);
            sys.policy = parse_policy(j, sys, slack_override);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
    }

    // lines.csv -> buses in first-appearance order
    {
        const auto t = CsvTable::read(dir / "lines.csv", {"id", "from", "to", "reactance_pu", "limit_mw"});
        for (const auto& r : t.rows()) {
            Line l{t.text(r, "id"), t.text(r, "from"), t.text(r, "to"),
                   t.number(r, "reactance_pu"), t.number(r, "limit_mw")};
            if (l.from == l.to) t.fail(r, "line '" + l.id + "' connects a bus to itself");
            for (const auto& b : {l.from, l.to})
                if (sys.network.bus_index(b) < 0) sys.network.buses.push_back(b);
            sys.network.lines.push_back(std::move(l));
        }
    }

    // units.csv + fuel.csv
    {
        const auto t = CsvTable::read(
            dir / "units.csv",
            {"id", "bus", "p_max", "p_min", "h_const_s", "t_resp_s", "droop_mw_hz", "ramp_up",
             "ramp_down", "ramp_su", "ramp_sd", "min_up", "min_down", "c_su", "c_sd", "c_on",
             "c_reserve"});
        for (const auto& r : t.rows()) {
            ThermalUnit u;
            u.id = t.text(r, "id");
            u.bus = t.text(r, "bus");
            u.p_max = t.number(r, "p_max");
            u.p_min = t.number(r, "p_min");
            u.inertia_const = t.number(r, "h_const_s");
            u.resp_const = t.number(r, "t_resp_s");
            u.droop = t.number(r, "droop_mw_hz");
            u.ramp_up = t.number(r, "ramp_up");
            u.ramp_down = t.number(r, "ramp_down");
            u.ramp_startup = t.number(r, "ramp_su");
            u.ramp_shutdown = t.number(r, "ramp_sd");
            u.min_up = t.integer(r, "min_up");
            u.min_down = t.integer(r, "min_down");
            u.cost_startup = t.number(r, "c_su");
            u.cost_shutdown = t.number(r, "c_sd");
            u.cost_online = t.number(r, "c_on");
            u.reserve_cost = t.number(r, "c_reserve");
            sys.units.push_back(std::move(u));
        }
        const auto f = CsvTable::read(dir / "fuel.csv", {"unit_id", "seg_index", "lambda"});
        std::map<std::string, std::map<int, double>> segs;
        for (const auto& r : f.rows()) {
            const auto id = f.text(r, "unit_id");
            const int k = f.integer(r, "seg_index");
            if (!segs[id].emplace(k, f.number(r, "lambda")).second)
                f.fail(r, "duplicate segment " + std::to_string(k) + " for unit '" + id + "'");
        }
        for (auto& u : sys.units) {
            int expect = 1;
            for (const auto& [k, lambda] : segs[u.id]) {
                if (k != expect) {
                    throw ParseError((dir / "fuel.csv").string() + ": unit '" + u.id +
                                     "' segment indices must run 1..N");
                }
                ++expect;
                u.fuel_segments.push_back(lambda);
            }
            segs.erase(u.id);
        }
        if (!segs.empty()) {
            throw ValidationError("fuel.csv: segments for unknown unit '" + segs.begin()->first + "'");
        }
    }

    // load.csv
    {
        const auto t = CsvTable::read(dir / "load.csv", {"bus", "hour", "mw"});
        std::map<std::pair<std::string, int>, double> entries;
        int max_hour = 0;
        for (const auto& r : t.rows()) {
            const auto bus = t.text(r, "bus");
            const int hour = t.integer(r, "hour");
            if (hour < 1) t.fail(r, "hours are numbered from 1");
            if (!entries.emplace(std::make_pair(bus, hour), t.number(r, "mw")).second)
                t.fail(r, "duplicate load entry for bus '" + bus + "'");
            max_hour = std::max(max_hour, hour);
            if (sys.network.buses.empty() || sys.network.bus_index(bus) < 0) {
                if (sys.network.lines.empty()) {
                    sys.network.buses.push_back(bus);
                } else {
                    throw ValidationError("load.csv: unknown bus '" + bus + "'");
                }
            }
        }
        sys.hours = max_hour;
        sys.load.assign(sys.network.buses.size(), std::vector<double>(max_hour, 0.0));
        for (const auto& [key, mw] : entries)
            sys.load[sys.network.bus_index(key.first)][key.second - 1] = mw;
    }

    // wind.csv + wind_profile.csv
    {
        const auto t = CsvTable::read(dir / "wind.csv",
                                      {"id", "bus", "capacity", "h_const_s", "droop_min",
                                       "droop_max", "droop_step", "c_reserve"});
        for (const auto& r : t.rows()) {
            WindFarm w;
            w.id = t.text(r, "id");
            w.bus = t.text(r, "bus");
            w.capacity = t.number(r, "capacity");
            w.inertia_const = t.number(r, "h_const_s");
            w.droop_min = t.number(r, "droop_min");
            w.droop_max = t.number(r, "droop_max");
            w.droop_step = t.number(r, "droop_step");
            w.reserve_cost = t.number(r, "c_reserve");
            w.droop_default = t.has_column("droop_default") && !t.text(r, "droop_default").empty()
                                  ? t.number(r, "droop_default")
                                  : w.droop_min;
            sys.winds.push_back(std::move(w));
        }
        if (!sys.winds.empty()) {
            const auto p = CsvTable::read(dir / "wind_profile.csv", {"id", "hour", "mu_mw", "sigma_mw"});
            for (auto& w : sys.winds) {
                w.forecast.assign(sys.hours, -1.0);
                w.sigma.assign(sys.hours, -1.0);
            }
            for (const auto& r : p.rows()) {
                const auto id = p.text(r, "id");
                auto it = std::find_if(sys.winds.begin(), sys.winds.end(),
                                       [&](const WindFarm& w) { return w.id == id; });
                if (it == sys.winds.end()) p.fail(r, "unknown wind farm '" + id + "'");
                const int hour = p.integer(r, "hour");
                if (hour < 1 || hour > sys.hours) p.fail(r, "hour outside the load horizon");
                if (it->forecast[hour - 1] >= 0.0) p.fail(r, "duplicate forecast for '" + id + "'");
                const double mu = p.number(r, "mu_mw");
                it->forecast[hour - 1] = mu;
                it->sigma[hour - 1] = p.text(r, "sigma_mw").empty()
                                          ? sys.wind_sigma_frac * mu
                                          : p.number(r, "sigma_mw");
            }
            for (const auto& w : sys.winds) {
                for (int h = 0; h < sys.hours; ++h) {
                    if (w.forecast[h] < 0.0) {
                        throw ParseError((dir / "wind_profile.csv").string() + ": wind farm '" +
                                         w.id + "' has no forecast for hour " +
                                         std::to_string(h + 1));
                    }
                }
            }
        }
    }

    if (sys.network.buses.empty()) throw ValidationError("network has no buses");
    sys.network.slack_bus = slack_override.empty() ? sys.network.buses.front() : slack_override;
    if (sys.network.bus_index(sys.network.slack_bus) < 0) {
        throw ValidationError("slack bus '" + sys.network.slack_bus + "' is not a network bus");
    }

    // ptdf.csv overrides the computed factors.
    if (fs::exists(dir / "ptdf.csv")) {
        const auto t = CsvTable::read(dir / "ptdf.csv", {"line_id", "bus", "factor"});
        auto& net = sys.network;
        net.ptdf = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(net.lines.size()),
                                         static_cast<Eigen::Index>(net.buses.size()));
        for (const auto& r : t.rows()) {
            const auto lid = t.text(r, "line_id");
            const auto lit = std::find_if(net.lines.begin(), net.lines.end(),
                                          [&](const Line& l) { return l.id == lid; });
            if (lit == net.lines.end()) t.fail(r, "unknown line '" + lid + "'");
            const int b = net.bus_index(t.text(r, "bus"));
            if (b < 0) t.fail(r, "unknown bus '" + t.text(r, "bus") + "'");
            net.ptdf(lit - net.lines.begin(), b) = t.number(r, "factor");
        }
        net.ptdf_from_file = true;
    } else {
        if (!connected(sys.network)) throw ValidationError("network graph is disconnected");
        sys.network.ptdf = compute_ptdf(sys.network);
    }

    sys.validate();
    return sys;
}

void save_system(const PowerSystem& sys, const fs::path& dir) {
    fs::create_directories(dir);
    std::ostringstream units, fuel, wind, profile, lines, load;
    units << "id,bus,p_max,p_min,h_const_s,t_resp_s,droop_mw_hz,ramp_up,ramp_down,ramp_su,"
             "ramp_sd,min_up,min_down,c_su,c_sd,c_on,c_reserve\n";
    fuel << "unit_id,seg_index,lambda\n";
    for (const auto& u : sys.units) {
        units << u.id << ',' << u.bus << ',' << full(u.p_max) << ',' << full(u.p_min) << ','
              << full(u.inertia_const) << ',' << full(u.resp_const) << ',' << full(u.droop) << ','
              << full(u.ramp_up) << ',' << full(u.ramp_down) << ',' << full(u.ramp_startup) << ','
              << full(u.ramp_shutdown) << ',' << u.min_up << ',' << u.min_down << ','
              << full(u.cost_startup) << ',' << full(u.cost_shutdown) << ','
              << full(u.cost_online) << ',' << full(u.reserve_cost) << '\n';
        for (std::size_t k = 0; k < u.fuel_segments.size(); ++k)
            fuel << u.id << ',' << k + 1 << ',' << full(u.fuel_segments[k]) << '\n';
    }
    wind << "id,bus,capacity,h_const_s,droop_min,droop_max,droop_step,c_reserve,droop_default\n";
    profile << "id,hour,mu_mw,sigma_mw\n";
    for (const auto& w : sys.winds) {
        wind << w.id << ',' << w.bus << ',' << full(w.capacity) << ',' << full(w.inertia_const)
             << ',' << full(w.droop_min) << ',' << full(w.droop_max) << ','
             << full(w.droop_step) << ',' << full(w.reserve_cost) << ','
             << full(w.droop_default) << '\n';
        for (int h = 0; h < sys.hours; ++h)
            profile << w.id << ',' << h + 1 << ',' << full(w.forecast[h]) << ','
                    << full(w.sigma[h]) << '\n';
    }
    lines << "id,from,to,reactance_pu,limit_mw\n";
    for (const auto& l : sys.network.lines)
        lines << l.id << ',' << l.from << ',' << l.to << ',' << full(l.reactance) << ','
              << full(l.limit) << '\n';
    load << "bus,hour,mw\n";
    for (std::size_t b = 0; b < sys.network.buses.size(); ++b)
        for (int h = 0; h < sys.hours; ++h)
            load << sys.network.buses[b] << ',' << h + 1 << ',' << full(sys.load[b][h]) << '\n';

    nlohmann::ordered_json pol;
    const auto& p = sys.policy;
    pol["f0_hz"] = p.f0;
    pol["dead_band_hz"] = p.dead_band;
    pol["damping_frac_per_hz"] = p.damping_frac;
    pol["rocof_max"] = p.rocof_max;
    pol["nadir_max"] = p.nadir_max;
    pol["qss_max"] = p.qss_max;
    pol["imbalance_frac"] = p.imbalance_frac;
    pol["dyn_horizon_s"] = p.horizon;
    pol["segment_fracs"] = p.segment_fracs;
    pol["drcc_epsilon"] = sys.risk.epsilon;
    pol["drcc_radius"] = sys.risk.radius;
    pol["drcc_strategy"] = risk::to_string(sys.risk.strategy);
    if (sys.risk.fixed_cp) pol["drcc_cp_fixed"] = *sys.risk.fixed_cp;
    pol["wind_sigma_frac"] = sys.wind_sigma_frac;
    pol["slack_bus"] = sys.network.slack_bus;

    write_file_atomic(dir / "units.csv", units.str());
    write_file_atomic(dir / "fuel.csv", fuel.str());
    write_file_atomic(dir / "wind.csv", wind.str());
    write_file_atomic(dir / "wind_profile.csv", profile.str());
    write_file_atomic(dir / "lines.csv", lines.str());
    write_file_atomic(dir / "load.csv", load.str());
    write_file_atomic(dir / "policy.json", pol.dump(2) + "\n");
    if (sys.network.ptdf_from_file) {
        std::ostringstream ptdf;
        ptdf << "line_id,bus,factor\n";
        for (std::size_t l = 0; l < sys.network.lines.size(); ++l)
            for (std::size_t b = 0; b < sys.network.buses.size(); ++b)
                ptdf << sys.network.lines[l].id << ',' << sys.network.buses[b] << ','
                     << full(sys.network.ptdf(l, b)) << '\n';
        write_file_atomic(dir / "ptdf.csv", ptdf.str());
    } else if (fs::exists(dir / "ptdf.csv")) {
        fs::remove(dir / "ptdf.csv");
    }
}

Eigen::MatrixXd compute_ptdf(const Network& net) {
    const auto nb = static_cast<Eigen::Index>(net.buses.size());
    const auto nl = static_cast<Eigen::Index>(net.lines.size());
    const int slack = net.bus_index(net.slack_bus);
    if (slack < 0) throw ValidationError("slack bus '" + net.slack_bus + "' is not a network bus");
    if (!connected(net)) throw ValidationError("network graph is disconnected");

    Eigen::MatrixXd bbus = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(nl, nb);  // flow = bf * theta
    for (Eigen::Index l = 0; l < nl; ++l) {
        const auto& line = net.lines[static_cast<std::size_t>(l)];
        if (!(line.reactance > 0.0))
            throw ValidationError("line '" + line.id + "': reactance must be > 0");
        const int a = net.bus_index(line.from), b = net.bus_index(line.to);
        const double y = 1.0 / line.reactance;
        bbus(a, a) += y;
        bbus(b, b) += y;
        bbus(a, b) -= y;
        bbus(b, a) -= y;
        bf(l, a) += y;
        bf(l, b) -= y;
    }

    // Remove the slack row/column, invert, and pad the slack back with zeros.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < nb; ++i)
        if (i != slack) keep.push_back(i);
    const auto nk = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd reduced(nk, nk);
    for (Eigen::Index i = 0; i < nk; ++i)
        for (Eigen::Index j = 0; j < nk; ++j) reduced(i, j) = bbus(keep[i], keep[j]);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nb, nb);
    if (nk > 0) {
        const Eigen::MatrixXd inv = reduced.ldlt().solve(Eigen::MatrixXd::Identity(nk, nk));
        for (Eigen::Index i = 0; i < nk; ++i)
            for (Eigen::Index j = 0; j < nk; ++j) x(keep[i], keep[j]) = inv(i, j);
    }
    Eigen::MatrixXd s = bf * x;
    s.col(slack).setZero();
    return s;
}

Eigen::VectorXd line_flows(const Network& net, const Eigen::VectorXd& injection) {
    return net.ptdf * injection;
}

EventParams event_params(const PowerSystem& sys, int hour) {
    if (hour < 0 || hour >= sys.hours) throw DomainError("hour outside the horizon");
    const double total = sys.total_load(hour);
    return {sys.policy.imbalance_frac * total, sys.policy.damping_frac * total};
}

double inertia_mwspherz(double inertia_const, double capacity, double f0) {
    return inertia_const * capacity / f0;
}

double unit_inertia(const PowerSystem& sys, const ThermalUnit& u) {
    return inertia_mwspherz(u.inertia_const, u.p_max, sys.policy.f0);
}

double wind_inertia(const PowerSystem& sys, const WindFarm& w) {
    return inertia_mwspherz(w.inertia_const, w.capacity, sys.policy.f0);
}

double total_wind_inertia(const PowerSystem& sys) {
    double h = 0.0;
    for (const auto& w : sys.winds) h += wind_inertia(sys, w);
    return h;
}

}  // namespace frequc::grid
