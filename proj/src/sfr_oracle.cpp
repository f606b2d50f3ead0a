#include "frequc/sfr_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frequc/errors.hpp"
#include "frequc/format.hpp"

namespace frequc::sfr {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("SFR scenario: " + what);
}

struct Dynamics {
    const SfrScenario& s;

    double governor_output(std::size_t i, double state) const {
        if (s.reserve_caps) return std::min(state, s.reserve_caps->governors[i]);
        return state;
    }

    double wind_output(double df) const {
        const double p = s.wind_droop * (df - s.dead_band);
        if (s.reserve_caps) return std::min(p, s.reserve_caps->wind);
        return p;
    }

    // y = (df, P_g1, ..., P_gn); stage-2 equations hold for every t >= t_db.
    void rhs(const std::vector<double>& y, std::vector<double>& dy) const {
        const double df = y[0];
        double psys = wind_output(df);
        for (std::size_t i = 0; i < s.governors.size(); ++i) {
            const auto& g = s.governors[i];
            const double state = y[i + 1];
            psys += governor_output(i, state);
            double rate = (g.droop * (df - s.dead_band) - state) / g.response_time;
            if (s.reserve_caps && state >= s.reserve_caps->governors[i] && rate > 0.0) {
                rate = 0.0;  // anti-windup at the cap
            }
            dy[i + 1] = rate;
        }
        dy[0] = (s.imbalance - psys - s.damping * df) / (2.0 * s.inertia);
    }

    void clamp(std::vector<double>& y) const {
        if (!s.reserve_caps) return;
        for (std::size_t i = 0; i < s.governors.size(); ++i)
            y[i + 1] = std::min(y[i + 1], s.reserve_caps->governors[i]);
    }
};

void rk4_step(const Dynamics& dyn, std::vector<double>& y, double h,
              std::vector<std::vector<double>>& work) {
    const std::size_t n = y.size();
    auto& k1 = work[0];
    auto& k2 = work[1];
    auto& k3 = work[2];
    auto& k4 = work[3];
    auto& tmp = work[4];
    dyn.rhs(y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    dyn.rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    dyn.rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    dyn.rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    dyn.clamp(y);
}

}  // namespace

void SfrScenario::validate() const {
    require(std::isfinite(inertia) && inertia > 0.0, "inertia must be > 0");
    require(std::isfinite(damping) && damping >= 0.0, "damping must be >= 0");
    require(std::isfinite(imbalance) && imbalance > 0.0, "imbalance must be > 0");
    require(std::isfinite(dead_band) && dead_band >= 0.0, "dead band must be >= 0");
    require(std::isfinite(horizon) && horizon > 0.0, "horizon must be > 0");
    require(std::isfinite(wind_droop) && wind_droop >= 0.0, "wind droop must be >= 0");
    for (const auto& g : governors) {
        require(std::isfinite(g.response_time) && g.response_time > 0.0,
                "governor '" + g.name + "' response time must be > 0");
        require(std::isfinite(g.droop) && g.droop >= 0.0,
                "governor '" + g.name + "' droop must be >= 0");
    }
    if (reserve_caps) {
        require(reserve_caps->governors.size() == governors.size(),
                "reserve caps must list one value per governor");
    }
}

double SfrScenario::total_droop() const {
    double g = wind_droop;
    for (const auto& gov : governors) g += gov.droop;
    return g;
}

double Stage1::deviation(double t) const {
    if (damping > 0.0)
        return imbalance / damping * (1.0 - std::exp(-damping * t / (2.0 * inertia)));
    return imbalance * t / (2.0 * inertia);
}

double Stage1::slope(double t) const {
    if (damping > 0.0)
        return imbalance / (2.0 * inertia) * std::exp(-damping * t / (2.0 * inertia));
    return imbalance / (2.0 * inertia);
}

Stage1 stage1_analytic(const SfrScenario& s) {
    s.validate();
    Stage1 st{s.inertia, s.damping, s.imbalance, std::nullopt};
    if (s.dead_band == 0.0) {
        st.t_db = 0.0;
        return st;
    }
    double t = 0.0;
    if (s.damping > 0.0) {
        if (s.imbalance / s.damping <= s.dead_band) return st;
        t = -(2.0 * s.inertia / s.damping) * std::log1p(-s.dead_band * s.damping / s.imbalance);
    } else {
        t = 2.0 * s.inertia * s.dead_band / s.imbalance;
    }
    // Newton polish of the crossing; the residual target is 1e-10 Hz.
    for (int it = 0; it < 50; ++it) {
        const double r = st.deviation(t) - s.dead_band;
        if (std::abs(r) < 1e-12) break;
        t -= r / st.slope(t);
    }
    if (!(std::abs(st.deviation(t) - s.dead_band) < 1e-10)) {
        throw NumericalError("dead-band crossing did not converge");
    }
    st.t_db = t;
    return st;
}

double Trajectory::pfr_total(std::size_t i) const {
    double p = pfr_w[i];
    for (const auto& g : pfr_g) p += g[i];
    return p;
}

Trajectory simulate(const SfrScenario& s, double dt) {
    s.validate();
    if (!(dt > 0.0) || dt > s.horizon / 100.0) {
        throw ConfigError("time step must satisfy 0 < dt <= horizon/100");
    }
    const Stage1 st1 = stage1_analytic(s);
    const Dynamics dyn{s};
    const std::size_t ng = s.governors.size();

    Trajectory traj;
    for (const auto& g : s.governors) traj.governor_names.push_back(g.name);
    traj.pfr_g.assign(ng, {});
    traj.t_db = st1.t_db;
    traj.initial_slope = st1.slope(0.0);

    auto push = [&](double t, double df, const std::vector<double>* state) {
        traj.t.push_back(t);
        traj.df.push_back(df);
        for (std::size_t i = 0; i < ng; ++i)
            traj.pfr_g[i].push_back(state ? dyn.governor_output(i, (*state)[i + 1]) : 0.0);
        traj.pfr_w.push_back(state ? dyn.wind_output(df) : 0.0);
    };

    const auto steps = static_cast<std::size_t>(std::ceil(s.horizon / dt - 1e-9));
    auto grid = [&](std::size_t k) { return std::min(s.horizon, static_cast<double>(k) * dt); };

    if (!st1.t_db || *st1.t_db >= s.horizon) {
        for (std::size_t k = 0; k <= steps; ++k) push(grid(k), st1.deviation(grid(k)), nullptr);
        traj.final_slope = st1.slope(s.horizon);
        return traj;
    }

    const double t_db = *st1.t_db;
    std::size_t k = 0;
    for (; k <= steps && grid(k) < t_db - 1e-12; ++k) push(grid(k), st1.deviation(grid(k)), nullptr);

    std::vector<double> y(ng + 1, 0.0);
    y[0] = s.dead_band;
    push(t_db, y[0], &y);
    if (k <= steps && std::abs(grid(k) - t_db) <= 1e-12) ++k;

    std::vector<std::vector<double>> work(5, std::vector<double>(ng + 1));
    double t = t_db;
    for (; k <= steps; ++k) {
        const double next = grid(k);
        rk4_step(dyn, y, next - t, work);
        t = next;
        for (double v : y) {
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite SFR state at t=" << t << " (df=" << y[0] << ")";
                throw NumericalError(msg.str());
            }
        }
        push(t, y[0], &y);
    }
    std::vector<double> dy(ng + 1);
    dyn.rhs(y, dy);
    traj.final_slope = dy[0];
    return traj;
}

double rocof_initial(const SfrScenario& s) { return s.imbalance / (2.0 * s.inertia); }

double qss_closed_form(const SfrScenario& s) {
    const double g = s.total_droop();
    if (s.damping == 0.0 && g == 0.0) {
        throw DomainError("no steady state: zero damping and zero droop");
    }
    const double active = (s.imbalance + g * s.dead_band) / (s.damping + g);
    if (active > s.dead_band) return active;
    return s.imbalance / s.damping;
}

Metrics metrics(const Trajectory& traj) {
    if (traj.t.empty()) throw DomainError("metrics of an empty trajectory");
    Metrics m;
    m.rocof0 = traj.initial_slope;
    const auto it = std::max_element(traj.df.begin(), traj.df.end());
    const auto i = static_cast<std::size_t>(it - traj.df.begin());
    m.nadir_df = *it;
    m.nadir_t = traj.t[i];
    if (i > 0 && i + 1 < traj.size()) {
        // Vertex of the parabola through the three samples around the max.
        const double t0 = traj.t[i - 1], t1 = traj.t[i], t2 = traj.t[i + 1];
        const double y0 = traj.df[i - 1], y1 = traj.df[i], y2 = traj.df[i + 1];
        const double d01 = (y1 - y0) / (t1 - t0);
        const double d12 = (y2 - y1) / (t2 - t1);
        const double a = (d12 - d01) / (t2 - t0);
        if (a < 0.0) {
            const double b = d01 - a * (t0 + t1);
            const double tv = -b / (2.0 * a);
            if (tv > t0 && tv < t2) {
                const double yv = y1 + (tv - t1) * (d01 + a * (tv - t0));
                if (yv >= m.nadir_df) {
                    m.nadir_df = yv;
                    m.nadir_t = tv;
                }
            }
        }
    }
    m.qss_df = traj.df.back();
    m.qss_converged = std::abs(traj.final_slope) <= kQssSlopeTol;
    return m;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,df_hz,pfr_total_mw";
    for (const auto& name : traj.governor_names) out += ",pfr_g_" + name;
    out += ",pfr_w\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_number(traj.t[i]);
        out += ',' + format_number(traj.df[i]);
        out += ',' + format_number(traj.pfr_total(i));
        for (const auto& g : traj.pfr_g) out += ',' + format_number(g[i]);
        out += ',' + format_number(traj.pfr_w[i]);
        out += '\n';
    }
    return out;
}

SfrScenario scenario_from_json(const nlohmann::json& j) {
    SfrScenario s;
    try {
        s.inertia = j.at("h_sys").get<double>();
        s.damping = j.at("kd_pd").get<double>();
        s.imbalance = j.at("dp").get<double>();
        s.dead_band = j.at("f_db").get<double>();
        s.wind_droop = j.value("g_w", 0.0);
        s.horizon = j.value("horizon_s", 30.0);
        int idx = 0;
        for (const auto& g : j.value("governors", nlohmann::json::array())) {
            s.governors.push_back({g.value("name", "g" + std::to_string(++idx)),
                                   g.at("t_g").get<double>(), g.at("g_eff").get<double>()});
        }
        if (j.contains("reserve_caps")) {
            const auto& c = j.at("reserve_caps");
            s.reserve_caps = ReserveCaps{c.at("governors").get<std::vector<double>>(),
                                         c.at("wind").get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("SFR scenario JSON: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json scenario_to_json(const SfrScenario& s) {
    nlohmann::json j;
    j["h_sys"] = s.inertia;
    j["kd_pd"] = s.damping;
    j["dp"] = s.imbalance;
    j["f_db"] = s.dead_band;
    j["g_w"] = s.wind_droop;
    j["horizon_s"] = s.horizon;
    j["governors"] = nlohmann::json::array();
    for (const auto& g : s.governors)
        j["governors"].push_back({{"name", g.name}, {"t_g", g.response_time}, {"g_eff", g.droop}});
    if (s.reserve_caps)
        j["reserve_caps"] = {{"governors", s.reserve_caps->governors}, {"wind", s.reserve_caps->wind}};
    return j;
}

}  // namespace frequc::sfr
