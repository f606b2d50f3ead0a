#pragma once

#include <random>
#include <string>

#include "frequc/grid_model.hpp"

namespace frequc::testing {

/// Two units, one wind farm with four droop levels, two buses, two or three
/// hours. Parameters are drawn around the six-bus fixture so that most draws
/// are feasible under the frequency limits.
inline grid::PowerSystem small_system(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    grid::PowerSystem sys;
    sys.hours = 2 + static_cast<int>(rng() % 2);
    sys.network.buses = {"a", "b"};
    sys.network.slack_bus = "a";
    sys.network.lines = {{"ab", "a", "b", 0.1, u(80.0, 150.0)}};

    for (int i = 0; i < 2; ++i) {
        grid::ThermalUnit g;
        g.id = "G" + std::to_string(i + 1);
        g.bus = i == 0 ? "a" : "b";
        g.p_max = u(90.0, 140.0);
        g.p_min = u(0.2, 0.35) * g.p_max;
        g.inertia_const = u(4.0, 8.0);
        g.resp_const = u(3.0, 10.0);
        g.droop = u(15.0, 30.0);
        g.ramp_up = g.ramp_down = u(50.0, 100.0);
        g.ramp_startup = g.ramp_shutdown = g.p_max;
        g.min_up = 1 + static_cast<int>(rng() % 2);
        g.min_down = 1 + static_cast<int>(rng() % 2);
        g.cost_startup = u(100.0, 800.0);
        g.cost_online = u(200.0, 900.0);
        g.reserve_cost = u(5.0, 20.0);
        const double base = u(8.0, 20.0);
        g.fuel_segments = {base, base + u(0.0, 4.0)};
        g.fuel_segments.push_back(g.fuel_segments.back() + u(0.0, 4.0));
        sys.units.push_back(g);
    }

    grid::WindFarm w;
    w.id = "W";
    w.bus = "b";
    w.capacity = 60.0;
    w.inertia_const = 5.0;
    w.droop_min = 10.0;
    w.droop_max = 25.0;
    w.droop_step = 5.0;
    w.droop_default = 20.0;
    w.reserve_cost = u(2.0, 8.0);
    for (int h = 0; h < sys.hours; ++h) {
        w.forecast.push_back(u(20.0, 50.0));
        w.sigma.push_back(0.05 * w.forecast.back());
    }
    sys.winds.push_back(w);

    sys.load.assign(2, {});
    for (int h = 0; h < sys.hours; ++h) {
        const double total = u(90.0, 150.0);
        const double share = u(0.3, 0.7);
        sys.load[0].push_back(share * total);
        sys.load[1].push_back((1.0 - share) * total);
    }

    sys.policy.f0 = 50.0;
    sys.policy.dead_band = 0.015;
    sys.policy.damping_frac = 0.01;
    sys.policy.rocof_max = 0.5;
    sys.policy.nadir_max = 0.5;
    sys.policy.qss_max = 0.3;
    sys.policy.imbalance_frac = 0.1;
    sys.policy.horizon = 30.0;
    sys.risk.epsilon = 0.1;
    sys.risk.radius = 0.01;
    sys.risk.strategy = risk::Strategy::wasserstein_cvar;
    sys.network.ptdf = grid::compute_ptdf(sys.network);
    sys.validate();
    return sys;
}

}  // namespace frequc::testing
