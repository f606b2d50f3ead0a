#include "frequc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frequc/errors.hpp"
#include "frequc/format.hpp"
#include "frequc/freq_algebra.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/sfr_oracle.hpp"
#include "frequc/uc_milp.hpp"

namespace frequc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<double> kSweepHorizons{5, 10, 20, 30};
const std::vector<int> kSweepSegments{1, 2, 4, 8};
const std::vector<double> kUnevenFractions{0.1, 0.2, 0.3, 0.4};
constexpr double kUnevenHorizon = 30.0;
constexpr double kMinOracleHorizon = 30.0;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// JSON text with every double printed at 9 significant digits.
std::string dump(const json& j, int indent = 0) {
    std::ostringstream out;
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
    if (j.is_object()) {
        if (j.empty()) return "{}";
        out << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << inner << json(it.key()).dump() << ": " << dump(it.value(), indent + 2);
        }
        out << "\n" << pad << "}";
    } else if (j.is_array()) {
        if (j.empty()) return "[]";
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& v) { return v.is_structured(); });
        if (flat) {
            out << "[";
            for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ", " : "") << dump(j[i], indent);
            out << "]";
        } else {
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i)
                out << (i ? ",\n" : "") << inner << dump(j[i], indent + 2);
            out << "\n" << pad << "]";
        }
    } else if (j.is_number_float()) {
        const double v = j.get<double>();
        out << (std::isfinite(v) ? format_number(v) : "null");
    } else {
        out << j.dump();
    }
    return out.str();
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, dump(j) + "\n"); }

void ensure_output(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
    const fs::path probe = dir / ".frequc_write_test";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

const fs::path& single_input(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1) throw ConfigError(cfg.command + " expects exactly one --input");
    return cfg.inputs.front();
}

json metrics_json(const sfr::SfrScenario& s, const sfr::Trajectory& traj) {
    const auto m = sfr::metrics(traj);
    json j;
    j["rocof0"] = m.rocof0;
    j["t_db"] = traj.t_db ? json(*traj.t_db) : json(nullptr);
    j["nadir_df"] = m.nadir_df;
    j["nadir_t"] = m.nadir_t;
    j["qss_df"] = m.qss_df;
    j["qss_converged"] = m.qss_converged;
    try {
        j["qss_closed_form"] = sfr::qss_closed_form(s);
    } catch (const DomainError&) {
        j["qss_closed_form"] = nullptr;
    }
    return j;
}

sfr::SfrScenario scenario_from_system(const RunConfig& cfg, const fs::path& dir) {
    const auto sys = grid::load_system(dir);
    if (!cfg.hour) throw ConfigError("simulate from a system directory needs --hour");
    const int h = *cfg.hour - 1;
    if (h < 0 || h >= sys.hours) throw ConfigError("--hour outside 1.." + std::to_string(sys.hours));

    std::vector<int> online(sys.units.size(), 1);
    std::vector<double> droop;
    for (const auto& w : sys.winds) droop.push_back(w.droop_default);
    if (cfg.solution) {
        const auto sol = uc::solution_from_json(read_json(*cfg.solution));
        if (!sol.has_schedule() || sol.commitment.size() != sys.units.size() ||
            sol.droop.size() != sys.winds.size() || sol.hours != sys.hours)
            throw ValidationError("solution does not match the system");
        for (std::size_t i = 0; i < online.size(); ++i) online[i] = sol.commitment[i][h];
        for (std::size_t f = 0; f < droop.size(); ++f) droop[f] = sol.droop[f][h];
    }

    const auto ev = grid::event_params(sys, h);
    sfr::SfrScenario s;
    s.inertia = grid::total_wind_inertia(sys);
    s.damping = ev.damping;
    s.imbalance = ev.imbalance;
    s.dead_band = sys.policy.dead_band;
    s.horizon = sys.policy.horizon;
    for (std::size_t i = 0; i < sys.units.size(); ++i) {
        if (!online[i]) continue;
        const auto& u = sys.units[i];
        s.inertia += grid::unit_inertia(sys, u);
        s.governors.push_back({u.id, u.resp_const, u.droop});
    }
    for (double g : droop) s.wind_droop += g;
    return s;
}

struct SweepPoint {
    double horizon = 0.0;
    freq::SegmentGrid grid;
    double bp = 0.0;
    double oracle = 0.0;
};

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "H,N,nadir_bp,nadir_oracle,rel_err\n";
    for (const auto& p : points) {
        out += format_number(p.horizon) + "," + std::to_string(p.grid.size()) + "," +
               format_number(p.bp) + "," + format_number(p.oracle) + "," +
               format_number(std::abs(p.bp - p.oracle) / p.oracle) + "\n";
    }
    return out;
}

struct ReportColumn {
    std::string name;
    uc::UcSolution sol;
    std::optional<uc::SecurityReport> security;
};

}  // namespace

void RunConfig::validate() const {
    static const std::vector<std::string> commands{"simulate", "tightness", "solve", "report"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw ConfigError("unknown command '" + command + "'");
    if (inputs.empty()) throw ConfigError("--input is required");
    if (segments && *segments < 1) throw ConfigError("--segments must be >= 1");
    if (bound_depth < 0 || bound_depth > bernstein::kMaxBoundDepth)
        throw ConfigError("--bound-depth must lie in [0, " + std::to_string(bernstein::kMaxBoundDepth) + "]");
    if (!(gap >= 0.0 && gap < 1.0)) throw ConfigError("--gap must lie in [0, 1)");
    if (!(time_limit > 0.0)) throw ConfigError("--time-limit must be > 0");
    if (!(dt > 0.0)) throw ConfigError("--dt must be > 0");
    if (jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (imbalance && !(*imbalance > 0.0)) throw ConfigError("--dp must be > 0");
    uc::mode_from_string(mode);
    if (drcc_strategy) risk::strategy_from_string(*drcc_strategy);
}

int cmd_simulate(const RunConfig& cfg) {
    const fs::path& in = single_input(cfg);
    sfr::SfrScenario s = fs::is_directory(in) ? scenario_from_system(cfg, in)
                                              : sfr::scenario_from_json(read_json(in));
    if (cfg.imbalance) s.imbalance = *cfg.imbalance;
    s.validate();
    ensure_output(cfg.output);
    const auto traj = sfr::simulate(s, cfg.dt);
    write_file_atomic(cfg.output / "trajectory.csv", sfr::trajectory_csv(traj));
    const json m = metrics_json(s, traj);
    write_json(cfg.output / "metrics.json", m);
    if (!cfg.quiet) std::cout << dump(m) << "\n";
    return kOk;
}

int cmd_tightness(const RunConfig& cfg) {
    const fs::path& in = single_input(cfg);
    const sfr::SfrScenario base = sfr::scenario_from_json(read_json(in));
    base.validate();
    ensure_output(cfg.output);

    std::vector<SweepPoint> even, uneven;
    const std::vector<int> counts = cfg.segments ? std::vector<int>{*cfg.segments} : kSweepSegments;
    for (double h : kSweepHorizons)
        for (int n : counts) even.push_back({h, freq::SegmentGrid::even(h, n), 0.0, 0.0});
    uneven.push_back({kUnevenHorizon, freq::SegmentGrid::from_fractions(kUnevenHorizon, kUnevenFractions), 0.0, 0.0});

    // One oracle run per distinct oracle horizon.
    std::vector<double> oracle_h;
    for (const auto* pts : {&even, &uneven})
        for (const auto& p : *pts) oracle_h.push_back(std::max(p.horizon, kMinOracleHorizon));
    std::sort(oracle_h.begin(), oracle_h.end());
    oracle_h.erase(std::unique(oracle_h.begin(), oracle_h.end()), oracle_h.end());
    std::vector<double> oracle_nadir(oracle_h.size());
    parallel_for(oracle_h.size(), cfg.jobs, [&](std::size_t i) {
        auto s = base;
        s.horizon = oracle_h[i];
        oracle_nadir[i] = sfr::metrics(sfr::simulate(s, cfg.dt)).nadir_df;
    });
    auto oracle_for = [&](double h) {
        const double key = std::max(h, kMinOracleHorizon);
        return oracle_nadir[static_cast<std::size_t>(
            std::lower_bound(oracle_h.begin(), oracle_h.end(), key) - oracle_h.begin())];
    };

    std::vector<SweepPoint*> all;
    for (auto& p : even) all.push_back(&p);
    for (auto& p : uneven) all.push_back(&p);
    parallel_for(all.size(), cfg.jobs, [&](std::size_t i) {
        auto& p = *all[i];
        auto s = base;
        s.horizon = p.horizon;
        p.bp = freq::solve_fixed(s, p.grid).nadir().first;
        p.oracle = oracle_for(p.horizon);
    });

    write_file_atomic(cfg.output / "tightness.csv", sweep_csv(even));
    write_file_atomic(cfg.output / "tightness_uneven.csv", sweep_csv(uneven));

    // Plot data for the uneven grid: spline and oracle on the oracle's time base.
    {
        auto s = base;
        s.horizon = kUnevenHorizon;
        const auto spline = freq::solve_fixed(s, uneven.front().grid);
        const auto traj = sfr::simulate(s, cfg.dt);
        const double t0 = traj.t_db.value_or(0.0);
        std::string csv = "t,df_oracle,df_bp\n";
        const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.01 / cfg.dt)));
        for (std::size_t i = 0; i < traj.size(); i += stride) {
            const double tau = traj.t[i] - t0;
            csv += format_number(traj.t[i]) + "," + format_number(traj.df[i]) + ",";
            csv += (traj.t_db && tau >= 0.0 && tau <= spline.grid.horizon()) ? format_number(spline.df_at(tau)) : "";
            csv += "\n";
        }
        write_file_atomic(cfg.output / "tightness_curves.csv", csv);
    }

    if (!cfg.quiet) {
        std::cout << sweep_csv(even) << "uneven " << format_number(uneven.front().bp) << " vs "
                  << format_number(uneven.front().oracle) << "\n";
    }
    return kOk;
}

int cmd_solve(const RunConfig& cfg) {
    const fs::path& in = single_input(cfg);
    auto sys = grid::load_system(in);
    if (cfg.drcc_strategy) sys.risk.strategy = risk::strategy_from_string(*cfg.drcc_strategy);
    uc::BuildOptions opt;
    opt.mode = uc::mode_from_string(cfg.mode);
    opt.bound_depth = cfg.bound_depth;
    if (cfg.segments) opt.grid = freq::SegmentGrid::even(sys.policy.horizon, *cfg.segments);
    ensure_output(cfg.output);
    auto backend = milp::make_backend();

    const auto model = uc::build(sys, opt);
    milp::SolveOptions so;
    so.gap = cfg.gap;
    so.time_limit = cfg.time_limit;
    const auto sol = uc::solve(model, sys, *backend, so);

    if (!sol.has_schedule()) {
        json j = uc::solution_to_json(sol);
        if (!model.violated_constant_rows.empty()) j["violated_rows"] = model.violated_constant_rows;
        write_json(cfg.output / "solution.json", j);
        if (sol.status == milp::SolveStatus::timeout) {
            std::cerr << "frequc: time limit reached without a feasible schedule\n";
            return kNoIncumbent;
        }
        std::cerr << "frequc: model is infeasible";
        if (!model.violated_constant_rows.empty())
            std::cerr << " (first violated row: " << model.violated_constant_rows.front() << ")";
        std::cerr << "\n";
        return kInfeasible;
    }

    const auto report = uc::validate(sol, sys, 0.01, cfg.dt);
    write_json(cfg.output / "solution.json", uc::solution_to_json(sol, &report));
    write_json(cfg.output / "security_report.json", uc::report_to_json(report));
    if (!cfg.quiet) {
        std::cout << "mode " << sol.mode << ": " << milp::to_string(sol.status) << ", cost "
                  << format_number(sol.objective) << ", security " << (report.all_pass() ? "pass" : "FAIL")
                  << " (" << report.failures() << " failing hours; max nadir "
                  << format_number(report.max_nadir()) << " Hz, max qss " << format_number(report.max_qss())
                  << " Hz)\n";
    }
    return kOk;
}

int cmd_report(const RunConfig& cfg) {
    std::vector<ReportColumn> cols;
    for (const auto& in : cfg.inputs) {
        const fs::path file = fs::is_directory(in) ? in / "solution.json" : in;
        const json j = read_json(file);
        ReportColumn c;
        c.sol = uc::solution_from_json(j);
        if (j.contains("security")) c.security = uc::report_from_json(j.at("security"));
        const auto parent = file.parent_path().filename().string();
        c.name = parent.empty() ? c.sol.mode : parent;
        cols.push_back(std::move(c));
    }
    ensure_output(cfg.output);

    auto sum = [](const std::vector<std::vector<double>>& t) {
        double s = 0.0;
        for (const auto& r : t)
            for (double v : r) s += v;
        return s;
    };
    using Getter = std::function<std::string(const ReportColumn&)>;
    auto n = [](double v) { return format_number(v); };
    auto sec = [&](double (uc::SecurityReport::*f)() const) {
        return Getter([=](const ReportColumn& c) { return c.security ? n(((*c.security).*f)()) : std::string("n/a"); });
    };
    const std::vector<std::pair<std::string, Getter>> rows{
        {"mode", [](const ReportColumn& c) { return c.sol.mode; }},
        {"status", [](const ReportColumn& c) { return milp::to_string(c.sol.status); }},
        {"total_cost", [&](const ReportColumn& c) { return n(c.sol.cost.total()); }},
        {"startup_shutdown_cost", [&](const ReportColumn& c) { return n(c.sol.cost.startup_shutdown); }},
        {"fuel_cost", [&](const ReportColumn& c) { return n(c.sol.cost.fuel); }},
        {"thermal_reserve_cost", [&](const ReportColumn& c) { return n(c.sol.cost.thermal_reserve); }},
        {"wind_reserve_cost", [&](const ReportColumn& c) { return n(c.sol.cost.wind_reserve); }},
        {"thermal_reserve_mwh", [&](const ReportColumn& c) { return n(sum(c.sol.reserve)); }},
        {"wind_reserve_mwh", [&](const ReportColumn& c) { return n(sum(c.sol.wind_reserve)); }},
        {"max_rocof_hz_s", sec(&uc::SecurityReport::max_rocof)},
        {"max_nadir_hz", sec(&uc::SecurityReport::max_nadir)},
        {"max_qss_hz", sec(&uc::SecurityReport::max_qss)},
        {"failing_hours", [](const ReportColumn& c) {
             return c.security ? std::to_string(c.security->failures()) : std::string("n/a");
         }},
        {"wall_time_s", [&](const ReportColumn& c) { return n(c.sol.wall_time); }},
    };

    std::string csv = "metric";
    for (const auto& c : cols) csv += "," + c.name;
    csv += "\n";
    std::size_t w0 = 6;
    for (const auto& r : rows) w0 = std::max(w0, r.first.size());
    std::vector<std::size_t> widths;
    for (const auto& c : cols) {
        std::size_t w = c.name.size();
        for (const auto& r : rows) w = std::max(w, r.second(c).size());
        widths.push_back(w);
    }
    auto padr = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    auto padl = [](const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };
    std::string txt = padr("metric", w0);
    for (std::size_t k = 0; k < cols.size(); ++k) txt += "  " + padl(cols[k].name, widths[k]);
    txt += "\n";
    for (const auto& r : rows) {
        csv += r.first;
        txt += padr(r.first, w0);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto v = r.second(cols[k]);
            csv += "," + v;
            txt += "  " + padl(v, widths[k]);
        }
        csv += "\n";
        txt += "\n";
    }
    write_file_atomic(cfg.output / "report.csv", csv);
    write_file_atomic(cfg.output / "report.txt", txt);
    if (!cfg.quiet) std::cout << txt;
    return kOk;
}

int main(int argc, const char* const* argv) {
    CLI::App app{"Frequency-constrained unit commitment"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::vector<std::string> inputs;
    std::string output = ".";
    std::optional<int> hour, segments;
    std::optional<double> dp;
    std::optional<std::string> strategy, solution;

    auto common = [&](CLI::App* sub, bool many_inputs) {
        auto* opt = sub->add_option("--input,-i", inputs, many_inputs ? "Solution files or run directories"
                                                                     : "Input file or system directory")
                        ->required();
        if (!many_inputs) opt->expected(1);
        sub->add_option("--output,-o", output, "Output directory");
        sub->add_option("--jobs", cfg.jobs, "Concurrent workers");
        sub->add_flag("--quiet,-q", cfg.quiet, "No summary on stdout");
    };
    auto* sim = app.add_subcommand("simulate", "Simulate one frequency event with the reference oracle");
    common(sim, false);
    sim->add_option("--dt", cfg.dt, "Integration step (s)");
    sim->add_option("--hour", hour, "Hour (1-based) when the input is a system directory");
    sim->add_option("--dp", dp, "Override the imbalance (MW)");
    sim->add_option("--solution", solution, "Take commitment and droops from a solution.json");

    auto* tight = app.add_subcommand("tightness", "Spline nadir error against the oracle");
    common(tight, false);
    tight->add_option("--dt", cfg.dt, "Oracle integration step (s)");
    tight->add_option("--segments", segments, "Only this segment count in the even sweep");

    auto* solve = app.add_subcommand("solve", "Build, solve and validate the UC model");
    common(solve, false);
    solve->add_option("--mode", cfg.mode, "no_freq or freq_full");
    solve->add_option("--segments", segments, "Even segment count (default: policy fractions)");
    solve->add_option("--bound-depth", cfg.bound_depth, "Subdivision depth of the bound rows");
    solve->add_option("--drcc-strategy", strategy, "gaussian, wasserstein_cvar or fixed");
    solve->add_option("--gap", cfg.gap, "Relative MIP gap");
    solve->add_option("--time-limit", cfg.time_limit, "Solver time limit (s)");
    solve->add_option("--dt", cfg.dt, "Validation integration step (s)");

    auto* report = app.add_subcommand("report", "Side-by-side cost and security table");
    common(report, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    for (const auto& s : inputs) cfg.inputs.emplace_back(s);
    cfg.output = output;
    cfg.segments = segments;
    cfg.hour = hour;
    cfg.imbalance = dp;
    cfg.drcc_strategy = strategy;
    if (solution) cfg.solution = fs::path(*solution);

    try {
        cfg.validate();
        if (cfg.command == "simulate") return cmd_simulate(cfg);
        if (cfg.command == "tightness") return cmd_tightness(cfg);
        if (cfg.command == "solve") return cmd_solve(cfg);
        return cmd_report(cfg);
    } catch (const ParseError& e) {
        std::cerr << "frequc: " << e.what() << "\n";
        return kBadInput;
    } catch (const ValidationError& e) {
        std::cerr << "frequc: " << e.what() << "\n";
        return kBadInput;
    } catch (const ConfigError& e) {
        std::cerr << "frequc: " << e.what() << "\n";
        return kBadInput;
    } catch (const DomainError& e) {
        std::cerr << "frequc: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "frequc: internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace frequc::cli
