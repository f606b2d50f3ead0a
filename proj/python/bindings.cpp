#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "frequc/bernstein.hpp"
#include "frequc/cli.hpp"
#include "frequc/errors.hpp"
#include "frequc/freq_algebra.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/risk.hpp"
#include "frequc/sfr_oracle.hpp"
#include "frequc/uc_milp.hpp"

namespace py = pybind11;
using namespace frequc;

namespace {

// Scenarios and results cross the boundary as JSON text; the Python side
// converts to and from dicts.
sfr::SfrScenario scenario(const std::string& text) {
    auto s = sfr::scenario_from_json(nlohmann::json::parse(text));
    s.validate();
    return s;
}

py::dict simulate(const std::string& text, double dt) {
    const auto traj = sfr::simulate(scenario(text), dt);
    const auto m = sfr::metrics(traj);
    py::dict out;
    out["t"] = traj.t;
    out["df"] = traj.df;
    out["pfr_g"] = traj.pfr_g;
    out["pfr_w"] = traj.pfr_w;
    out["t_db"] = traj.t_db ? py::cast(*traj.t_db) : py::none();
    out["rocof0"] = m.rocof0;
    out["nadir_df"] = m.nadir_df;
    out["nadir_t"] = m.nadir_t;
    out["qss_df"] = m.qss_df;
    out["qss_converged"] = m.qss_converged;
    return out;
}

py::tuple spline_nadir(const std::string& text, double horizon, std::optional<int> segments,
                       std::optional<std::vector<double>> fractions) {
    auto s = scenario(text);
    s.horizon = horizon;
    if (segments.has_value() == fractions.has_value())
        throw ConfigError("give exactly one of segments or fractions");
    const auto grid = segments ? freq::SegmentGrid::even(horizon, *segments)
                               : freq::SegmentGrid::from_fractions(horizon, *fractions);
    const auto nadir = freq::solve_fixed(s, grid).nadir();
    return py::make_tuple(nadir.first, nadir.second);
}

std::string solve(const std::string& system_dir, const std::string& mode, double gap, double time_limit,
                  std::optional<int> segments) {
    const auto sys = grid::load_system(system_dir);
    uc::BuildOptions bo;
    bo.mode = uc::mode_from_string(mode);
    if (segments) bo.grid = freq::SegmentGrid::even(sys.policy.horizon, *segments);
    milp::SolveOptions so;
    so.gap = gap;
    so.time_limit = time_limit;
    auto backend = milp::make_backend();
    const auto sol = uc::solve(uc::build(sys, bo), sys, *backend, so);
    if (!sol.has_schedule()) return uc::solution_to_json(sol).dump();
    const auto report = uc::validate(sol, sys);
    return uc::solution_to_json(sol, &report).dump();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "frequc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    py::gil_scoped_release release;
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

PYBIND11_MODULE(_frequc, m) {
    m.doc() = "Frequency-constrained unit commitment";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("simulate", &simulate, py::arg("scenario_json"), py::arg("dt") = sfr::kDefaultDt);
    m.def("rocof_initial", [](const std::string& t) { return sfr::rocof_initial(scenario(t)); });
    m.def("qss_closed_form", [](const std::string& t) { return sfr::qss_closed_form(scenario(t)); });
    m.def("spline_nadir", &spline_nadir, py::arg("scenario_json"), py::arg("horizon"),
          py::arg("segments") = py::none(), py::arg("fractions") = py::none());

    m.def("bernstein_eval", [](const std::array<double, 4>& c, double t) {
        return bernstein::eval(bernstein::BpCoeffs(c[0], c[1], c[2], c[3]), t);
    });
    m.def("bernstein_hull_max", [](const std::array<double, 4>& c, int depth) {
        return bernstein::hull_max(bernstein::BpCoeffs(c[0], c[1], c[2], c[3]), depth);
    });

    m.def("normal_upper_quantile", &risk::normal_upper_quantile);
    m.def(
        "risk_coefficient",
        [](double epsilon, double radius, double sigma, const std::string& strategy, std::optional<double> cp) {
            return risk::risk_coefficient(epsilon, radius, sigma, risk::strategy_from_string(strategy), cp);
        },
        py::arg("epsilon"), py::arg("radius"), py::arg("sigma"), py::arg("strategy") = "gaussian",
        py::arg("fixed_cp") = py::none());
    m.def("drcc_threshold", [](double mu, double sigma, double cp) { return risk::drcc_threshold(mu, sigma, cp).value; });

    m.def("solve", &solve, py::arg("system_dir"), py::arg("mode") = "freq_full", py::arg("gap") = 1e-3,
          py::arg("time_limit") = 3600.0, py::arg("segments") = py::none());
    m.def("run_cli", &run_cli, py::arg("args"));
}
