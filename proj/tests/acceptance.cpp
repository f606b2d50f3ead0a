// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frequc/bernstein.hpp"
#include "frequc/cli.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/risk.hpp"
#include "frequc/sfr_oracle.hpp"
#include "frequc/uc_milp.hpp"
#include "small_systems.hpp"
#include "support.hpp"

using namespace frequc;
namespace fs = std::filesystem;
using frequc::testing::data_dir;
using frequc::testing::scratch;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

sfr::SfrScenario scenario(const std::string& name) {
    std::ifstream in(data_dir() / "scenarios" / name);
    return sfr::scenario_from_json(nlohmann::json::parse(in));
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "frequc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

// Parse "H,N,nadir_bp,nadir_oracle,rel_err" rows.
struct SweepRow {
    double h, n, bp, oracle, err;
};

std::vector<SweepRow> read_sweep(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        SweepRow r{};
        char c;
        std::istringstream f(line);
        f >> r.h >> c >> r.n >> c >> r.bp >> c >> r.oracle >> c >> r.err;
        rows.push_back(r);
    }
    return rows;
}

const fs::path& tightness_dir() {
    static const fs::path dir = [] {
        auto d = scratch("acceptance_tightness");
        run_cli({"tightness", "-q", "-i", (data_dir() / "scenarios" / "all_online.json").string(), "-o",
                 d.string()});
        return d;
    }();
    return dir;
}

Outcome c1() {
    const double r = sfr::rocof_initial(scenario("g1_only_peak.json"));
    return {std::abs(r - 0.2625) <= 1e-9, "rocof0 = " + fmt("%.12g", r)};
}

Outcome c2() {
    const double q = sfr::qss_closed_form(scenario("g1_only_peak.json"));
    return {std::abs(q - 0.5131) <= 1e-4, "qss = " + fmt("%.6f", q)};
}

Outcome c3() {
    const auto m = sfr::metrics(sfr::simulate(scenario("all_online.json")));
    const double err = std::abs(m.nadir_df - 0.3884) / 0.3884;
    return {err <= 0.01, "nadir = " + fmt("%.6f", m.nadir_df) + ", rel err " + fmt("%.3g", err)};
}

Outcome c4() {
    double e1 = -1, e2 = -1, e8 = -1;
    for (const auto& r : read_sweep(tightness_dir() / "tightness.csv")) {
        if (r.h != 30.0) continue;
        if (r.n == 1) e1 = r.err;
        if (r.n == 2) e2 = r.err;
        if (r.n == 8) e8 = r.err;
    }
    const bool ok = e8 >= 0 && e1 > e2 && e2 > e8 && e1 >= 0.02 && e1 <= 0.05 && e8 <= 0.005;
    return {ok, "H=30 err N=1 " + fmt("%.4g", e1) + ", N=2 " + fmt("%.4g", e2) + ", N=8 " + fmt("%.4g", e8)};
}

Outcome c5() {
    const auto rows = read_sweep(tightness_dir() / "tightness_uneven.csv");
    if (rows.size() != 1) return {false, "missing uneven row"};
    return {rows[0].err <= 0.001, "uneven grid rel err " + fmt("%.4g", rows[0].err)};
}

// Power-form evaluation of the cubic Bernstein polynomial.
double power_eval(const bernstein::BpCoeffs& c, double t) {
    const double s = 1.0 - t;
    return c[0] * s * s * s + 3.0 * c[1] * t * s * s + 3.0 * c[2] * t * t * s + c[3] * t * t * t;
}

Outcome c6() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-10.0, 10.0), unit(0.0, 1.0);
    int bad = 0;
    std::string first;
    auto fail = [&](const std::string& what) {
        if (bad++ == 0) first = what;
    };
    for (int k = 0; k < 10000; ++k) {
        bernstein::BpCoeffs c;
        for (int i = 0; i < 4; ++i) c[i] = coef(rng);
        const double t = unit(rng);

        if (std::abs(bernstein::basis(t).sum() - 1.0) > 1e-12) fail("partition of unity");
        if (std::abs(bernstein::eval(c, t) - power_eval(c, t)) > 1e-10) fail("evaluation");

        const double h = 1e-6, tc = std::clamp(t, h, 1.0 - h);
        const double fd = (power_eval(c, tc + h) - power_eval(c, tc - h)) / (2 * h);
        const double d = bernstein::eval(bernstein::derivative(c), tc);
        if (std::abs(d - fd) > 1e-5 * std::max(1.0, std::abs(fd))) fail("derivative");

        // Quadratic data: the running integral must be exact at both ends.
        const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng);
        bernstein::BpCoeffs q;
        // Quadratic a0 + a1 t + a2 t^2 in cubic Bernstein form.
        q[0] = a0;
        q[1] = a0 + a1 / 3.0;
        q[2] = a0 + 2.0 * a1 / 3.0 + a2 / 3.0;
        q[3] = a0 + a1 + a2;
        const double exact = a0 + a1 / 2.0 + a2 / 3.0;
        if (std::abs(bernstein::integral_unit(q) - exact) > 1e-9) fail("integral");
        const auto ri = bernstein::running_integral(q);
        if (std::abs(ri[0]) > 1e-9 || std::abs(ri[3] - exact) > 1e-9) fail("running integral");

        double true_max = -1e300;
        for (int i = 0; i <= 2000; ++i) true_max = std::max(true_max, power_eval(c, i / 2000.0));
        double prev = 1e300;
        for (int depth = 0; depth <= 3; ++depth) {
            const double hb = bernstein::hull_max(c, depth);
            if (hb < true_max - 1e-9) fail("hull soundness");
            if (hb > prev + 1e-12) fail("hull monotonicity");
            prev = hb;
        }
    }
    return {bad == 0, bad == 0 ? "10000 cases" : std::to_string(bad) + " failures, first: " + first};
}

Outcome c7() {
    const auto sys = grid::load_system(data_dir() / "six_bus");
    auto backend = milp::make_backend();
    milp::SolveOptions opt;
    opt.gap = 0.005;

    uc::BuildOptions bo;
    bo.mode = uc::Mode::no_freq;
    const auto nf = uc::solve(uc::build(sys, bo), sys, *backend, opt);
    bo.mode = uc::Mode::freq_full;
    const auto ff = uc::solve(uc::build(sys, bo), sys, *backend, opt);
    if (!nf.has_schedule() || !ff.has_schedule()) return {false, "a mode returned no schedule"};

    const auto rn = uc::validate(nf, sys);
    const auto rf = uc::validate(ff, sys);
    bool nf_fails = false;
    for (const auto& h : rn.hours) nf_fails = nf_fails || !h.nadir_ok || !h.qss_ok;
    const bool ok = nf_fails && rf.all_pass() && ff.objective >= nf.objective;
    return {ok, "no_freq cost " + fmt("%.2f", nf.objective) + " failing hours " + std::to_string(rn.failures()) +
                    "; freq_full cost " + fmt("%.2f", ff.objective) + " failing hours " +
                    std::to_string(rf.failures()) + ", max nadir " + fmt("%.4f", rf.max_nadir()) +
                    ", max qss " + fmt("%.4f", rf.max_qss())};
}

Outcome c8() {
    auto backend = milp::make_backend();
    milp::SolveOptions opt;
    opt.gap = 0.0;
    uc::BuildOptions bo;
    bo.mode = uc::Mode::freq_full;
    int agree = 0, feasible = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sys = testing::small_system(seed);
        const auto m = uc::solve(uc::build(sys, bo), sys, *backend, opt);
        const auto bf = uc::brute_force_small(sys, bo, *backend);
        if (bf.feasible != m.has_schedule()) continue;
        if (bf.feasible) {
            ++feasible;
            const double rel = std::abs(m.objective - bf.objective) / std::max(1.0, std::abs(bf.objective));
            worst = std::max(worst, rel);
            if (rel > 1e-6) continue;
        }
        ++agree;
    }
    return {agree == 20, std::to_string(agree) + "/20 agree (" + std::to_string(feasible) +
                             " feasible), worst rel diff " + fmt("%.3g", worst)};
}

Outcome c9() {
    const double eps = 0.1, mu = 40.0, sigma = 2.0;
    const double cp = risk::risk_coefficient(eps, 0.0, sigma, risk::Strategy::gaussian);
    const double th = risk::drcc_threshold(mu, sigma, cp).value;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> draw(mu, sigma);
    const int n = 1000000;
    int short_fall = 0;
    for (int i = 0; i < n; ++i) short_fall += draw(rng) < th;
    const double freq = static_cast<double>(short_fall) / n;
    return {freq <= eps + 0.002, "violation frequency " + fmt("%.5f", freq)};
}

Outcome c10() {
    const auto a = scratch("acceptance_det_a");
    const auto b = scratch("acceptance_det_b");
    const auto in = (data_dir() / "scenarios" / "all_online.json").string();
    if (run_cli({"tightness", "-q", "-i", in, "-o", a.string()}) != 0 ||
        run_cli({"tightness", "-q", "-i", in, "-o", b.string(), "--jobs", "4"}) != 0)
        return {false, "tightness run failed"};
    for (const char* f : {"tightness.csv", "tightness_uneven.csv", "tightness_curves.csv"})
        if (slurp(a / f) != slurp(b / f)) return {false, std::string(f) + " differs"};
    return {true, "three files byte-identical"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {"initial RoCoF of the G1-only peak hour", 1.0, c1},
        {"quasi-steady-state deviation", 1.0, c2},
        {"oracle nadir, all units online", 5.0, c3},
        {"spline nadir error shrinks with segments", 60.0, c4},
        {"uneven grid nadir error", 30.0, c5},
        {"Bernstein property suite", 60.0, c6},
        {"six-bus schedules with and without frequency rows", 1800.0, c7},
        {"MILP equals enumeration on small systems", 300.0, c8},
        {"Gaussian chance constraint by Monte Carlo", 10.0, c9},
        {"tightness output determinism", 60.0, c10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && secs <= criteria[i].budget_s;
        if (!pass) ++failed;
        std::printf("criterion %2zu: %s  %s  (%s, %.2f s)\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
