#include <cmath>
#include <limits>

#include "frequc/errors.hpp"
#include "frequc/uc_milp.hpp"

namespace frequc::uc {

namespace {

constexpr long kMaxAssignments = 1L << 20;

std::vector<double> droop_levels(const grid::WindFarm& w) {
    const int bits = freq::droop_bits(w.droop_min, w.droop_max, w.droop_step);
    std::vector<double> out;
    for (long code = 0; code < (1L << bits); ++code) {
        const double v = w.droop_min + static_cast<double>(code) * w.droop_step;
        if (v <= w.droop_max + 1e-9) out.push_back(v);
    }
    return out;
}

}  // namespace

BruteForceResult brute_force_small(const grid::PowerSystem& sys, const BuildOptions& options,
                                   milp::SolverBackend& backend) {
    const int nu = static_cast<int>(sys.units.size());
    const int nf = static_cast<int>(sys.winds.size());
    const int T = sys.hours;
    if (nu > 2) throw ConfigError("brute force: at most 2 units");
    if (T > 3) throw ConfigError("brute force: at most 3 hours");

    std::vector<std::vector<double>> levels(static_cast<std::size_t>(nf));
    long droop_codes = 1;
    if (options.mode == Mode::freq_full) {
        for (int f = 0; f < nf; ++f) {
            levels[f] = droop_levels(sys.winds[f]);
            if (levels[f].size() > 4) throw ConfigError("brute force: at most 4 droop levels per farm");
            for (int h = 0; h < T; ++h) {
                droop_codes *= static_cast<long>(levels[f].size());
                if (droop_codes > kMaxAssignments) throw ConfigError("brute force: instance too large");
            }
        }
    }
    const long commit_codes = 1L << (nu * T);
    if (commit_codes * droop_codes > kMaxAssignments) throw ConfigError("brute force: instance too large");

    BruteForceResult best;
    best.objective = std::numeric_limits<double>::infinity();
    milp::SolveOptions lp;
    lp.gap = 0.0;

    for (long cc = 0; cc < commit_codes; ++cc) {
        FixedBinaries fx;
        fx.commitment.assign(static_cast<std::size_t>(nu), std::vector<int>(static_cast<std::size_t>(T), 0));
        for (int i = 0; i < nu; ++i)
            for (int h = 0; h < T; ++h) fx.commitment[i][h] = static_cast<int>((cc >> (i * T + h)) & 1L);

        for (long dc = 0; dc < droop_codes; ++dc) {
            ++best.assignments;
            if (options.mode == Mode::freq_full) {
                fx.droop.assign(static_cast<std::size_t>(nf), std::vector<double>(static_cast<std::size_t>(T)));
                long rest = dc;
                for (int f = 0; f < nf; ++f) {
                    const auto n = static_cast<long>(levels[f].size());
                    for (int h = 0; h < T; ++h) {
                        fx.droop[f][h] = levels[f][static_cast<std::size_t>(rest % n)];
                        rest /= n;
                    }
                }
            }
            const UcModel m = build_fixed(sys, options, fx);
            if (!m.violated_constant_rows.empty()) continue;
            ++best.lp_solves;
            const auto res = backend.solve(m.model, lp);
            if (res.status != milp::SolveStatus::optimal || !res.has_solution()) continue;
            if (res.objective < best.objective) {
                best.objective = res.objective;
                best.best = fx;
                best.feasible = true;
            }
        }
    }
    if (!best.feasible) best.objective = 0.0;
    return best;
}

}  // namespace frequc::uc
