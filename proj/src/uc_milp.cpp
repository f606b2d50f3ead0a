#include "frequc/uc_milp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "frequc/bernstein.hpp"
#include "frequc/errors.hpp"
#include "frequc/format.hpp"
#include "frequc/risk.hpp"
#include "frequc/sfr_oracle.hpp"

namespace frequc::uc {

using milp::LinExpr;
using milp::Sense;
using milp::Tag;
using milp::VarId;

std::string to_string(Mode m) { return m == Mode::no_freq ? "no_freq" : "freq_full"; }

Mode mode_from_string(const std::string& name) {
    if (name == "no_freq") return Mode::no_freq;
    if (name == "freq_full") return Mode::freq_full;
    throw ConfigError("unknown mode '" + name + "' (expected no_freq or freq_full)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string at(const std::string& base, const std::string& id, int h) {
    return base + "_" + id + "_t" + std::to_string(h + 1);
}

std::string at(const std::string& base, int h) { return base + "_t" + std::to_string(h + 1); }

bool constant_row_holds(double lhs, Sense sense, double rhs) {
    constexpr double tol = 1e-9;
    switch (sense) {
        case Sense::le: return lhs <= rhs + tol;
        case Sense::ge: return lhs >= rhs - tol;
        case Sense::eq: return std::abs(lhs - rhs) <= tol;
    }
    return false;
}

/// DRCC right-hand side for one farm-hour.
risk::Threshold wind_threshold(const grid::PowerSystem& sys, double mu, double sigma) {
    const auto& rc = sys.risk;
    if (sigma > 0.0) return risk::drcc_threshold(mu, sigma, risk::risk_coefficient(rc, sigma));
    // Degenerate forecast: only the ambiguity shift r/eps of the CVaR bound survives.
    const double shift = rc.strategy == risk::Strategy::wasserstein_cvar ? rc.radius / rc.epsilon : 0.0;
    risk::risk_coefficient(rc.epsilon, rc.radius, 1.0, rc.strategy, rc.fixed_cp);  // range checks
    return risk::drcc_threshold(mu, 1.0, shift);
}

class Builder {
public:
    Builder(const grid::PowerSystem& sys, const BuildOptions& opt, const FixedBinaries* fixed)
        : sys_(sys), opt_(opt), fixed_(fixed) {}

    UcModel run() {
        sys_.validate();
        j_ = bernstein::bound_rows(opt_.bound_depth);
        out_.mode = opt_.mode;
        out_.hours = sys_.hours;
        out_.grid = opt_.grid ? *opt_.grid
                              : freq::SegmentGrid::from_fractions(sys_.policy.horizon,
                                                                  sys_.policy.segment_fracs);
        out_.grid.validate();
        if (opt_.mode == Mode::freq_full && !(sys_.policy.qss_max > sys_.policy.dead_band))
            throw ConfigError("policy: qss_max must exceed the dead band");
        check_fixed();

        units();
        winds();
        for (int h = 0; h < sys_.hours; ++h) {
            network(h);
            if (opt_.mode == Mode::no_freq) {
                reserve_requirement(h);
            } else {
                security(h);
            }
        }
        return std::move(out_);
    }

private:
    void row(const std::string& name, const LinExpr& e, Sense sense, double rhs, Tag tag) {
        bool any = false;
        for (const auto& term : e.terms) any = any || term.second != 0.0;
        if (!any) {
            if (!constant_row_holds(e.constant, sense, rhs)) out_.violated_constant_rows.push_back(name);
            return;
        }
        out_.model.add_constraint(name, e, sense, rhs, std::move(tag));
    }

    void check_fixed() const {
        if (!fixed_) return;
        if (fixed_->commitment.size() != sys_.units.size())
            throw ConfigError("fixed commitment does not match the unit count");
        for (const auto& c : fixed_->commitment)
            if (static_cast<int>(c.size()) != sys_.hours)
                throw ConfigError("fixed commitment does not match the horizon");
        if (opt_.mode == Mode::freq_full) {
            if (fixed_->droop.size() != sys_.winds.size())
                throw ConfigError("fixed droop does not match the farm count");
            for (const auto& d : fixed_->droop)
                if (static_cast<int>(d.size()) != sys_.hours)
                    throw ConfigError("fixed droop does not match the horizon");
        }
    }

    void units() {
        const int T = sys_.hours;
        const std::size_t nu = sys_.units.size();
        out_.commit.assign(nu, {});
        out_.startup.assign(nu, {});
        out_.shutdown.assign(nu, {});
        out_.power.assign(nu, {});
        out_.reserve.assign(nu, {});
        out_.segment.assign(nu, {});
        auto& m = out_.model;
        LinExpr objective;

        for (std::size_t i = 0; i < nu; ++i) {
            const auto& u = sys_.units[i];
            const auto nseg = static_cast<double>(u.fuel_segments.size());
            for (int h = 0; h < T; ++h) {
                if (fixed_) {
                    const int on = fixed_->commitment[i][h];
                    const int prev = h > 0 ? fixed_->commitment[i][h - 1] : 0;
                    out_.commit[i].emplace_back(static_cast<double>(on));
                    out_.startup[i].emplace_back(on > prev ? 1.0 : 0.0);
                    out_.shutdown[i].emplace_back(on < prev ? 1.0 : 0.0);
                } else {
                    out_.commit[i].push_back(LinExpr::var(m.add_binary(at("I", u.id, h))));
                    out_.startup[i].push_back(LinExpr::var(m.add_binary(at("U", u.id, h))));
                    out_.shutdown[i].push_back(LinExpr::var(m.add_binary(at("D", u.id, h))));
                }
                out_.power[i].push_back(m.add_var(at("P", u.id, h), 0.0, u.p_max));
                out_.reserve[i].push_back(m.add_var(at("R", u.id, h), 0.0, u.p_max));
                std::vector<VarId> segs;
                for (std::size_t k = 0; k < u.fuel_segments.size(); ++k) {
                    segs.push_back(m.add_var(at("p" + std::to_string(k + 1), u.id, h), 0.0,
                                             (u.p_max - u.p_min) / nseg));
                }
                out_.segment[i].push_back(segs);
            }

            for (int h = 0; h < T; ++h) {
                const LinExpr& on = out_.commit[i][h];
                const LinExpr& up = out_.startup[i][h];
                const LinExpr& down = out_.shutdown[i][h];
                const VarId p = out_.power[i][h];
                const VarId r = out_.reserve[i][h];
                const Tag tag{"unit", h, -1};

                LinExpr fuel = LinExpr::var(p) - u.p_min * on;
                for (VarId s : out_.segment[i][h]) fuel.add(s, -1.0);
                row(at("fuel", u.id, h), fuel, Sense::eq, 0.0, tag);

                row(at("updown", u.id, h), up + down, Sense::le, 1.0, tag);
                LinExpr logic = up - down - on;
                if (h > 0) logic += out_.commit[i][h - 1];
                row(at("logic", u.id, h), logic, Sense::eq, 0.0, tag);

                const int last_up = std::min(T - 1, h + u.min_up - 1);
                LinExpr minup = -static_cast<double>(last_up - h + 1) * up;
                for (int k = h; k <= last_up; ++k) minup += out_.commit[i][k];
                row(at("minup", u.id, h), minup, Sense::ge, 0.0, tag);

                const int last_down = std::min(T - 1, h + u.min_down - 1);
                const double n_down = static_cast<double>(last_down - h + 1);
                LinExpr mindown = LinExpr(n_down) - n_down * down;
                for (int k = h; k <= last_down; ++k) mindown -= out_.commit[i][k];
                row(at("mindown", u.id, h), mindown, Sense::ge, 0.0, tag);

                row(at("pmin", u.id, h), LinExpr::var(p) - u.p_min * on, Sense::ge, 0.0, tag);
                row(at("pmax", u.id, h), LinExpr::var(p).add(r, 1.0) - u.p_max * on, Sense::le,
                    0.0, tag);

                // Ramping from the previous hour (zero output before hour 0).
                LinExpr ramp_up = LinExpr::var(p) - u.ramp_startup * up;
                LinExpr ramp_down = LinExpr::var(p, -1.0) - u.ramp_down * on - u.ramp_shutdown * down;
                if (h > 0) {
                    ramp_up.add(out_.power[i][h - 1], -1.0);
                    ramp_up -= u.ramp_up * out_.commit[i][h - 1];
                    ramp_down.add(out_.power[i][h - 1], 1.0);
                }
                row(at("rampup", u.id, h), ramp_up, Sense::le, 0.0, tag);
                row(at("rampdown", u.id, h), ramp_down, Sense::le, 0.0, tag);

                objective += u.cost_startup * up;
                objective += u.cost_shutdown * down;
                objective += u.cost_online * on;
                for (std::size_t k = 0; k < u.fuel_segments.size(); ++k)
                    objective.add(out_.segment[i][h][k], u.fuel_segments[k]);
                objective.add(r, u.reserve_cost);
            }
        }
        m.add_objective(objective);
    }

    void winds() {
        const std::size_t nf = sys_.winds.size();
        auto& m = out_.model;
        out_.wind_power.assign(nf, {});
        out_.wind_reserve.assign(nf, {});
        out_.droop.assign(nf, {});
        out_.threshold.assign(nf, {});
        out_.threshold_clipped.assign(nf, {});
        expansions_.assign(nf, {});
        LinExpr objective;
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& w = sys_.winds[f];
            for (int h = 0; h < sys_.hours; ++h) {
                const VarId p = m.add_var(at("Pw", w.id, h), 0.0, kInf);
                const VarId r = m.add_var(at("Rw", w.id, h), 0.0, kInf);
                out_.wind_power[f].push_back(p);
                out_.wind_reserve[f].push_back(r);
                const auto th = wind_threshold(sys_, w.forecast[h], w.sigma[h]);
                out_.threshold[f].push_back(th.value);
                out_.threshold_clipped[f].push_back(th.clipped);
                row(at("drcc", w.id, h), LinExpr::var(p).add(r, 1.0), Sense::le, th.value,
                    Tag{"drcc", h, -1});
                objective.add(r, w.reserve_cost);

                if (opt_.mode == Mode::no_freq) {
                    out_.droop[f].emplace_back(w.droop_default);
                } else if (fixed_) {
                    out_.droop[f].emplace_back(fixed_->droop[f][h]);
                } else {
                    auto e = freq::expand_droop(m, "Gw_" + w.id, w.droop_min, w.droop_max,
                                                w.droop_step, h);
                    out_.droop[f].push_back(e.expr());
                    expansions_[f].push_back(std::move(e));
                }
            }
        }
        m.add_objective(objective);
    }

    void network(int h) {
        LinExpr balance;
        const auto nb = static_cast<Eigen::Index>(sys_.network.buses.size());
        std::vector<LinExpr> injection(static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < sys_.units.size(); ++i) {
            balance.add(out_.power[i][h], 1.0);
            injection[sys_.network.bus_index(sys_.units[i].bus)].add(out_.power[i][h], 1.0);
        }
        for (std::size_t f = 0; f < sys_.winds.size(); ++f) {
            balance.add(out_.wind_power[f][h], 1.0);
            injection[sys_.network.bus_index(sys_.winds[f].bus)].add(out_.wind_power[f][h], 1.0);
        }
        for (Eigen::Index b = 0; b < nb; ++b) injection[b].constant -= sys_.load[b][h];
        row(at("balance", h), balance, Sense::eq, sys_.total_load(h), Tag{"balance", h, -1});

        const auto& s = sys_.network.ptdf;
        for (std::size_t l = 0; l < sys_.network.lines.size(); ++l) {
            const auto& line = sys_.network.lines[l];
            LinExpr flow;
            for (Eigen::Index b = 0; b < nb; ++b) {
                const double f = s(static_cast<Eigen::Index>(l), b);
                if (f != 0.0) flow += f * injection[b];
            }
            row(at("flowmax", line.id, h), flow, Sense::le, line.limit, Tag{"line", h, -1});
            row(at("flowmin", line.id, h), flow, Sense::ge, -line.limit, Tag{"line", h, -1});
        }
    }

    void reserve_requirement(int h) {
        LinExpr total;
        for (std::size_t i = 0; i < sys_.units.size(); ++i) total.add(out_.reserve[i][h], 1.0);
        for (std::size_t f = 0; f < sys_.winds.size(); ++f) total.add(out_.wind_reserve[f][h], 1.0);
        row(at("reserve_req", h), total, Sense::ge, grid::event_params(sys_, h).imbalance,
            Tag{"reserve_req", h, -1});
    }

    void security(int h) {
        const auto ev = grid::event_params(sys_, h);
        const auto& pol = sys_.policy;
        LinExpr inertia(grid::total_wind_inertia(sys_));
        LinExpr droop;
        for (std::size_t i = 0; i < sys_.units.size(); ++i) {
            inertia += grid::unit_inertia(sys_, sys_.units[i]) * out_.commit[i][h];
            droop += sys_.units[i].droop * out_.commit[i][h];
        }
        for (std::size_t f = 0; f < sys_.winds.size(); ++f) droop += out_.droop[f][h];

        const auto rocof = freq::rocof_constraint(inertia, ev.imbalance, pol.rocof_max);
        row(at("rocof", h), rocof.expr, rocof.sense, rocof.rhs, Tag{"rocof", h, -1});
        const auto qss = freq::qss_constraint(droop, ev.damping, pol.dead_band, pol.qss_max, ev.imbalance);
        row(at("qss", h), qss.expr, qss.sense, qss.rhs, Tag{"qss", h, -1});

        if (fixed_) {
            fixed_dynamics(h, ev, inertia.constant);
        } else {
            free_dynamics(h, ev);
        }
    }

    void free_dynamics(int h, const grid::EventParams& ev) {
        freq::HourTerms terms;
        terms.hour = h;
        terms.imbalance = ev.imbalance;
        terms.damping = ev.damping;
        terms.dead_band = sys_.policy.dead_band;
        terms.big_m = sys_.policy.nadir_max;
        for (std::size_t i = 0; i < sys_.units.size(); ++i) {
            const auto& u = sys_.units[i];
            terms.units.push_back({u.id, out_.commit[i][h].terms.front().first,
                                   grid::unit_inertia(sys_, u), u.resp_const, u.droop});
        }
        for (std::size_t f = 0; f < sys_.winds.size(); ++f) {
            terms.farms.push_back({sys_.winds[f].id, grid::wind_inertia(sys_, sys_.winds[f]),
                                   expansions_[f][h]});
        }
        auto block = freq::transcribe_dynamics(out_.model, terms, out_.grid);
        freq::nadir_bound(out_.model, block, j_, sys_.policy.nadir_max);
        std::vector<VarId> ru, rw;
        for (std::size_t i = 0; i < sys_.units.size(); ++i) ru.push_back(out_.reserve[i][h]);
        for (std::size_t f = 0; f < sys_.winds.size(); ++f) rw.push_back(out_.wind_reserve[f][h]);
        freq::reserve_bound(out_.model, block, j_, ru, rw);
        out_.blocks.push_back(std::move(block));
    }

    // Binaries known: every product is a number times a coefficient, so the
    // transcription is written directly without big-M rows.
    void fixed_dynamics(int h, const grid::EventParams& ev, double inertia) {
        auto& m = out_.model;
        const auto& kmat = bernstein::integral_matrix();
        const double fdb = sys_.policy.dead_band;
        const double box = sys_.policy.nadir_max;
        const std::size_t nu = sys_.units.size(), nf = sys_.winds.size();
        auto coeffs = [&](const std::string& base, int s, double lo, double hi) {
            std::array<VarId, 4> c{};
            for (int k = 0; k < 4; ++k)
                c[k] = m.add_var(base + "_t" + std::to_string(h + 1) + "_s" + std::to_string(s + 1) +
                                     "_" + std::to_string(k),
                                 lo, hi);
            return c;
        };
        auto tag = [&](const char* fam, int s) { return Tag{fam, h, s}; };
        auto rname = [&](const std::string& base, int s, int r) {
            return base + "_t" + std::to_string(h + 1) + "_s" + std::to_string(s + 1) + "_" +
                   std::to_string(r);
        };

        std::vector<std::array<VarId, 4>> prev_p(nu);
        std::array<VarId, 4> prev_x{};
        for (int s = 0; s < out_.grid.size(); ++s) {
            const double len = out_.grid.lengths[s];
            const auto x = coeffs("df", s, 0.0, box);
            std::vector<std::array<VarId, 4>> p(nu), pw(nf);
            for (std::size_t i = 0; i < nu; ++i)
                if (fixed_->commitment[i][h]) p[i] = coeffs("pfr_" + sys_.units[i].id, s, -kInf, kInf);
            for (std::size_t f = 0; f < nf; ++f) pw[f] = coeffs("pfr_" + sys_.winds[f].id, s, -kInf, kInf);

            for (int r = 0; r < 4; ++r) {
                LinExpr e = LinExpr::var(x[r], 2.0 * inertia / len);
                if (s == 0) {
                    e.constant -= 2.0 * inertia * fdb / len;
                } else {
                    e.add(prev_x[3], -2.0 * inertia / len);
                }
                double krow = 0.0;
                for (int c = 0; c < 4; ++c) {
                    const double kc = kmat(r, c);
                    krow += kc;
                    e.add(x[c], ev.damping * kc);
                    for (std::size_t i = 0; i < nu; ++i)
                        if (fixed_->commitment[i][h]) e.add(p[i][c], kc);
                    for (std::size_t f = 0; f < nf; ++f) e.add(pw[f][c], kc);
                }
                row(rname("swing", s, r), e, Sense::eq, ev.imbalance * krow, tag("swing", s));
            }
            for (std::size_t i = 0; i < nu; ++i) {
                if (!fixed_->commitment[i][h]) continue;
                const auto& u = sys_.units[i];
                for (int r = 0; r < 4; ++r) {
                    LinExpr e = LinExpr::var(p[i][r], u.resp_const / len);
                    if (s > 0) e.add(prev_p[i][3], -u.resp_const / len);
                    double krow = 0.0;
                    for (int c = 0; c < 4; ++c) {
                        krow += kmat(r, c);
                        e.add(p[i][c], kmat(r, c));
                        e.add(x[c], -u.droop * kmat(r, c));
                    }
                    row(rname("gov_" + u.id, s, r), e, Sense::eq, -u.droop * fdb * krow,
                        tag("governor", s));
                }
            }
            for (std::size_t f = 0; f < nf; ++f) {
                const double g = fixed_->droop[f][h];
                for (int r = 0; r < 4; ++r) {
                    row(rname("wpfr_" + sys_.winds[f].id, s, r),
                        LinExpr::var(pw[f][r]).add(x[r], -g), Sense::eq, -g * fdb,
                        tag("wind_pfr", s));
                }
            }
            for (Eigen::Index jr = 0; jr < j_.rows(); ++jr) {
                const int ri = static_cast<int>(jr);
                LinExpr nad;
                for (int c = 0; c < 4; ++c) nad.add(x[c], j_(jr, c));
                row(rname("nadir", s, ri), nad, Sense::le, sys_.policy.nadir_max, tag("nadir", s));
                for (std::size_t i = 0; i < nu; ++i) {
                    if (!fixed_->commitment[i][h]) continue;
                    LinExpr e = LinExpr::var(out_.reserve[i][h], -1.0);
                    for (int c = 0; c < 4; ++c) e.add(p[i][c], j_(jr, c));
                    row(rname("resg" + std::to_string(i), s, ri), e, Sense::le, 0.0, tag("reserve", s));
                }
                for (std::size_t f = 0; f < nf; ++f) {
                    LinExpr e = LinExpr::var(out_.wind_reserve[f][h], -1.0);
                    for (int c = 0; c < 4; ++c) e.add(pw[f][c], j_(jr, c));
                    row(rname("resw" + std::to_string(f), s, ri), e, Sense::le, 0.0, tag("reserve", s));
                }
            }
            prev_x = x;
            prev_p = p;
        }
    }

    const grid::PowerSystem& sys_;
    const BuildOptions& opt_;
    const FixedBinaries* fixed_;
    Eigen::MatrixXd j_;
    UcModel out_;
    std::vector<std::vector<freq::DroopExpansion>> expansions_;  // [farm][hour]
};

}  // namespace

UcModel build(const grid::PowerSystem& sys, const BuildOptions& options) {
    return Builder(sys, options, nullptr).run();
}

UcModel build_fixed(const grid::PowerSystem& sys, const BuildOptions& options,
                    const FixedBinaries& fixed) {
    return Builder(sys, options, &fixed).run();
}


}  // namespace frequc::uc
