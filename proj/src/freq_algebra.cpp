#include "frequc/freq_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frequc/errors.hpp"

namespace frequc::freq {

using milp::LinExpr;
using milp::Sense;
using milp::Tag;
using milp::VarId;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string idx(const std::string& prefix, int hour, int seg, int k) {
    return prefix + "_t" + std::to_string(hour + 1) + "_s" + std::to_string(seg + 1) + "_" +
           std::to_string(k);
}

Coeffs add_coeffs(milp::MilpModel& model, const std::string& prefix, int hour, int seg,
                  double lower, double upper) {
    Coeffs c{};
    for (int k = 0; k < 4; ++k) c[k] = model.add_var(idx(prefix, hour, seg, k), lower, upper);
    return c;
}

}  // namespace

SegmentGrid SegmentGrid::even(double horizon, int segments) {
    if (segments < 1) throw ConfigError("segment count must be >= 1");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    return {std::vector<double>(static_cast<std::size_t>(segments), horizon / segments)};
}

SegmentGrid SegmentGrid::from_fractions(double horizon, const std::vector<double>& fractions) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (fractions.empty()) throw ConfigError("segment fractions must not be empty");
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw ConfigError("segment fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("segment fractions must sum to 1");
    SegmentGrid g;
    for (double f : fractions) g.lengths.push_back(f * horizon);
    return g;
}

double SegmentGrid::horizon() const { return std::accumulate(lengths.begin(), lengths.end(), 0.0); }

std::vector<double> SegmentGrid::boundaries() const {
    std::vector<double> b{0.0};
    for (double h : lengths) b.push_back(b.back() + h);
    return b;
}

void SegmentGrid::validate() const {
    if (lengths.empty()) throw ConfigError("segment grid is empty");
    for (double h : lengths)
        if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("segment lengths must be positive");
}

milp::Row rocof_constraint(const LinExpr& inertia, double imbalance, double limit) {
    if (!(limit > 0.0)) throw ConfigError("RoCoF limit must be > 0");
    return {2.0 * limit * inertia, Sense::ge, imbalance};
}

milp::Row qss_constraint(const LinExpr& droop, double damping, double dead_band, double limit,
                         double imbalance) {
    if (!(limit > dead_band)) {
        throw ConfigError("QSS limit must exceed the dead band");
    }
    return {(limit - dead_band) * droop, Sense::ge, imbalance - damping * limit};
}

double DroopExpansion::weight(int k) const { return std::ldexp(step, k); }

std::vector<double> DroopExpansion::levels() const {
    std::vector<double> out;
    const long codes = 1L << bits.size();
    for (long code = 0; code < codes; ++code) {
        const double v = offset + static_cast<double>(code) * step;
        if (v <= cap + 1e-9) out.push_back(v);
    }
    return out;
}

LinExpr DroopExpansion::expr() const {
    LinExpr e(offset);
    for (int k = 0; k < num_bits(); ++k) e.add(bits[k], weight(k));
    return e;
}

double DroopExpansion::value(const std::vector<double>& solution) const {
    double v = offset;
    for (int k = 0; k < num_bits(); ++k) v += std::round(solution.at(bits[k])) * weight(k);
    return v;
}

int droop_bits(double droop_min, double droop_max, double droop_step) {
    if (!(droop_step > 0.0)) throw ConfigError("droop step must be > 0");
    const long steps = std::lround((droop_max - droop_min) / droop_step);
    int n = 0;
    while ((1L << n) - 1 < steps) ++n;
    return n;
}

DroopExpansion expand_droop(milp::MilpModel& model, const std::string& prefix, double droop_min,
                            double droop_max, double droop_step, int hour) {
    DroopExpansion e;
    e.offset = droop_min;
    e.step = droop_step;
    e.cap = droop_max;
    const int n = droop_bits(droop_min, droop_max, droop_step);
    for (int k = 0; k < n; ++k)
        e.bits.push_back(model.add_binary(prefix + "_bit_t" + std::to_string(hour + 1) + "_" +
                                          std::to_string(k)));
    const double top = droop_min + std::ldexp(droop_step, n) - droop_step;
    if (top > droop_max + 1e-9) {
        model.add_constraint(prefix + "_cap_t" + std::to_string(hour + 1), e.expr(), Sense::le,
                             droop_max, Tag{"droop_cap", hour, -1});
    }
    return e;
}

Coeffs linearize_products(milp::MilpModel& model, const std::string& prefix, VarId binary,
                          const Coeffs& x, double big_m, const Tag& tag) {
    if (!(big_m > 0.0)) throw ConfigError("big-M must be > 0");
    Coeffs alpha{};
    for (int k = 0; k < 4; ++k) {
        const std::string name = prefix + "_" + std::to_string(k);
        const VarId a = model.add_var(name, -big_m, big_m);
        alpha[k] = a;
        // -M b <= a <= M b
        model.add_constraint(name + "_lo", LinExpr::var(a).add(binary, big_m), Sense::ge, 0.0, tag);
        model.add_constraint(name + "_hi", LinExpr::var(a).add(binary, -big_m), Sense::le, 0.0, tag);
        // x - M(1-b) <= a <= x + M(1-b)
        model.add_constraint(name + "_xlo", LinExpr::var(a).add(x[k], -1.0).add(binary, -big_m),
                             Sense::ge, -big_m, tag);
        model.add_constraint(name + "_xhi", LinExpr::var(a).add(x[k], -1.0).add(binary, big_m),
                             Sense::le, big_m, tag);
    }
    return alpha;
}

FreqBlock transcribe_dynamics(milp::MilpModel& model, const HourTerms& terms,
                              const SegmentGrid& grid) {
    grid.validate();
    if (!(terms.big_m > 0.0)) throw ConfigError("big-M must be > 0");
    const auto& kmat = bernstein::integral_matrix();
    const int hour = terms.hour;
    const int nseg = grid.size();
    const std::size_t nu = terms.units.size(), nf = terms.farms.size();
    const double fdb = terms.dead_band;

    FreqBlock b;
    b.hour = hour;
    b.pfr_g.resize(nu);
    b.pfr_w.resize(nf);
    b.commit_df.resize(nu);
    b.bit_df.resize(nf);
    for (std::size_t j = 0; j < nf; ++j) b.bit_df[j].resize(terms.farms[j].droop.bits.size());

    double wind_inertia = 0.0;
    for (const auto& f : terms.farms) wind_inertia += f.inertia;

    for (int s = 0; s < nseg; ++s) {
        const double h = grid.lengths[s];
        const Tag tag_bigm{"bigm", hour, s};
        const Coeffs x = add_coeffs(model, "df", hour, s, 0.0, terms.big_m);
        b.df.push_back(x);
        for (std::size_t i = 0; i < nu; ++i) {
            const auto& u = terms.units[i];
            b.pfr_g[i].push_back(add_coeffs(model, "pfr_" + u.id, hour, s, -kInf, kInf));
            const std::string p = "idf_" + u.id + "_t" + std::to_string(hour + 1) + "_s" +
                                  std::to_string(s + 1);
            b.commit_df[i].push_back(
                linearize_products(model, p, u.commit, x, terms.big_m, tag_bigm));
        }
        for (std::size_t j = 0; j < nf; ++j) {
            const auto& f = terms.farms[j];
            b.pfr_w[j].push_back(add_coeffs(model, "pfr_" + f.id, hour, s, -kInf, kInf));
            for (int k = 0; k < f.droop.num_bits(); ++k) {
                const std::string p = "wdf_" + f.id + "_b" + std::to_string(k) + "_t" +
                                      std::to_string(hour + 1) + "_s" + std::to_string(s + 1);
                b.bit_df[j][k].push_back(
                    linearize_products(model, p, f.droop.bits[k], x, terms.big_m, tag_bigm));
            }
        }

        // Swing equation: (2/h)(H_sys x - H_sys x_ini) + kD K x + K P_sys = K dP.
        for (int r = 0; r < 4; ++r) {
            LinExpr e;
            for (std::size_t i = 0; i < nu; ++i) e.add(b.commit_df[i][s][r], 2.0 * terms.units[i].inertia / h);
            e.add(x[r], 2.0 * wind_inertia / h);
            if (s == 0) {
                for (std::size_t i = 0; i < nu; ++i)
                    e.add(terms.units[i].commit, -2.0 * terms.units[i].inertia * fdb / h);
                e.constant -= 2.0 * wind_inertia * fdb / h;
            } else {
                for (std::size_t i = 0; i < nu; ++i)
                    e.add(b.commit_df[i][s - 1][3], -2.0 * terms.units[i].inertia / h);
                e.add(b.df[s - 1][3], -2.0 * wind_inertia / h);
            }
            double krow = 0.0;
            for (int c = 0; c < 4; ++c) {
                const double kc = kmat(r, c);
                if (kc == 0.0) continue;
                krow += kc;
                e.add(x[c], terms.damping * kc);
                for (std::size_t i = 0; i < nu; ++i) e.add(b.pfr_g[i][s][c], kc);
                for (std::size_t j = 0; j < nf; ++j) e.add(b.pfr_w[j][s][c], kc);
            }
            model.add_constraint(idx("swing", hour, s, r), e, Sense::eq, terms.imbalance * krow,
                                 Tag{"swing", hour, s});
        }

        // Governors: (T/h)(p - p_ini) + K p = G K (I x - f_db I).
        for (std::size_t i = 0; i < nu; ++i) {
            const auto& u = terms.units[i];
            const Coeffs& p = b.pfr_g[i][s];
            for (int r = 0; r < 4; ++r) {
                LinExpr e;
                e.add(p[r], u.resp_time / h);
                if (s > 0) e.add(b.pfr_g[i][s - 1][3], -u.resp_time / h);
                double krow = 0.0;
                for (int c = 0; c < 4; ++c) {
                    const double kc = kmat(r, c);
                    if (kc == 0.0) continue;
                    krow += kc;
                    e.add(p[c], kc);
                    e.add(b.commit_df[i][s][c], -u.droop * kc);
                }
                e.add(u.commit, u.droop * fdb * krow);
                model.add_constraint(idx("gov_" + u.id, hour, s, r), e, Sense::eq, 0.0,
                                     Tag{"governor", hour, s});
            }
        }

        // Wind: p_w = G_w (x - f_db) with G_w expanded in bits.
        for (std::size_t j = 0; j < nf; ++j) {
            const auto& d = terms.farms[j].droop;
            for (int r = 0; r < 4; ++r) {
                LinExpr e;
                e.add(b.pfr_w[j][s][r], 1.0);
                e.add(x[r], -d.offset);
                e.constant += d.offset * fdb;
                for (int k = 0; k < d.num_bits(); ++k) {
                    e.add(b.bit_df[j][k][s][r], -d.weight(k));
                    e.add(d.bits[k], d.weight(k) * fdb);
                }
                model.add_constraint(idx("wpfr_" + terms.farms[j].id, hour, s, r), e, Sense::eq,
                                     0.0, Tag{"wind_pfr", hour, s});
            }
        }
    }
    return b;
}

void nadir_bound(milp::MilpModel& model, const FreqBlock& block, const Eigen::MatrixXd& j,
                 double limit) {
    for (std::size_t s = 0; s < block.df.size(); ++s) {
        const auto& x = block.df[s];
        for (int k = 0; k < 4; ++k) {
            const auto& var = model.variables()[static_cast<std::size_t>(x[k])];
            model.set_bounds(x[k], std::max(0.0, var.lower), var.upper);
        }
        for (Eigen::Index r = 0; r < j.rows(); ++r) {
            LinExpr e;
            for (int c = 0; c < 4; ++c)
                if (j(r, c) != 0.0) e.add(x[c], j(r, c));
            model.add_constraint(idx("nadir", block.hour, static_cast<int>(s), static_cast<int>(r)),
                                 e, Sense::le, limit,
                                 Tag{"nadir", block.hour, static_cast<int>(s)});
        }
    }
}

void reserve_bound(milp::MilpModel& model, const FreqBlock& block, const Eigen::MatrixXd& j,
                   const std::vector<VarId>& unit_reserves, const std::vector<VarId>& farm_reserves) {
    if (unit_reserves.size() != block.pfr_g.size() || farm_reserves.size() != block.pfr_w.size())
        throw ConfigError("reserve variables do not match the frequency block");
    auto emit = [&](const std::vector<Coeffs>& segs, VarId reserve, const std::string& prefix) {
        for (std::size_t s = 0; s < segs.size(); ++s) {
            for (Eigen::Index r = 0; r < j.rows(); ++r) {
                LinExpr e;
                for (int c = 0; c < 4; ++c)
                    if (j(r, c) != 0.0) e.add(segs[s][c], j(r, c));
                e.add(reserve, -1.0);
                model.add_constraint(
                    idx(prefix, block.hour, static_cast<int>(s), static_cast<int>(r)), e,
                    Sense::le, 0.0, Tag{"reserve", block.hour, static_cast<int>(s)});
            }
        }
    };
    for (std::size_t i = 0; i < unit_reserves.size(); ++i)
        emit(block.pfr_g[i], unit_reserves[i], "resg" + std::to_string(i));
    for (std::size_t f = 0; f < farm_reserves.size(); ++f)
        emit(block.pfr_w[f], farm_reserves[f], "resw" + std::to_string(f));
}

double SplineSolution::df_at(double tau) const {
    const auto b = grid.boundaries();
    if (!(tau >= 0.0 && tau <= b.back() * (1.0 + 1e-12)))
        throw DomainError("time outside the spline horizon");
    std::size_t s = 0;
    while (s + 1 < df.size() && tau > b[s + 1]) ++s;
    const double t = std::clamp((tau - b[s]) / grid.lengths[s], 0.0, 1.0);
    return bernstein::eval(df[s], t);
}

std::pair<double, double> SplineSolution::nadir() const {
    const auto b = grid.boundaries();
    double best = -kInf, at = 0.0;
    for (std::size_t s = 0; s < df.size(); ++s) {
        const auto [v, t] = bernstein::max_on_unit(df[s]);
        if (v > best) {
            best = v;
            at = b[s] + t * grid.lengths[s];
        }
    }
    return {best, at};
}

double SplineSolution::nadir_hull(int depth) const {
    double best = -kInf;
    for (const auto& c : df) best = std::max(best, bernstein::hull_max(c, depth));
    return best;
}

SplineSolution solve_fixed(const sfr::SfrScenario& s, const SegmentGrid& grid,
                           bernstein::IntegralScheme scheme) {
    s.validate();
    grid.validate();
    const Eigen::Matrix4d& k = bernstein::integral_matrix(scheme);
    const Eigen::Matrix4d eye = Eigen::Matrix4d::Identity();
    const Eigen::Vector4d ones = Eigen::Vector4d::Ones();
    const auto ng = static_cast<Eigen::Index>(s.governors.size());
    const Eigen::Index n = 4 * (1 + ng);

    SplineSolution out;
    out.grid = grid;
    out.pfr_g.resize(static_cast<std::size_t>(ng));
    double x_ini = s.dead_band;
    std::vector<double> p_ini(static_cast<std::size_t>(ng), 0.0);

    for (int seg = 0; seg < grid.size(); ++seg) {
        const double h = grid.lengths[seg];
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs(n);
        a.block<4, 4>(0, 0) = (2.0 * s.inertia / h) * eye + (s.damping + s.wind_droop) * k;
        rhs.segment<4>(0) = (2.0 * s.inertia / h) * x_ini * ones +
                            k * ones * (s.imbalance + s.wind_droop * s.dead_band);
        for (Eigen::Index i = 0; i < ng; ++i) {
            const auto& g = s.governors[static_cast<std::size_t>(i)];
            const Eigen::Index o = 4 * (i + 1);
            a.block<4, 4>(0, o) = k;
            a.block<4, 4>(o, 0) = -g.droop * k;
            a.block<4, 4>(o, o) = (g.response_time / h) * eye + k;
            rhs.segment<4>(o) = (g.response_time / h) * p_ini[static_cast<std::size_t>(i)] * ones -
                                g.droop * s.dead_band * k * ones;
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) {
            throw NumericalError("transcription system is singular on segment " +
                                 std::to_string(seg + 1));
        }
        const Eigen::VectorXd sol = lu.solve(rhs);
        if (!sol.allFinite()) throw NumericalError("non-finite spline coefficients");
        const bernstein::BpCoeffs x = sol.segment<4>(0);
        out.df.push_back(x);
        out.pfr_w.push_back(s.wind_droop * (x - s.dead_band * ones));
        for (Eigen::Index i = 0; i < ng; ++i) {
            const bernstein::BpCoeffs p = sol.segment<4>(4 * (i + 1));
            out.pfr_g[static_cast<std::size_t>(i)].push_back(p);
            p_ini[static_cast<std::size_t>(i)] = p(3);
        }
        x_ini = x(3);
    }
    return out;
}

}  // namespace frequc::freq
