#include "frequc/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <unordered_set>

#include "Highs.h"
#include "frequc/errors.hpp"

namespace frequc::milp {

LinExpr LinExpr::var(VarId v, double coef) {
    LinExpr e;
    e.terms.emplace_back(v, coef);
    return e;
}

LinExpr& LinExpr::add(VarId v, double coef) {
    terms.emplace_back(v, coef);
    return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    constant += other.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
    for (const auto& [v, c] : other.terms) terms.emplace_back(v, -c);
    constant -= other.constant;
    return *this;
}

LinExpr& LinExpr::operator*=(double k) {
    for (auto& term : terms) term.second *= k;
    constant *= k;
    return *this;
}

double LinExpr::evaluate(const std::vector<double>& values) const {
    double s = constant;
    for (const auto& [v, c] : terms) s += c * values.at(static_cast<std::size_t>(v));
    return s;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double k, LinExpr e) { return e *= k; }

VarId MilpModel::add_var(std::string name, double lower, double upper, VarType type) {
    vars_.push_back({std::move(name), lower, upper, type});
    return static_cast<VarId>(vars_.size() - 1);
}

int MilpModel::add_constraint(std::string name, const Row& row, Tag tag) {
    return add_constraint(std::move(name), row.expr, row.sense, row.rhs, std::move(tag));
}

int MilpModel::add_constraint(std::string name, const LinExpr& expr, Sense sense, double rhs,
                              Tag tag) {
    // Merge repeated variables in first-appearance order so the stored row is
    // independent of how the expression was assembled.
    std::vector<std::pair<VarId, double>> merged;
    std::map<VarId, std::size_t> at;
    for (const auto& [v, c] : expr.terms) {
        const auto [it, fresh] = at.emplace(v, merged.size());
        if (fresh) {
            merged.emplace_back(v, c);
        } else {
            merged[it->second].second += c;
        }
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    rows_.push_back({std::move(name), std::move(merged), sense, rhs - expr.constant, std::move(tag)});
    return static_cast<int>(rows_.size() - 1);
}

void MilpModel::set_bounds(VarId v, double lower, double upper) {
    auto& var = vars_.at(static_cast<std::size_t>(v));
    var.lower = lower;
    var.upper = upper;
}

std::size_t MilpModel::num_binaries() const {
    return static_cast<std::size_t>(std::count_if(
        vars_.begin(), vars_.end(), [](const Variable& v) { return v.type == VarType::binary; }));
}

VarId MilpModel::find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<VarId>(i);
    return -1;
}

void MilpModel::validate() const {
    std::unordered_set<std::string> names;
    for (const auto& v : vars_) {
        if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
        if (std::isnan(v.lower) || std::isnan(v.upper))
            throw ValidationError("variable '" + v.name + "' has a NaN bound");
        if (v.lower > v.upper) throw ValidationError("variable '" + v.name + "' has empty bounds");
    }
    names.clear();
    const auto n = static_cast<VarId>(vars_.size());
    auto check_terms = [&](const std::vector<std::pair<VarId, double>>& terms, const std::string& who) {
        for (const auto& [v, c] : terms) {
            if (v < 0 || v >= n) throw ValidationError(who + " references a missing variable");
            if (!std::isfinite(c)) throw ValidationError(who + " has a non-finite coefficient");
        }
    };
    for (const auto& r : rows_) {
        if (!names.insert(r.name).second) throw ValidationError("duplicate constraint name '" + r.name + "'");
        check_terms(r.terms, "constraint '" + r.name + "'");
        if (std::isnan(r.rhs)) throw ValidationError("constraint '" + r.name + "' has a NaN rhs");
    }
    check_terms(objective_.terms, "objective");
    if (!std::isfinite(objective_.constant)) throw ValidationError("objective constant is not finite");
}

double MilpModel::max_violation(const std::vector<double>& values) const {
    if (values.size() != vars_.size()) throw DomainError("assignment size does not match the model");
    double worst = 0.0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto& v = vars_[i];
        worst = std::max({worst, v.lower - values[i], values[i] - v.upper});
        if (v.type == VarType::binary) worst = std::max(worst, std::abs(values[i] - std::round(values[i])));
    }
    for (const auto& r : rows_) {
        double lhs = 0.0;
        for (const auto& [v, c] : r.terms) lhs += c * values[static_cast<std::size_t>(v)];
        switch (r.sense) {
            case Sense::le: worst = std::max(worst, lhs - r.rhs); break;
            case Sense::ge: worst = std::max(worst, r.rhs - lhs); break;
            case Sense::eq: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
        }
    }
    return worst;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_gap: return "feasible_gap";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::timeout: return "timeout";
    }
    return "unknown";
}

namespace {

double to_highs_bound(double b, double inf) {
    if (b == std::numeric_limits<double>::infinity()) return inf;
    if (b == -std::numeric_limits<double>::infinity()) return -inf;
    return b;
}

class HighsBackend final : public SolverBackend {
public:
    std::string name() const override { return "highs"; }

    SolveResult solve(const MilpModel& model, const SolveOptions& options) override {
        model.validate();
        const auto start = std::chrono::steady_clock::now();

        Highs highs;
        highs.setOptionValue("output_flag", options.log);
        highs.setOptionValue("log_to_console", options.log);
        highs.setOptionValue("threads", options.threads);
        highs.setOptionValue("random_seed", options.seed);
        highs.setOptionValue("mip_rel_gap", options.gap);
        highs.setOptionValue("time_limit", options.time_limit);
        const double inf = highs.getInfinity();

        HighsLp lp;
        const auto& vars = model.variables();
        const auto& rows = model.constraints();
        lp.num_col_ = static_cast<HighsInt>(vars.size());
        lp.num_row_ = static_cast<HighsInt>(rows.size());
        lp.sense_ = ObjSense::kMinimize;
        lp.offset_ = model.objective().constant;
        lp.col_cost_.assign(vars.size(), 0.0);
        for (const auto& [v, c] : model.objective().terms) lp.col_cost_[static_cast<std::size_t>(v)] += c;
        bool integer = false;
        lp.integrality_.resize(vars.size(), HighsVarType::kContinuous);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            lp.col_lower_.push_back(to_highs_bound(vars[i].lower, inf));
            lp.col_upper_.push_back(to_highs_bound(vars[i].upper, inf));
            if (vars[i].type == VarType::binary) {
                lp.integrality_[i] = HighsVarType::kInteger;
                integer = true;
            }
        }
        if (!integer) lp.integrality_.clear();
        // Column-wise matrix: counting pass, then fill in row order.
        auto& a = lp.a_matrix_;
        a.format_ = MatrixFormat::kColwise;
        a.num_col_ = lp.num_col_;
        a.num_row_ = lp.num_row_;
        a.start_.assign(vars.size() + 1, 0);
        for (const auto& r : rows)
            for (const auto& term : r.terms) ++a.start_[static_cast<std::size_t>(term.first) + 1];
        for (std::size_t j = 0; j < vars.size(); ++j) a.start_[j + 1] += a.start_[j];
        a.index_.resize(static_cast<std::size_t>(a.start_.back()));
        a.value_.resize(a.index_.size());
        std::vector<HighsInt> next(a.start_.begin(), a.start_.end() - 1);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            for (const auto& [v, c] : r.terms) {
                const auto k = static_cast<std::size_t>(next[static_cast<std::size_t>(v)]++);
                a.index_[k] = static_cast<HighsInt>(i);
                a.value_[k] = c;
            }
            lp.row_lower_.push_back(r.sense == Sense::le ? -inf : r.rhs);
            lp.row_upper_.push_back(r.sense == Sense::ge ? inf : r.rhs);
        }

        if (highs.passModel(std::move(lp)) == HighsStatus::kError)
            throw SolverError("highs: model rejected");
        if (highs.run() == HighsStatus::kError) {
            throw SolverError("highs: solve failed with model status '" +
                              highs.modelStatusToString(highs.getModelStatus()) + "'");
        }

        SolveResult result;
        const auto& info = highs.getInfo();
        const auto status = highs.getModelStatus();
        const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
        if (has_primal) {
            result.values = highs.getSolution().col_value;
            result.objective = info.objective_function_value;
        }
        result.bound = integer ? info.mip_dual_bound : result.objective;
        result.gap = integer ? info.mip_gap : 0.0;
        switch (status) {
            case HighsModelStatus::kOptimal:
            case HighsModelStatus::kModelEmpty:
                result.status = SolveStatus::optimal;
                break;
            case HighsModelStatus::kInfeasible:
            case HighsModelStatus::kUnboundedOrInfeasible:
                result.status = SolveStatus::infeasible;
                result.values.clear();
                break;
            case HighsModelStatus::kTimeLimit:
            case HighsModelStatus::kIterationLimit:
            case HighsModelStatus::kInterrupt:
            case HighsModelStatus::kSolutionLimit:
                result.status = has_primal ? SolveStatus::feasible_gap : SolveStatus::timeout;
                break;
            default:
                throw SolverError("highs: unexpected model status '" +
                                  highs.modelStatusToString(status) + "'");
        }
        if (status == HighsModelStatus::kModelEmpty) {
            result.values.assign(vars.size(), 0.0);
            result.objective = model.objective().constant;
        }
        result.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }
};

}  // namespace

std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
    std::string chosen = name;
    if (chosen.empty()) {
        const char* env = std::getenv("FREQUC_SOLVER");
        chosen = env && *env ? env : "highs";
    }
    if (chosen == "highs") return std::make_unique<HighsBackend>();
    throw ConfigError("unknown solver backend '" + chosen + "' (available: highs)");
}

}  // namespace frequc::milp
