#pragma once

// Solver-agnostic mixed-integer linear model and the backend interface that
// solves it.

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace frequc::milp {

using VarId = int;

enum class VarType { continuous, binary };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    VarType type = VarType::continuous;
};

/// Sum of coefficient * variable plus a constant.
struct LinExpr {
    std::vector<std::pair<VarId, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

    static LinExpr var(VarId v, double coef = 1.0);

    LinExpr& add(VarId v, double coef);
    LinExpr& operator+=(const LinExpr& other);
    LinExpr& operator-=(const LinExpr& other);
    LinExpr& operator*=(double k);

    /// Value for a full assignment of variable values.
    double evaluate(const std::vector<double>& values) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double k, LinExpr e);

enum class Sense { le, ge, eq };

/// Where a constraint came from: model family and (hour, segment) indices.
struct Tag {
    std::string family;
    int hour = -1;
    int segment = -1;
};

/// expr (sense) rhs, not yet attached to a model.
struct Row {
    LinExpr expr;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// Stored constraint with merged terms and the constant moved to the rhs.
struct Constraint {
    std::string name;
    std::vector<std::pair<VarId, double>> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
    Tag tag;
};

class MilpModel {
public:
    VarId add_var(std::string name, double lower, double upper,
                  VarType type = VarType::continuous);
    VarId add_binary(std::string name) { return add_var(std::move(name), 0.0, 1.0, VarType::binary); }

    int add_constraint(std::string name, const Row& row, Tag tag = {});
    int add_constraint(std::string name, const LinExpr& expr, Sense sense, double rhs,
                       Tag tag = {});

    void set_objective(LinExpr objective) { objective_ = std::move(objective); }
    void add_objective(const LinExpr& term) { objective_ += term; }

    void set_bounds(VarId v, double lower, double upper);
    /// Pin a variable to a value (both bounds).
    void fix(VarId v, double value) { set_bounds(v, value, value); }

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    const LinExpr& objective() const { return objective_; }

    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_binaries() const;
    std::size_t num_constraints() const { return rows_.size(); }

    /// Variable id by name, or -1.
    VarId find(const std::string& name) const;

    /// Throws ValidationError on dangling ids, non-finite data or duplicate names.
    void validate() const;

    /// Largest bound, integrality or constraint violation of an assignment.
    double max_violation(const std::vector<double>& values) const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    LinExpr objective_;
};

enum class SolveStatus {
    optimal,       ///< proven within the gap tolerance
    feasible_gap,  ///< incumbent found, gap not closed (time limit)
    infeasible,
    timeout,       ///< time limit without any incumbent
};

std::string to_string(SolveStatus s);

struct SolveOptions {
    double gap = 1e-3;           ///< relative MIP gap
    double time_limit = 3600.0;  ///< s
    int seed = 0;
    int threads = 1;
    bool log = false;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> values;  ///< empty unless an incumbent exists
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    double wall_time = 0.0;  ///< s

    bool has_solution() const { return !values.empty(); }
};

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    /// Minimize the model objective. Throws SolverError on backend failure.
    virtual SolveResult solve(const MilpModel& model, const SolveOptions& options) = 0;
};

/// Backend by name; an empty name reads FREQUC_SOLVER and falls back to
/// "highs". Throws ConfigError for an unknown name.
std::unique_ptr<SolverBackend> make_backend(const std::string& name = "");

}  // namespace frequc::milp
