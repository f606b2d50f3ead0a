#pragma once

// Linear transcription of the frequency-security conditions of one hour.
//
// After the dead band is crossed, the frequency deviation and every primary
// response signal are represented on a segment grid by cubic Bernstein
// splines. Integrating the swing and governor equations turns them into
// linear equalities between spline coefficients. Products of a binary
// (commitment, droop bit) and a coefficient are linearized with big-M rows.

#include <array>
#include <string>
#include <vector>

#include "frequc/bernstein.hpp"
#include "frequc/milp.hpp"
#include "frequc/sfr_oracle.hpp"

namespace frequc::freq {

struct SegmentGrid {
    std::vector<double> lengths;  ///< s

    static SegmentGrid even(double horizon, int segments);
    static SegmentGrid from_fractions(double horizon, const std::vector<double>& fractions);

    int size() const { return static_cast<int>(lengths.size()); }
    double horizon() const;
    /// Segment start times followed by the horizon (size() + 1 entries).
    std::vector<double> boundaries() const;
    /// Throws ConfigError unless there is at least one segment and all are positive.
    void validate() const;
};

/// 2 * limit * H_sys >= dP.
milp::Row rocof_constraint(const milp::LinExpr& inertia, double imbalance, double limit);

/// kD_Pd * limit + G_sys * (limit - f_db) >= dP. Throws ConfigError if limit <= f_db.
milp::Row qss_constraint(const milp::LinExpr& droop, double damping, double dead_band,
                         double limit, double imbalance);

/// Discrete wind droop G_w = offset + sum_k bit_k * 2^k * step.
struct DroopExpansion {
    double offset = 0.0;
    double step = 1.0;
    double cap = 0.0;  ///< largest admitted value
    std::vector<milp::VarId> bits;

    int num_bits() const { return static_cast<int>(bits.size()); }
    double weight(int k) const;
    /// Admitted droop values in increasing order.
    std::vector<double> levels() const;
    milp::LinExpr expr() const;
    double value(const std::vector<double>& solution) const;
};

/// Smallest binary expansion covering [droop_min, droop_max] at droop_step.
/// Adds the bits to the model, plus a cap row when the top code overshoots.
DroopExpansion expand_droop(milp::MilpModel& model, const std::string& prefix, double droop_min,
                            double droop_max, double droop_step, int hour);

/// Number of bits needed for a droop range (no model side effects).
int droop_bits(double droop_min, double droop_max, double droop_step);

using Coeffs = std::array<milp::VarId, 4>;

/// alpha_k = binary * x_k via -M b <= alpha <= M b, x - M(1-b) <= alpha <= x + M(1-b).
Coeffs linearize_products(milp::MilpModel& model, const std::string& prefix, milp::VarId binary,
                          const Coeffs& x, double big_m, const milp::Tag& tag);

/// Frequency-relevant data of one committed-or-not thermal unit.
struct UnitTerms {
    std::string id;
    milp::VarId commit = -1;
    double inertia = 0.0;    ///< MW*s/Hz when online
    double resp_time = 0.0;  ///< s
    double droop = 0.0;      ///< MW/Hz when online
};

struct FarmTerms {
    std::string id;
    double inertia = 0.0;  ///< MW*s/Hz, always present
    DroopExpansion droop;
};

struct HourTerms {
    int hour = 0;
    double imbalance = 0.0;  ///< MW
    double damping = 0.0;    ///< MW/Hz
    double dead_band = 0.0;  ///< Hz
    double big_m = 0.0;      ///< Hz; also the coefficient box for df
    std::vector<UnitTerms> units;
    std::vector<FarmTerms> farms;
};

/// Variable handles of one hour's spline transcription.
struct FreqBlock {
    int hour = 0;
    std::vector<Coeffs> df;                    ///< [segment]
    std::vector<std::vector<Coeffs>> pfr_g;    ///< [unit][segment]
    std::vector<std::vector<Coeffs>> pfr_w;    ///< [farm][segment]
    std::vector<std::vector<Coeffs>> commit_df;               ///< [unit][segment] I * df
    std::vector<std::vector<std::vector<Coeffs>>> bit_df;     ///< [farm][bit][segment] w * df
};

/// Emit the swing, governor, and wind response equalities with chaining.
/// df coefficients are boxed to [0, big_m].
FreqBlock transcribe_dynamics(milp::MilpModel& model, const HourTerms& terms,
                              const SegmentGrid& grid);

/// J df <= limit on every segment, and df >= 0.
void nadir_bound(milp::MilpModel& model, const FreqBlock& block, const Eigen::MatrixXd& j,
                 double limit);

/// J p <= R for every unit and farm on every segment.
void reserve_bound(milp::MilpModel& model, const FreqBlock& block, const Eigen::MatrixXd& j,
                   const std::vector<milp::VarId>& unit_reserves,
                   const std::vector<milp::VarId>& farm_reserves);

/// Transcription with every binary fixed, solved directly.
struct SplineSolution {
    SegmentGrid grid;
    std::vector<bernstein::BpCoeffs> df;                    ///< [segment]
    std::vector<std::vector<bernstein::BpCoeffs>> pfr_g;    ///< [governor][segment]
    std::vector<bernstein::BpCoeffs> pfr_w;                 ///< [segment]

    /// Deviation at time tau after the dead-band crossing (0 <= tau <= horizon).
    double df_at(double tau) const;
    /// Exact maximum of the deviation spline and its time after the crossing.
    std::pair<double, double> nadir() const;
    /// Largest hull bound of the deviation spline at the given depth.
    double nadir_hull(int depth) const;
};

/// Solve the equalities for a scenario (segment by segment; the chaining is
/// causal). Throws NumericalError if a segment system is singular.
SplineSolution solve_fixed(const sfr::SfrScenario& s, const SegmentGrid& grid,
                           bernstein::IntegralScheme scheme = bernstein::IntegralScheme::pinned);

}  // namespace frequc::freq
