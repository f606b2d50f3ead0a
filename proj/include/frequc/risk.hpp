#pragma once

// Wind-sufficiency chance constraint P_w + R_w <= mu - c_p * sigma and the
// coefficient c_p for a Wasserstein ball around a Gaussian forecast.

#include <optional>
#include <string>

namespace frequc::risk {

enum class Strategy {
    gaussian,          ///< exact chance constraint for the nominal Gaussian (r = 0)
    wasserstein_cvar,  ///< conservative worst-case CVaR bound over a type-1 ball
    fixed,             ///< externally computed coefficient
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct RiskConfig {
    double epsilon = 0.1;
    double radius = 0.0;  ///< MW
    Strategy strategy = Strategy::gaussian;
    std::optional<double> fixed_cp;

    friend bool operator==(const RiskConfig&, const RiskConfig&) = default;
};

/// Nominal forecast plus ambiguity radius and risk level.
struct WassersteinBall {
    double mu = 0.0;
    double sigma = 0.0;
    double radius = 0.0;
    double epsilon = 0.1;
};

/// Upper standard-normal quantile z with P(Z > z) = epsilon.
double normal_upper_quantile(double epsilon);

/// Risk coefficient c_p. Throws DomainError when epsilon is outside (0, 0.5],
/// when radius < 0, or for wasserstein_cvar with sigma = 0 and radius > 0.
double risk_coefficient(double epsilon, double radius, double sigma, Strategy strategy,
                        std::optional<double> fixed_cp = std::nullopt);

double risk_coefficient(const RiskConfig& cfg, double sigma);

struct Threshold {
    double value = 0.0;  ///< MW, never negative
    bool clipped = false;
};

/// mu - c_p * sigma, floored at zero.
Threshold drcc_threshold(double mu, double sigma, double cp);

}  // namespace frequc::risk
