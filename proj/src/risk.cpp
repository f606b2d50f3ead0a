#include "frequc/risk.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "frequc/errors.hpp"

namespace frequc::risk {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::gaussian: return "gaussian";
        case Strategy::wasserstein_cvar: return "wasserstein_cvar";
        case Strategy::fixed: return "fixed";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "gaussian") return Strategy::gaussian;
    if (name == "wasserstein_cvar") return Strategy::wasserstein_cvar;
    if (name == "fixed") return Strategy::fixed;
    throw ConfigError("unknown DRCC strategy '" + name + "'");
}

double normal_upper_quantile(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("quantile level outside (0,1)");
    if (epsilon == 0.5) return 0.0;
    const boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(boost::math::complement(std_normal, epsilon));
}

double risk_coefficient(double epsilon, double radius, double sigma, Strategy strategy,
                        std::optional<double> fixed_cp) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw DomainError("DRCC risk level must lie in (0, 0.5]");
    }
    if (!(radius >= 0.0)) throw DomainError("Wasserstein radius must be >= 0");
    if (!(sigma >= 0.0)) throw DomainError("forecast sigma must be >= 0");

    switch (strategy) {
        case Strategy::gaussian:
            return normal_upper_quantile(epsilon);
        case Strategy::wasserstein_cvar: {
            // CVaR_eps of N(0,1) is phi(z)/eps; a type-1 ball of radius r can
            // shift the tail mean by at most r/eps, i.e. r/(eps sigma) in
            // standardized units.
            const double z = normal_upper_quantile(epsilon);
            const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
            double cp = phi / epsilon;
            if (radius > 0.0) {
                if (sigma == 0.0) {
                    throw DomainError("wasserstein_cvar needs sigma > 0 when radius > 0");
                }
                cp += radius / (epsilon * sigma);
            }
            return cp;
        }
        case Strategy::fixed:
            if (!fixed_cp) throw ConfigError("fixed DRCC strategy without drcc_cp_fixed");
            if (!(*fixed_cp >= 0.0)) throw DomainError("fixed c_p must be >= 0");
            return *fixed_cp;
    }
    throw ConfigError("unhandled DRCC strategy");
}

double risk_coefficient(const RiskConfig& cfg, double sigma) {
    return risk_coefficient(cfg.epsilon, cfg.radius, sigma, cfg.strategy, cfg.fixed_cp);
}

Threshold drcc_threshold(double mu, double sigma, double cp) {
    if (!(mu >= 0.0)) throw DomainError("forecast mean must be >= 0");
    const double raw = mu - cp * sigma;
    if (raw < 0.0) return {0.0, true};
    return {raw, false};
}

}  // namespace frequc::risk
