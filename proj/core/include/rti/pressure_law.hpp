#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rti/series.hpp"

namespace rti {

// Barotropic pressure law p(rho) = K rho^gamma, strictly increasing on (0,inf).
// gamma = 1 is the affine (isothermal) case.
struct PressureLaw {
    enum class Kind { affine, power };

    Kind kind = Kind::affine;
    double K = 1.0;
    double gamma = 1.0;

    static PressureLaw affine(double K) { return {Kind::affine, K, 1.0}; }
    static PressureLaw power(double K, double gamma) { return {Kind::power, K, gamma}; }

    double p(double rho) const { return K * std::pow(rho, gamma); }
    double dp(double rho) const { return K * gamma * std::pow(rho, gamma - 1.0); }

    // h(z) = integral_1^z p'(r)/r dr
    double enthalpy(double z) const {
        if (gamma == 1.0) return K * std::log(z);
        return K * gamma / (gamma - 1.0) * (std::pow(z, gamma - 1.0) - 1.0);
    }

    // Inverse of p; exact for the power family.
    double rho_of_p(double P) const { return std::pow(P / K, 1.0 / gamma); }

    // p'(rho(x)) as a truncated series given the series of rho(x).
    Series dp_series(const Series& rho) const {
        if (gamma == 1.0) return Series::constant(K, rho.order());
        return K * gamma * rho.pow(gamma - 1.0);
    }

    void collect_issues(const std::string& name, std::vector<std::string>& out) const {
        if (!(K > 0.0)) out.push_back(name + ": stiffness K must be positive");
        if (!(gamma >= 1.0)) out.push_back(name + ": exponent gamma must be >= 1");
        if (kind == Kind::affine && gamma != 1.0)
            out.push_back(name + ": affine law requires gamma = 1");
    }
};

}  // namespace rti
