#pragma once

#include <cmath>
#include <stdexcept>

namespace ccm {

// Gumbel generator psi(x) = exp(-x^(1/theta)); theta = 1 is independence.
struct GumbelGenerator {
    double theta;

    explicit GumbelGenerator(double t) : theta(t) {
        if (!std::isfinite(t) || t < 1.0)
            throw std::domain_error("GumbelGenerator: theta must be finite and >= 1");
    }
};

inline double psi(double x, const GumbelGenerator& gen) {
    if (!(x >= 0.0)) throw std::domain_error("psi: x must be >= 0");
    return std::exp(-std::pow(x, 1.0 / gen.theta));
}

inline double psi_inv(double u, const GumbelGenerator& gen) {
    if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("psi_inv: u must be in (0,1]");
    return std::pow(-std::log(u), gen.theta);
}

}  // namespace ccm
