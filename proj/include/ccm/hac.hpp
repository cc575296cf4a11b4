#pragma once

#include <cmath>
#include <stdexcept>

namespace ccm {

// Position of the systemic shock in a fully nested trivariate structure:
// `inner` couples it to one idiosyncratic shock at the stronger level theta
// and observes (min(X_i,X_j), min(X_i,X_k)); `outer` attaches it at the
// weaker level phi and observes (min(X_i,X_k), min(X_j,X_k)).
enum class SystemicPosition { inner, outer };

// Nested-Gumbel triple: inner parameter theta, outer parameter phi, and the
// three shock rates.  Rate scales follow the power-distortion convention
// that keeps all marginals exponential:
//  - inner position: lambda_i (systemic) and lambda_k live on the outer
//    scale, lambda_j on the inner scale; the systemic rate enters the inner
//    pair as lambda_i^(theta/phi).
//  - outer position: all three rates live on the outer scale.
struct HacSpec {
    double theta;
    double phi;
    double lambda_i;
    double lambda_j;
    double lambda_k;
    SystemicPosition systemic_position;

    HacSpec(double th, double ph, double li, double lj, double lk, SystemicPosition pos)
        : theta(th), phi(ph), lambda_i(li), lambda_j(lj), lambda_k(lk),
          systemic_position(pos) {
        if (!std::isfinite(th) || !std::isfinite(ph) || th < ph || ph < 1.0)
            throw std::domain_error("HacSpec: need theta >= phi >= 1");
        int positive = 0;
        for (double l : {li, lj, lk}) {
            if (!std::isfinite(l) || l < 0.0)
                throw std::domain_error("HacSpec: rates must be finite and >= 0");
            if (l > 0.0) ++positive;
        }
        if (positive < 2)
            throw std::domain_error("HacSpec: need at least two strictly positive rates");
    }
};

// Boundary map between the two pieces of the nested survival copula, as a
// sum of two power terms on the outer distortion scale; strictly increasing
// on (0, inf), hence invertible.
struct GFunction {
    SystemicPosition position;
    double c1, p1;
    double c2, p2;

    double operator()(double x) const {
        return c1 * std::pow(x, p1) + c2 * std::pow(x, p2);
    }
};

GFunction make_g_function(const HacSpec& spec);

// Unique root of G(x) = y, bracketing bisection.
double g_inverse(double y, const GFunction& g);

// Two-piece survival copula of the observed pair.
double hac_bivariate_copula(double u, double v, const HacSpec& spec);

// Kendall distribution function K(t) = P(C(U,V) <= t) of the observed pair.
double kendall_function(double t, const HacSpec& spec);

struct HacTauRoutes {
    double direct;
    double quadrature;
};

// Kendall tau of the observed pair.  Evaluated two ways: the direct formula
// and 3 - 4 Int_0^1 K(t) dt; throws consistency_error when they disagree by
// more than 1e-4, otherwise returns the direct value.
HacTauRoutes hac_kendall_tau_routes(const HacSpec& spec);
double hac_kendall_tau(const HacSpec& spec);

enum class HacMargin { first, second };

// Exponential survival of one observed default time; the rate is
// mu_ij^(1/theta) or mu_ik^(1/phi) in the inner position and mu_ik^(1/phi)
// or mu_jk^(1/phi) in the outer position.
double hac_marginal_survival(double t, const HacSpec& spec, HacMargin which);

}  // namespace ccm
