#include "ccm/hac.hpp"

#include <algorithm>
#include <cmath>

#include "ccm/errors.hpp"
#include "ccm/numerics.hpp"

namespace ccm {
namespace {

// Derived scales, inner position: the systemic rate enters the inner pair
// lifted to the theta level; the boundary coefficient is where the two
// copula pieces meet.
struct InnerScales {
    double lam_hat_i;
    double mu_ij;
    double mu_ik;
    double boundary;
};

InnerScales inner_scales(const HacSpec& s) {
    InnerScales r;
    r.lam_hat_i = std::pow(s.lambda_i, s.theta / s.phi);
    r.mu_ij = r.lam_hat_i + s.lambda_j;
    r.mu_ik = s.lambda_i + s.lambda_k;
    r.boundary = std::pow(r.mu_ij, s.phi / s.theta) + s.lambda_k;
    return r;
}

struct OuterScales {
    double mu_ik;
    double mu_jk;
    double b;
};

OuterScales outer_scales(const HacSpec& s) {
    OuterScales r;
    r.mu_ik = s.lambda_i + s.lambda_k;
    r.mu_jk = s.lambda_j + s.lambda_k;
    const double e = s.theta / s.phi;
    r.b = std::pow(std::pow(s.lambda_i, e) + std::pow(s.lambda_j, e), 1.0 / e) +
          s.lambda_k;
    return r;
}

double log_sum_exp2(double a, double b) {
    if (std::isinf(a) && a < 0.0) return b;
    if (std::isinf(b) && b < 0.0) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Contribution of one idiosyncratic route to the dependence coefficient:
// (lambda_v/mu_vk)^e * Int_r^1 (1 - kappa w^(1/e))^(1-e) dw with
// r = (mu_vk/bdry)^e and kappa = lambda_k/mu_vk.  Power distortions make
// the level sets of the copula self-similar, so this number carries the
// whole t-dependence of the Kendall function.  The integrand stays in
// [(lambda_v/mu_vk)^(1-e), 1]; no endpoint singularity.
double branch_term(double lambda_v, double mu_vk, double bdry, double e,
                   double lambda_k) {
    if (lambda_v == 0.0) return 0.0;
    const double r = std::pow(mu_vk / bdry, e);
    if (r >= 1.0) return 0.0;
    const double kappa = lambda_k / mu_vk;
    const double w_int = num::integrate(
        [=](double w) {
            return std::pow(1.0 - kappa * std::pow(w, 1.0 / e), 1.0 - e);
        },
        r, 1.0, 1e-12);
    return std::pow(lambda_v / mu_vk, e) * w_int;
}

// c0 >= 0 with K(t) = t + (t/phi)(-log t) c0 and tau = 1 - c0/phi.
double dependence_coefficient(const HacSpec& spec) {
    const double e = spec.theta / spec.phi;
    if (spec.systemic_position == SystemicPosition::inner) {
        const auto sc = inner_scales(spec);
        const double p =
            branch_term(spec.lambda_i, sc.mu_ik, sc.boundary, e, spec.lambda_k);
        return spec.lambda_k / sc.mu_ik + p / e;
    }
    const auto sc = outer_scales(spec);
    const double pi = branch_term(spec.lambda_i, sc.mu_ik, sc.b, e, spec.lambda_k);
    const double pj = branch_term(spec.lambda_j, sc.mu_jk, sc.b, e, spec.lambda_k);
    return (pi + pj) / e + spec.lambda_k / sc.mu_ik + spec.lambda_k / sc.mu_jk -
           2.0 * spec.lambda_k / sc.b;
}

}  // namespace

GFunction make_g_function(const HacSpec& spec) {
    GFunction g;
    g.position = spec.systemic_position;
    g.p1 = g.p2 = 1.0;
    if (spec.systemic_position == SystemicPosition::inner) {
        const auto sc = inner_scales(spec);
        g.c1 = std::pow(sc.mu_ij, spec.phi / spec.theta);
    } else {
        const auto sc = outer_scales(spec);
        g.c1 = sc.b - spec.lambda_k;
    }
    g.c2 = spec.lambda_k;
    return g;
}

double g_inverse(double y, const GFunction& g) {
    if (!(y >= 0.0)) throw std::domain_error("g_inverse: y must be >= 0");
    if (y == 0.0) return 0.0;
    return num::invert_increasing([&g](double x) { return g(x); }, y);
}

double hac_bivariate_copula(double u, double v, const HacSpec& spec) {
    for (double w : {u, v})
        if (!(w > 0.0) || w > 1.0)
            throw std::domain_error("hac_bivariate_copula: arguments must be in (0, 1]");
    if (u == 1.0 && v == 1.0) return 1.0;

    const double e = spec.theta / spec.phi;
    const double lx = std::log(-std::log(u));
    const double ly = std::log(-std::log(v));
    double total;
    if (spec.systemic_position == SystemicPosition::inner) {
        const auto sc = inner_scales(spec);
        const double l_aij = spec.theta * lx - std::log(sc.mu_ij);
        const double l_bik = spec.phi * ly - std::log(sc.mu_ik);
        const double branch = std::max(l_aij, e * l_bik);
        const double cluster = log_sum_exp2(std::log(sc.lam_hat_i) + branch,
                                            std::log(spec.lambda_j) + l_aij);
        total = log_sum_exp2(cluster / e, std::log(spec.lambda_k) + l_bik);
    } else {
        const auto sc = outer_scales(spec);
        const double l_aik = spec.phi * lx - std::log(sc.mu_ik);
        const double l_bjk = spec.phi * ly - std::log(sc.mu_jk);
        const double cluster =
            log_sum_exp2(e * (std::log(spec.lambda_i) + l_aik),
                         e * (std::log(spec.lambda_j) + l_bjk)) /
            e;
        total = log_sum_exp2(cluster, std::log(spec.lambda_k) + std::max(l_aik, l_bjk));
    }
    return std::exp(-std::exp(total / spec.phi));
}

double kendall_function(double t, const HacSpec& spec) {
    if (!(t > 0.0) || t >= 1.0)
        throw std::domain_error("kendall_function: t must be in (0, 1)");
    return t + (t / spec.phi) * (-std::log(t)) * dependence_coefficient(spec);
}

HacTauRoutes hac_kendall_tau_routes(const HacSpec& spec) {
    const double c0 = dependence_coefficient(spec);
    const double direct = 1.0 - c0 / spec.phi;
    // Independent route through the Kendall function, tau = 3 - 4 Int K;
    // substituting t = exp(-x) keeps the integrand smooth at both ends.
    const double integral = num::integrate(
        [&](double x) {
            const double t = std::exp(-x);
            return t * (t + (t / spec.phi) * x * c0);
        },
        0.0, 40.0, 1e-10);
    const double via_kendall = 3.0 - 4.0 * integral;
    if (std::abs(direct - via_kendall) > 1e-4)
        throw consistency_error("hac_kendall_tau: tau routes disagree");
    return {direct, via_kendall};
}

double hac_kendall_tau(const HacSpec& spec) { return hac_kendall_tau_routes(spec).direct; }

double hac_marginal_survival(double t, const HacSpec& spec, HacMargin which) {
    if (!(t >= 0.0))
        throw std::domain_error("hac_marginal_survival: t must be >= 0");
    double mu, level;
    if (spec.systemic_position == SystemicPosition::inner) {
        const auto sc = inner_scales(spec);
        mu = which == HacMargin::first ? sc.mu_ij : sc.mu_ik;
        level = which == HacMargin::first ? spec.theta : spec.phi;
    } else {
        const auto sc = outer_scales(spec);
        mu = which == HacMargin::first ? sc.mu_ik : sc.mu_jk;
        level = spec.phi;
    }
    return std::exp(-std::pow(mu, 1.0 / level) * t);
}

}  // namespace ccm
