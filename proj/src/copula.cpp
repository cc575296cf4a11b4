#include "ccm/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccm/errors.hpp"
#include "ccm/numerics.hpp"

namespace ccm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_prob_open_closed(double u, const char* who) {
    if (!(u > 0.0 && u <= 1.0))
        throw std::domain_error(std::string(who) + ": arguments must be in (0,1]");
}

void check_alpha(double a, const char* who) {
    if (!(a >= 0.0 && a <= 1.0))
        throw std::domain_error(std::string(who) + ": alpha must be in [0,1]");
}

// (sum_k c_k a_k^theta)^(1/theta) through logs, so a_k^theta never overflows
// or underflows.  Zero terms are skipped.
double weighted_power_sum_root(const std::vector<double>& a, const std::vector<double>& c,
                               double theta) {
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] <= 0.0 || c[k] <= 0.0) continue;
        lmax = std::max(lmax, theta * std::log(a[k]) + std::log(c[k]));
    }
    if (lmax == -std::numeric_limits<double>::infinity()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] <= 0.0 || c[k] <= 0.0) continue;
        acc += std::exp(theta * std::log(a[k]) + std::log(c[k]) - lmax);
    }
    return std::exp((lmax + std::log(acc)) / theta);
}

}  // namespace

ShockIntensities::ShockIntensities(double l0, std::vector<double> ls)
    : lambda0(l0), lambdas(std::move(ls)) {
    if (!std::isfinite(lambda0) || lambda0 < 0.0)
        throw std::domain_error("ShockIntensities: lambda0 must be finite and >= 0");
    if (lambdas.empty()) throw std::domain_error("ShockIntensities: no idiosyncratic rates");
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0)
            throw std::domain_error("ShockIntensities: rates must be finite and >= 0");
        if (lambda0 + l <= 0.0)
            throw std::domain_error("ShockIntensities: lambda0 + lambda_k must be > 0");
    }
}

ModelParams::ModelParams(std::vector<double> a, double t, std::vector<std::string> l)
    : alphas(std::move(a)), theta(t), labels(std::move(l)) {
    if (alphas.size() < 2) throw std::domain_error("ModelParams: need at least 2 entities");
    for (double x : alphas) check_alpha(x, "ModelParams");
    if (!std::isfinite(theta) || theta < 1.0)
        throw std::domain_error("ModelParams: theta must be finite and >= 1");
    if (labels.empty()) {
        labels.reserve(alphas.size());
        for (std::size_t k = 0; k < alphas.size(); ++k)
            labels.push_back("e" + std::to_string(k + 1));
    }
    if (labels.size() != alphas.size())
        throw std::invalid_argument("ModelParams: labels/alphas size mismatch");
}

TauMatrix::TauMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), m_(labels_.size() * labels_.size(), kNaN) {
    if (labels_.size() < 2) throw std::domain_error("TauMatrix: need at least 2 entities");
    for (std::size_t i = 0; i < labels_.size(); ++i) m_[i * labels_.size() + i] = 1.0;
}

double TauMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= dim() || j >= dim()) throw std::out_of_range("TauMatrix::at");
    return m_[i * dim() + j];
}

void TauMatrix::set(std::size_t i, std::size_t j, double v) {
    if (i >= dim() || j >= dim()) throw std::out_of_range("TauMatrix::set");
    if (i == j) throw std::invalid_argument("TauMatrix: diagonal is fixed at 1");
    if (!std::isnan(v) && !(v >= -1.0 && v <= 1.0))
        throw std::domain_error("TauMatrix: entries must be in [-1,1] or NaN");
    m_[i * dim() + j] = v;
    m_[j * dim() + i] = v;
}

bool TauMatrix::has_defined_offdiagonal() const {
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i + 1; j < dim(); ++j)
            if (!std::isnan(at(i, j))) return true;
    return false;
}

double marginal_survival(double t, double lambda0, double lambdak,
                         const GumbelGenerator& gen) {
    if (!(t >= 0.0)) throw std::domain_error("marginal_survival: t must be >= 0");
    if (!(lambda0 >= 0.0) || !(lambdak >= 0.0) || lambda0 + lambdak <= 0.0)
        throw std::domain_error("marginal_survival: need lambda0, lambdak >= 0, sum > 0");
    return std::exp(-std::pow(lambda0 + lambdak, 1.0 / gen.theta) * t);
}

double joint_survival(const std::vector<double>& ts, const ShockIntensities& shocks,
                      const GumbelGenerator& gen) {
    if (ts.size() != shocks.dim())
        throw std::invalid_argument("joint_survival: ts/shocks dimension mismatch");
    if (ts.size() < 2) throw std::invalid_argument("joint_survival: need d >= 2");
    double tmax = 0.0;
    for (double t : ts) {
        if (!(t >= 0.0)) throw std::domain_error("joint_survival: times must be >= 0");
        tmax = std::max(tmax, t);
    }
    std::vector<double> a, c;
    a.reserve(ts.size() + 1);
    c.reserve(ts.size() + 1);
    a.push_back(tmax);
    c.push_back(shocks.lambda0);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        a.push_back(ts[k]);
        c.push_back(shocks.lambdas[k]);
    }
    return std::exp(-weighted_power_sum_root(a, c, gen.theta));
}

double survival_copula(const std::vector<double>& us, const ModelParams& params) {
    if (us.size() != params.dim())
        throw std::invalid_argument("survival_copula: us/params dimension mismatch");
    const GumbelGenerator gen(params.theta);
    const double inv_theta = 1.0 / params.theta;

    // Active piece: largest alpha_i^(1/theta) * (-ln u_i) wins, ties to the
    // smallest index.  The power 1/theta keeps the comparison overflow-free.
    std::size_t j = 0;
    double best = -1.0;
    std::vector<double> logs(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        check_prob_open_closed(us[i], "survival_copula");
        logs[i] = -std::log(us[i]);
        const double w = std::pow(params.alphas[i], inv_theta) * logs[i];
        if (w > best) {
            best = w;
            j = i;
        }
    }

    std::vector<double> c(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) c[k] = (k == j) ? 1.0 : 1.0 - params.alphas[k];
    return std::exp(-weighted_power_sum_root(logs, c, params.theta));
}

double bivariate_copula(double u, double v, double alpha_j, double alpha_k,
                        const GumbelGenerator& gen) {
    check_prob_open_closed(u, "bivariate_copula");
    check_prob_open_closed(v, "bivariate_copula");
    check_alpha(alpha_j, "bivariate_copula");
    check_alpha(alpha_k, "bivariate_copula");

    const double lu = -std::log(u), lv = -std::log(v);
    const double inv_theta = 1.0 / gen.theta;
    const bool first = std::pow(alpha_j, inv_theta) * lu >= std::pow(alpha_k, inv_theta) * lv;
    const std::vector<double> a{lu, lv};
    const std::vector<double> c{first ? 1.0 : 1.0 - alpha_j, first ? 1.0 - alpha_k : 1.0};
    return std::exp(-weighted_power_sum_root(a, c, gen.theta));
}

double tau_mo(double alpha_j, double alpha_k) {
    check_alpha(alpha_j, "tau_mo");
    check_alpha(alpha_k, "tau_mo");
    if (alpha_j == 0.0 && alpha_k == 0.0) return 0.0;  // continuity limit
    return alpha_j * alpha_k / (alpha_j + alpha_k - alpha_j * alpha_k);
}

double tau_pair(double alpha_j, double alpha_k, const GumbelGenerator& gen) {
    return (gen.theta - 1.0) / gen.theta + tau_mo(alpha_j, alpha_k) / gen.theta;
}

double tau_systemic(double alpha_j, const GumbelGenerator& gen) {
    check_alpha(alpha_j, "tau_systemic");
    return (gen.theta - 1.0) / gen.theta + alpha_j / gen.theta;
}

std::vector<double> alphas_from_intensities(const ShockIntensities& shocks) {
    std::vector<double> out;
    out.reserve(shocks.dim());
    for (double l : shocks.lambdas) out.push_back(shocks.lambda0 / (shocks.lambda0 + l));
    return out;
}

double kendall_tau_general(const GumbelGenerator& gen, const SurvivalFn& s0,
                           const SurvivalFn& sj, const SurvivalFn& sk) {
    const double theta = gen.theta;

    // Survival values straight from user callables; exact zeros (underflowed
    // tails) are lifted to the smallest positive double before inversion.
    auto dist = [&](const SurvivalFn& f, double t) {
        double u = f(t);
        if (!(u <= 1.0)) throw std::domain_error("kendall_tau_general: survival above 1");
        u = std::max(u, 1e-300);
        return psi_inv(u, gen);
    };
    auto H = [&](double t) { return dist(s0, t) + dist(sj, t) + dist(sk, t); };
    auto T = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double t = num::invert_increasing(H, x);
        return dist(s0, t);
    };

    auto integrand = [&](double s) {
        const double l = -std::log(s);
        return s * std::pow(l, 1.0 - theta) * T(std::pow(l, theta));
    };
    const double I = num::integrate(integrand, 1e-12, 1.0 - 1e-12, 1e-10);
    return (theta - 1.0) / theta + 4.0 / theta * I;
}

}  // namespace ccm
