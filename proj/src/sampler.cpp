#include "ccm/sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccm/kendall.hpp"

namespace ccm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// (E/(s*lambda))^(1/theta), the default time of a shock with distorted rate
// lambda under frailty s; lambda = 0 means the shock never fires.
double shock_time(double e, double s, double lambda, double inv_theta) {
    if (lambda <= 0.0) return kInf;
    return std::pow(e / (s * lambda), inv_theta);
}

}  // namespace

SimConfig::SimConfig(std::size_t n, std::uint64_t s, ShockIntensities sh, double th)
    : n_samples(n), seed(s), shocks(std::move(sh)), theta(th) {
    if (n == 0) throw std::invalid_argument("SimConfig: n_samples must be >= 1");
    if (!std::isfinite(th) || th < 1.0)
        throw std::domain_error("SimConfig: theta must be finite and >= 1");
}

double sample_positive_stable(double a, CounterRng& rng) {
    if (!(a > 0.0) || a > 1.0)
        throw std::domain_error("sample_positive_stable: a must be in (0, 1]");
    if (a == 1.0) return 1.0;
    const double u = kPi * rng.uniform();
    const double w = rng.exponential();
    const double r = (1.0 - a) / a;
    const double log_s = std::log(std::sin(a * u)) + r * std::log(std::sin((1.0 - a) * u)) -
                         std::log(std::sin(u)) / a - r * std::log(w);
    return std::exp(log_s);
}

std::vector<double> sample_gumbel_vector(std::size_t dim, const GumbelGenerator& gen,
                                         CounterRng& rng) {
    if (dim == 0) throw std::invalid_argument("sample_gumbel_vector: dim must be >= 1");
    const double s = sample_positive_stable(1.0 / gen.theta, rng);
    const double inv_theta = 1.0 / gen.theta;
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v[i] = std::exp(-std::pow(rng.exponential() / s, inv_theta));
    return v;
}

DefaultTimeSample simulate_default_times(const SimConfig& cfg) {
    const GumbelGenerator gen(cfg.theta);
    const std::size_t d = cfg.shocks.dim();
    const double inv_theta = 1.0 / cfg.theta;

    DefaultTimeSample out;
    out.n = cfg.n_samples;
    out.d = d;
    out.times.resize(cfg.n_samples * d);
    out.systemic_times.resize(cfg.n_samples);

    for (std::size_t r = 0; r < cfg.n_samples; ++r) {
        CounterRng rng = CounterRng::stream(cfg.seed, r);
        const double s = sample_positive_stable(inv_theta, rng);
        // Every shock consumes one draw even at rate zero, so stream
        // positions do not depend on the parameter values.
        const double x0 = shock_time(rng.exponential(), s, cfg.shocks.lambda0, inv_theta);
        out.systemic_times[r] = x0;
        for (std::size_t k = 0; k < d; ++k) {
            const double xk =
                shock_time(rng.exponential(), s, cfg.shocks.lambdas[k], inv_theta);
            out.times[r * d + k] = std::min(x0, xk);
        }
    }
    return out;
}

TauEstimate empirical_tau_mc(double alpha_j, double alpha_k, const GumbelGenerator& gen,
                             std::size_t n, std::uint64_t seed) {
    for (double a : {alpha_j, alpha_k})
        if (!(a >= 0.0) || a > 1.0)
            throw std::domain_error("empirical_tau_mc: alpha must be in [0, 1]");
    if (n < 1000)
        throw std::invalid_argument("empirical_tau_mc: need at least 1000 replications");

    // lambda_0 = 1 fixes the scale; tau is rank-based so the choice drops
    // out.  alpha = 0 entities get rate 1 and no systemic minimum, the
    // exact limit of lambda_k -> inf.
    const double l0 = (alpha_j > 0.0 || alpha_k > 0.0) ? 1.0 : 0.0;
    const double lj = alpha_j > 0.0 ? (1.0 - alpha_j) / alpha_j : 1.0;
    const double lk = alpha_k > 0.0 ? (1.0 - alpha_k) / alpha_k : 1.0;
    const double inv_theta = 1.0 / gen.theta;

    std::vector<double> tj(n), tk(n);
    for (std::size_t r = 0; r < n; ++r) {
        CounterRng rng = CounterRng::stream(seed, r);
        const double s = sample_positive_stable(inv_theta, rng);
        const double x0 = shock_time(rng.exponential(), s, l0, inv_theta);
        const double xj = shock_time(rng.exponential(), s, lj, inv_theta);
        const double xk = shock_time(rng.exponential(), s, lk, inv_theta);
        tj[r] = alpha_j > 0.0 ? std::min(x0, xj) : xj;
        tk[r] = alpha_k > 0.0 ? std::min(x0, xk) : xk;
    }

    TauEstimate est;
    est.tau = empirical_kendall_tau(tj, tk);
    const double m = static_cast<double>(n);
    est.std_error = std::sqrt(2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0)));
    return est;
}

std::vector<std::array<double, 2>> simulate_hac_triple(const HacSpec& spec, std::size_t n,
                                                       std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_hac_triple: n must be >= 1");
    const double th = spec.theta, ph = spec.phi;
    const double inv_th = 1.0 / th, inv_ph = 1.0 / ph;
    const bool inner = spec.systemic_position == SystemicPosition::inner;

    std::vector<std::array<double, 2>> out(n);
    for (std::size_t r = 0; r < n; ++r) {
        CounterRng rng = CounterRng::stream(seed, r);
        const double m0 = sample_positive_stable(inv_ph, rng);
        // Inner frailty: m0^(theta/phi) tilted by an independent
        // (phi/theta)-stable factor, so E[exp(-s M1) | M0]
        // = exp(-M0 s^(phi/theta)).
        const double m1 = std::pow(m0, th / ph) * sample_positive_stable(ph / th, rng);
        const double ei = rng.exponential();
        const double ej = rng.exponential();
        const double ek = rng.exponential();

        if (inner) {
            // X_i and X_j sit at the inner level.  lambda_j is already an
            // inner-scale rate; lambda_i is outer-scale and must be lifted.
            const double xi = shock_time(ei, m1, std::pow(spec.lambda_i, th / ph), inv_th);
            const double xj = shock_time(ej, m1, spec.lambda_j, inv_th);
            const double xk = shock_time(ek, m0, spec.lambda_k, inv_ph);
            out[r] = {std::min(xi, xj), std::min(xi, xk)};
        } else {
            // Inner pair with outer-scale rates: lift both.
            const double xi = shock_time(ei, m1, std::pow(spec.lambda_i, th / ph), inv_th);
            const double xj = shock_time(ej, m1, std::pow(spec.lambda_j, th / ph), inv_th);
            const double xk = shock_time(ek, m0, spec.lambda_k, inv_ph);
            out[r] = {std::min(xi, xk), std::min(xj, xk)};
        }
    }
    return out;
}

}  // namespace ccm
