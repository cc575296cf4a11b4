#include "ccm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccm/errors.hpp"
#include "ccm/gumbel.hpp"
#include "ccm/kendall.hpp"
#include "ccm/numerics.hpp"
#include "ccm/rng.hpp"

namespace ccm {
namespace {

double reflect_into(double x, double lo, double hi) {
    while (x < lo || x > hi) {
        if (x < lo) x = lo + (lo - x);
        if (x > hi) x = hi - (x - hi);
    }
    return x;
}

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Objective over the packed parameter vector (alpha_1..alpha_d, theta),
// clamped into bounds so local search can probe freely.
struct PackedObjective {
    const TauMatrix& taus;
    std::size_t d;
    double theta_min, theta_max;
    Distance distance;

    double operator()(std::vector<double> x) const {
        for (std::size_t k = 0; k < d; ++k) x[k] = clamp(x[k], 0.0, 1.0);
        const double theta = clamp(x[d], theta_min, theta_max);
        x.pop_back();
        return objective(x, theta, taus, distance);
    }
};

// Nelder-Mead on n dims; deterministic, derivative-free.  Good enough to
// polish the annealing result to the flat bottom of the basin.
std::vector<double> nelder_mead(const PackedObjective& f, std::vector<double> x0,
                                double step, std::size_t max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        if (fx[worst] - fx[best] < 1e-15 * (1.0 + std::abs(fx[best]))) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < fx[best]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                fx[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fx[worst] = fr;
            }
        } else if (fr < fx[second]) {
            simplex[worst] = reflected;
            fx[worst] = fr;
        } else {
            const auto contracted = blend(fr < fx[worst] ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fx[worst])) {
                simplex[worst] = contracted;
                fx[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    fx[i] = f(simplex[i]);
                }
            }
        }
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(fx.begin(), fx.end()) - fx.begin());
    return simplex[best];
}

}  // namespace

IntensityPanel::IntensityPanel(std::vector<std::string> dates_,
                               std::vector<std::string> labels_,
                               std::vector<double> values_)
    : dates(std::move(dates_)), labels(std::move(labels_)), values(std::move(values_)) {
    if (labels.empty()) throw data_error("IntensityPanel: no entities");
    if (dates.empty()) throw data_error("IntensityPanel: no dates");
    if (values.size() != dates.size() * labels.size())
        throw data_error("IntensityPanel: value count does not match dates x entities");
    for (std::size_t t = 1; t < dates.size(); ++t)
        if (!(dates[t - 1] < dates[t]))
            throw data_error("IntensityPanel: dates must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw data_error("IntensityPanel: intensities must be finite and >= 0");
}

TauMatrix pairwise_tau_matrix(const IntensityPanel& panel, bool first_differences) {
    if (panel.cols() < 2)
        throw data_error("pairwise_tau_matrix: need at least two entities");
    if (first_differences && panel.rows() < 3)
        throw data_error("pairwise_tau_matrix: differencing needs at least three rows");
    const std::size_t d = panel.cols();
    const std::size_t n = first_differences ? panel.rows() - 1 : panel.rows();
    TauMatrix taus(panel.labels);
    std::vector<double> cj(n), ck(n);
    for (std::size_t j = 0; j + 1 < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            for (std::size_t t = 0; t < n; ++t) {
                if (first_differences) {
                    cj[t] = panel.at(t + 1, j) - panel.at(t, j);
                    ck[t] = panel.at(t + 1, k) - panel.at(t, k);
                } else {
                    cj[t] = panel.at(t, j);
                    ck[t] = panel.at(t, k);
                }
            }
            try {
                taus.set(j, k, empirical_kendall_tau(cj, ck));
            } catch (const data_error&) {
                // constant column: the pair stays undefined
            }
        }
    }
    return taus;
}

double objective(const std::vector<double>& alphas, double theta, const TauMatrix& taus,
                 Distance distance) {
    const std::size_t d = taus.dim();
    if (alphas.size() != d)
        throw std::invalid_argument("objective: share count does not match tau matrix");
    const GumbelGenerator gen(theta);
    double total = 0.0;
    bool any = false;
    for (std::size_t j = 0; j + 1 < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            const double sample = taus.at(j, k);
            if (std::isnan(sample)) continue;
            const double gap = tau_pair(alphas[j], alphas[k], gen) - sample;
            total += distance == Distance::quadratic ? gap * gap : std::abs(gap);
            any = true;
        }
    }
    if (!any) throw data_error("objective: no defined tau pairs");
    return total;
}

FitResult fit(const TauMatrix& taus, const FitConfig& cfg) {
    const std::size_t d = taus.dim();
    if (cfg.restarts == 0) throw std::invalid_argument("fit: need at least one restart");
    if (!(cfg.theta_min >= 1.0) || !(cfg.theta_max > cfg.theta_min))
        throw std::invalid_argument("fit: need 1 <= theta_min < theta_max");
    if (!(cfg.cooling > 0.0) || cfg.cooling >= 1.0)
        throw std::invalid_argument("fit: cooling must be in (0, 1)");
    if (!(cfg.t_min > 0.0) || !(cfg.t0 > cfg.t_min))
        throw std::invalid_argument("fit: need t0 > t_min > 0");
    if (!taus.has_defined_offdiagonal())
        throw data_error("fit: tau matrix has no defined pairs");

    const PackedObjective packed{taus, d, cfg.theta_min, cfg.theta_max, cfg.distance};

    // Moment-flavored start shared by restart 0: the smallest pair tau
    // bounds (theta-1)/theta from above.
    double min_tau = 1.0;
    for (std::size_t j = 0; j + 1 < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k)
            if (!std::isnan(taus.at(j, k))) min_tau = std::min(min_tau, taus.at(j, k));
    const double theta_start =
        clamp(1.0 / std::max(1.0 - min_tau, 1.0 / cfg.theta_max), cfg.theta_min,
              cfg.theta_max);

    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
        CounterRng rng = CounterRng::stream(cfg.seed, restart);
        std::vector<double> x(d + 1);
        if (restart == 0) {
            std::fill(x.begin(), x.end() - 1, 0.5);
            x[d] = theta_start;
        } else {
            for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform();
            x[d] = cfg.theta_min + (std::min(8.0, cfg.theta_max) - cfg.theta_min) * rng.uniform();
        }
        double fx = packed(x);
        std::vector<double> local_best = x;
        double local_best_f = fx;

        for (double temp = cfg.t0; temp > cfg.t_min; temp *= cfg.cooling) {
            for (std::size_t step = 0; step < cfg.steps_per_level; ++step) {
                const std::size_t coord = rng.next_u64() % (d + 1);
                std::vector<double> cand = x;
                if (coord < d)
                    cand[coord] = reflect_into(cand[coord] + 0.1 * rng.normal(), 0.0, 1.0);
                else
                    cand[coord] = reflect_into(cand[coord] + 0.5 * rng.normal(),
                                               cfg.theta_min, cfg.theta_max);
                const double fc = packed(cand);
                if (fc <= fx || rng.uniform() < std::exp((fx - fc) / temp)) {
                    x = std::move(cand);
                    fx = fc;
                    if (fx < local_best_f) {
                        local_best = x;
                        local_best_f = fx;
                    }
                }
            }
        }
        if (local_best_f < best_f) {
            best_f = local_best_f;
            best_x = local_best;
        }
    }

    if (cfg.polish) {
        best_x = nelder_mead(packed, best_x, 0.02, 4000);
        // A second, tighter pass from the polished point.
        best_x = nelder_mead(packed, best_x, 1e-4, 4000);
        best_f = packed(best_x);
    }

    FitResult out;
    out.labels = taus.labels();
    out.alphas.assign(best_x.begin(), best_x.end() - 1);
    for (double& a : out.alphas) a = clamp(a, 0.0, 1.0);
    out.theta = clamp(best_x[d], cfg.theta_min, cfg.theta_max);
    out.objective = best_f;
    out.restarts = cfg.restarts;
    out.seed = cfg.seed;

    const GumbelGenerator gen(out.theta);
    for (std::size_t j = 0; j + 1 < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            const double sample = taus.at(j, k);
            if (std::isnan(sample)) continue;
            out.residuals.push_back(
                {j, k, sample, tau_pair(out.alphas[j], out.alphas[k], gen)});
        }
    }
    if (d == 2)
        out.warnings.push_back(
            "two entities give a single tau: shares and theta are not jointly "
            "identified");
    if (out.theta > cfg.theta_max - 1e-6)
        out.warnings.push_back("theta ended at the upper bound");
    for (std::size_t k = 0; k < d; ++k)
        if (out.alphas[k] > 1.0 - 1e-9)
            out.warnings.push_back("share of " + out.labels[k] + " ended at one");
    return out;
}

FitResult fit_theta_fixed_alphas(const TauMatrix& taus, const std::vector<double>& alphas,
                                 const FitConfig& cfg) {
    if (alphas.size() != taus.dim())
        throw std::invalid_argument("fit_theta_fixed_alphas: share count does not match");
    for (double a : alphas)
        if (!(a >= 0.0) || a > 1.0)
            throw std::domain_error("fit_theta_fixed_alphas: shares must be in [0, 1]");
    if (!(cfg.theta_min >= 1.0) || !(cfg.theta_max > cfg.theta_min))
        throw std::invalid_argument("fit_theta_fixed_alphas: bad theta bounds");
    if (!taus.has_defined_offdiagonal())
        throw data_error("fit_theta_fixed_alphas: tau matrix has no defined pairs");

    FitResult out;
    out.labels = taus.labels();
    out.alphas = alphas;
    out.theta = num::golden_section_min(
        [&](double theta) { return objective(alphas, theta, taus, cfg.distance); },
        cfg.theta_min, cfg.theta_max, 1e-9);
    out.objective = objective(alphas, out.theta, taus, cfg.distance);
    out.restarts = 0;
    out.seed = cfg.seed;

    const GumbelGenerator gen(out.theta);
    const std::size_t d = taus.dim();
    for (std::size_t j = 0; j + 1 < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            const double sample = taus.at(j, k);
            if (std::isnan(sample)) continue;
            out.residuals.push_back({j, k, sample, tau_pair(alphas[j], alphas[k], gen)});
        }
    }
    if (out.theta > cfg.theta_max - 1e-6)
        out.warnings.push_back("theta ended at the upper bound");
    return out;
}

std::vector<RollingFit> rolling_fit(const IntensityPanel& panel, std::size_t window,
                                    std::size_t step, const FitConfig& cfg, RollingMode mode) {
    if (window < 30)
        throw std::invalid_argument("rolling_fit: window must be at least 30 rows");
    if (step == 0) throw std::invalid_argument("rolling_fit: step must be >= 1");
    if (window > panel.rows())
        throw data_error("rolling_fit: window exceeds panel length");

    std::vector<double> fixed_alphas;
    if (mode == RollingMode::fixed_alpha)
        fixed_alphas = fit(pairwise_tau_matrix(panel), cfg).alphas;

    std::vector<RollingFit> out;
    for (std::size_t start = 0; start + window <= panel.rows(); start += step) {
        IntensityPanel slice;
        slice.labels = panel.labels;
        slice.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(start),
                           panel.dates.begin() + static_cast<std::ptrdiff_t>(start + window));
        slice.values.assign(
            panel.values.begin() + static_cast<std::ptrdiff_t>(start * panel.cols()),
            panel.values.begin() + static_cast<std::ptrdiff_t>((start + window) * panel.cols()));
        RollingFit row;
        row.window_end = slice.dates.back();
        const TauMatrix taus = pairwise_tau_matrix(slice);
        row.result = mode == RollingMode::fixed_alpha
                         ? fit_theta_fixed_alphas(taus, fixed_alphas, cfg)
                         : fit(taus, cfg);
        out.push_back(std::move(row));
    }
    return out;
}

double harmonic_mean_alpha(const std::vector<double>& alphas) {
    if (alphas.empty()) throw std::invalid_argument("harmonic_mean_alpha: empty input");
    double inv_sum = 0.0;
    for (double a : alphas) {
        if (!(a >= 0.0) || a > 1.0)
            throw std::domain_error("harmonic_mean_alpha: shares must be in [0, 1]");
        if (a == 0.0) return 0.0;
        inv_sum += 1.0 / a;
    }
    return static_cast<double>(alphas.size()) / inv_sum;
}

}  // namespace ccm
