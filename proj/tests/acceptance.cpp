// Acceptance gate: nine end-to-end checks of the toolkit, each with a frozen
// tolerance.  One PASS/FAIL line per check; exit status 0 only if all pass.
// The pipeline-determinism check drives the real binary via CONTAGION_BIN.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "ccm/copula.hpp"
#include "ccm/diagnostics.hpp"
#include "ccm/estimator.hpp"
#include "ccm/hac.hpp"
#include "ccm/kendall.hpp"
#include "ccm/rng.hpp"
#include "ccm/sampler.hpp"

namespace fs = std::filesystem;
using namespace ccm;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail, double secs) {
    std::printf("%s  %d. %-46s %s  [%.1fs]\n", ok ? "PASS" : "FAIL", idx, name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

std::vector<double> rates_for_alphas(double lambda0, const std::vector<double>& alphas) {
    std::vector<double> rates;
    for (double a : alphas) rates.push_back(lambda0 * (1.0 / a - 1.0));
    return rates;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v;
    for (std::size_t k = 0; k < n; ++k)
        v.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    return v;
}

std::string grid_date(std::size_t t) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04zu-%02zu-%02zu", 2000 + t / 336, 1 + (t % 336) / 28,
                  1 + t % 28);
    return buf;
}

// Bounded decreasing map of default times; pairwise taus are preserved and
// the cross-sectional sum of theta-th powers concentrates, so the systemic
// extraction keeps its rank information.
IntensityPanel panel_from_times(const DefaultTimeSample& sample, double theta) {
    std::vector<std::string> dates, labels;
    std::vector<double> values;
    for (std::size_t r = 0; r < sample.n; ++r) dates.push_back(grid_date(r));
    for (std::size_t k = 0; k < sample.d; ++k) labels.push_back("e" + std::to_string(k + 1));
    values.reserve(sample.n * sample.d);
    for (std::size_t r = 0; r < sample.n; ++r)
        for (std::size_t k = 0; k < sample.d; ++k)
            values.push_back(std::pow(1.0 + sample.at(r, k), -1.0 / theta));
    return IntensityPanel(std::move(dates), std::move(labels), std::move(values));
}

TauMatrix tau_matrix_of_times(const DefaultTimeSample& sample) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < sample.d; ++k) labels.push_back("e" + std::to_string(k + 1));
    TauMatrix taus(labels);
    for (std::size_t j = 0; j < sample.d; ++j)
        for (std::size_t k = j + 1; k < sample.d; ++k) {
            std::vector<double> xs, ys;
            xs.reserve(sample.n);
            ys.reserve(sample.n);
            for (std::size_t r = 0; r < sample.n; ++r) {
                xs.push_back(sample.at(r, j));
                ys.push_back(sample.at(r, k));
            }
            taus.set(j, k, empirical_kendall_tau(xs, ys));
        }
    return taus;
}

// 1. Closed-form pair tau against large-sample simulation, over a grid that
// exercises every supported corner of (theta, alpha) plus one calibrated
// sovereign pair.
void check_tau_formula_vs_mc() {
    Timer timer;
    struct Case {
        double theta, aj, ak;
    };
    const std::vector<Case> cases = {
        {1.0, 0.5, 0.5},  {1.0, 1.0, 0.25},  {1.5, 0.25, 0.75}, {1.5, 0.0, 0.5},
        {2.0, 0.75, 0.75}, {2.0, 1.0, 1.0},  {2.0, 0.0, 0.0},   {4.0, 0.5, 0.25},
        {4.0, 1.0, 0.0},  {4.0, 0.25, 0.25}, {6.0, 0.75, 0.5},
        {6.060185, 0.690164, 0.469473},
    };
    double max_gap = 0.0;
    bool sovereign_level_ok = false;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const GumbelGenerator gen(cases[i].theta);
        const double expected = tau_pair(cases[i].aj, cases[i].ak, gen);
        const TauEstimate est =
            empirical_tau_mc(cases[i].aj, cases[i].ak, gen, 200000, 1000 + i);
        max_gap = std::max(max_gap, std::abs(est.tau - expected));
        if (i + 1 == cases.size()) sovereign_level_ok = std::abs(expected - 0.899) < 5e-4;
    }
    report(1, "pair tau formula vs simulation", max_gap <= 0.01 && sovereign_level_ok,
           fmt("max|gap| %.2e (tol 1e-02)", max_gap), timer.secs());
}

// 2. theta = 1 collapses the survival copula to the common-shock min form
// prod u_k^(1-alpha_k) * min_k u_k^(alpha_k).
void check_independence_reduction() {
    Timer timer;
    CounterRng rng(271828);
    double max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(rng.next_u64() % 4);
        const double lambda0 = 0.05 + 2.95 * rng.uniform();
        std::vector<double> rates, alphas, us;
        for (std::size_t k = 0; k < d; ++k) {
            rates.push_back(0.05 + 2.95 * rng.uniform());
            alphas.push_back(lambda0 / (lambda0 + rates.back()));
            us.push_back(rng.uniform());
        }
        const double got = survival_copula(us, ModelParams(alphas, 1.0));
        double prod = 1.0, min_pow = 2.0;
        for (std::size_t k = 0; k < d; ++k) {
            prod *= std::pow(us[k], 1.0 - alphas[k]);
            min_pow = std::min(min_pow, std::pow(us[k], alphas[k]));
        }
        max_err = std::max(max_err, std::abs(got - prod * min_pow));
    }
    report(2, "common-shock reduction of the copula", max_err <= 1e-12,
           fmt("max|err| %.2e (tol 1e-12)", max_err), timer.secs());
}

// 3. The general tau integral, fed exponential shock survivals, lands on the
// closed form for the observed pair.
void check_general_integral() {
    Timer timer;
    CounterRng rng(314159);
    double max_gap = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double theta = 1.05 + 4.95 * rng.uniform();
        const double l0 = 0.1 + 1.9 * rng.uniform();
        const double lj = 0.1 + 1.9 * rng.uniform();
        const double lk = 0.1 + 1.9 * rng.uniform();
        const GumbelGenerator gen(theta);
        const auto expo = [theta](double rate) {
            const double r = std::pow(rate, 1.0 / theta);
            return [r](double t) { return std::exp(-r * t); };
        };
        const double got = kendall_tau_general(gen, expo(l0), expo(lj), expo(lk));
        const double expected = tau_pair(l0 / (l0 + lj), l0 / (l0 + lk), gen);
        max_gap = std::max(max_gap, std::abs(got - expected));
    }
    report(3, "general tau integral vs closed form", max_gap <= 1e-6,
           fmt("max|gap| %.2e (tol 1e-06)", max_gap), timer.secs());
}

// 4. Calibration recovers (alpha, theta): exactly from a noiseless tau
// matrix, and within Monte Carlo tolerances from 2000-replication samples
// for at least 9 of 10 seeds.
void check_estimator_recovery() {
    Timer timer;
    const double true_theta = 3.0;
    const std::vector<double> true_alphas = {0.2, 0.4, 0.5, 0.7, 0.9};
    const std::vector<std::string> labels = {"e1", "e2", "e3", "e4", "e5"};
    const GumbelGenerator gen(true_theta);

    TauMatrix exact(labels);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t k = j + 1; k < 5; ++k)
            exact.set(j, k, tau_pair(true_alphas[j], true_alphas[k], gen));
    const FitResult noiseless = fit(exact);
    double alpha_err = 0.0;
    for (std::size_t k = 0; k < 5; ++k)
        alpha_err = std::max(alpha_err, std::abs(noiseless.alphas[k] - true_alphas[k]));
    const double theta_err = std::abs(noiseless.theta - true_theta);
    const bool noiseless_ok = theta_err <= 0.05 && alpha_err <= 0.02;

    int mc_hits = 0;
    const ShockIntensities shocks(1.0, rates_for_alphas(1.0, true_alphas));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const DefaultTimeSample sample =
            simulate_default_times(SimConfig(2000, seed, shocks, true_theta));
        FitConfig cfg;
        cfg.seed = seed;
        const FitResult res = fit(tau_matrix_of_times(sample), cfg);
        double da = 0.0;
        for (std::size_t k = 0; k < 5; ++k)
            da = std::max(da, std::abs(res.alphas[k] - true_alphas[k]));
        if (std::abs(res.theta - true_theta) <= 0.3 && da <= 0.1) ++mc_hits;
    }
    report(4, "parameter recovery from tau matrices",
           noiseless_ok && mc_hits >= 9,
           fmt("noiseless dtheta %.1e dalpha %.1e", theta_err, alpha_err) +
               fmt(", mc %2.0f/10 seeds", static_cast<double>(mc_hits)),
           timer.secs());
}

// 5. Constant-rate panels return the systemic rate exactly, date by date.
void check_systemic_round_trip() {
    Timer timer;
    CounterRng rng(577215);
    double max_rel = 0.0;
    for (const double theta : {1.0, 2.7, 6.0}) {
        for (const double lambda0 : {0.5, 1.0, 2.0}) {
            std::vector<double> rates, alphas, mus;
            for (std::size_t k = 0; k < 4; ++k) {
                rates.push_back(0.1 + 1.9 * rng.uniform());
                alphas.push_back(lambda0 / (lambda0 + rates.back()));
                mus.push_back(std::pow(lambda0 + rates.back(), 1.0 / theta));
            }
            std::vector<std::string> dates, labels = {"a", "b", "c", "d"};
            std::vector<double> values;
            for (std::size_t t = 0; t < 40; ++t) {
                dates.push_back(grid_date(t));
                values.insert(values.end(), mus.begin(), mus.end());
            }
            const SystemicSeries series =
                extract_systemic_intensity(IntensityPanel(dates, labels, values), alphas, theta);
            for (double v : series.values)
                max_rel = std::max(max_rel, std::abs(v - lambda0) / lambda0);
        }
    }
    report(5, "systemic intensity round trip", max_rel <= 1e-10,
           fmt("max rel err %.2e (tol 1e-10)", max_rel), timer.secs());
}

// 6. The line diagnostic separates a true single cluster from two glued
// independent clusters fitted as one.
void check_line_diagnostic_separation() {
    Timer timer;
    int well_hits = 0, mis_hits = 0;
    double worst_well = 0.0, best_mis = 1.0;

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        {
            const std::vector<double> alphas = linspace(0.5, 0.9, 12);
            const ShockIntensities shocks(1.0, rates_for_alphas(1.0, alphas));
            const DefaultTimeSample sample =
                simulate_default_times(SimConfig(1500, seed, shocks, 3.0));
            const IntensityPanel panel = panel_from_times(sample, 3.0);
            FitConfig cfg;
            cfg.seed = seed;
            const FitResult res = fit(pairwise_tau_matrix(panel), cfg);
            const SpecCheckReport rep =
                systemic_tau_profile(panel, res.alphas, res.theta, 0.05);
            worst_well = std::max(worst_well, rep.rmse);
            if (rep.rmse < 0.05) ++well_hits;
        }
        {
            const std::vector<double> alphas = linspace(0.6, 0.85, 6);
            const ShockIntensities shocks(1.0, rates_for_alphas(1.0, alphas));
            const DefaultTimeSample a =
                simulate_default_times(SimConfig(1500, seed, shocks, 3.0));
            const DefaultTimeSample b =
                simulate_default_times(SimConfig(1500, seed + 1000000, shocks, 3.0));
            std::vector<std::string> dates, labels;
            std::vector<double> values;
            for (std::size_t r = 0; r < a.n; ++r) dates.push_back(grid_date(r));
            for (std::size_t k = 0; k < 12; ++k) labels.push_back("e" + std::to_string(k + 1));
            for (std::size_t r = 0; r < a.n; ++r) {
                for (std::size_t k = 0; k < 6; ++k)
                    values.push_back(std::pow(1.0 + a.at(r, k), -1.0 / 3.0));
                for (std::size_t k = 0; k < 6; ++k)
                    values.push_back(std::pow(1.0 + b.at(r, k), -1.0 / 3.0));
            }
            const IntensityPanel panel(dates, labels, values);
            FitConfig cfg;
            cfg.seed = seed;
            const FitResult res = fit(pairwise_tau_matrix(panel), cfg);
            const SpecCheckReport rep =
                systemic_tau_profile(panel, res.alphas, res.theta, 0.05);
            best_mis = std::min(best_mis, rep.rmse);
            if (rep.rmse > 0.1) ++mis_hits;
        }
    }
    report(6, "line diagnostic separation", well_hits >= 9 && mis_hits >= 9,
           fmt("aligned %2.0f/10 (worst rmse %.3f)", static_cast<double>(well_hits),
               worst_well) +
               fmt(", split %2.0f/10 (best rmse %.3f)", static_cast<double>(mis_hits),
                   best_mis),
           timer.secs());
}

// 7. Nested-pair taus: the direct formula, the distribution-function route
// and large-sample simulation coincide; equal nesting parameters reduce to
// the closed form of the one-level model.
void check_hac_taus() {
    Timer timer;
    const std::array<std::array<double, 2>, 3> params = {{{1.5, 1.0}, {1.5, 1.5}, {3.0, 1.5}}};
    const double li = 0.9, lj = 1.3, lk = 0.7;
    double max_route_gap = 0.0, max_mc_gap = 0.0, max_eq_gap = 0.0;
    std::uint64_t seed = 9000;
    for (const auto& p : params) {
        for (const SystemicPosition pos : {SystemicPosition::inner, SystemicPosition::outer}) {
            const HacSpec spec(p[0], p[1], li, lj, lk, pos);
            const HacTauRoutes routes = hac_kendall_tau_routes(spec);
            max_route_gap = std::max(max_route_gap,
                                     std::abs(routes.direct - routes.quadrature));
            const auto pairs = simulate_hac_triple(spec, 200000, ++seed);
            std::vector<double> xs, ys;
            xs.reserve(pairs.size());
            ys.reserve(pairs.size());
            for (const auto& pr : pairs) {
                xs.push_back(pr[0]);
                ys.push_back(pr[1]);
            }
            max_mc_gap = std::max(
                max_mc_gap, std::abs(empirical_kendall_tau(xs, ys) - routes.direct));
            if (p[0] == p[1]) {
                // Equal parameters collapse the nesting; the shared shock is
                // lambda_i in the inner position and lambda_k in the outer.
                const GumbelGenerator gen(p[0]);
                const bool inner = pos == SystemicPosition::inner;
                const double a1 = inner ? li / (li + lj) : lk / (lk + li);
                const double a2 = inner ? li / (li + lk) : lk / (lk + lj);
                max_eq_gap = std::max(max_eq_gap,
                                      std::abs(routes.direct - tau_pair(a1, a2, gen)));
            }
        }
    }
    report(7, "nested-pair tau: three routes agree",
           max_route_gap <= 1e-5 && max_mc_gap <= 0.01 && max_eq_gap <= 1e-5,
           fmt("routes %.1e, mc %.1e", max_route_gap, max_mc_gap) +
               fmt(", one-level %.1e", max_eq_gap),
           timer.secs());
}

// 8. Both rank-correlation paths are bit-identical on tie-free data, and the
// three-point worked example is exactly 1/3.
void check_kendall_paths() {
    Timer timer;
    CounterRng rng(141421);
    bool all_equal = true;
    for (int i = 0; i < 1000 && all_equal; ++i) {
        const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 79);
        std::vector<double> xs(m), ys(m);
        for (std::size_t t = 0; t < m; ++t) {
            xs[t] = static_cast<double>(t);
            ys[t] = static_cast<double>(t);
        }
        for (std::size_t t = m; t-- > 1;) {
            std::swap(xs[t], xs[rng.next_u64() % (t + 1)]);
            std::swap(ys[t], ys[rng.next_u64() % (t + 1)]);
        }
        all_equal = empirical_kendall_tau(xs, ys) == empirical_kendall_tau_brute(xs, ys);
    }
    const double worked = empirical_kendall_tau({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0});
    const bool worked_ok = worked == 1.0 / 3.0;
    report(8, "rank correlation fast path vs brute force", all_equal && worked_ok,
           std::string(all_equal ? "1000/1000 bit-identical" : "paths diverge") +
               fmt(", worked example %.17g", worked),
           timer.secs());
}

// 9. simulate -> estimate -> diagnose through the installed binary is
// byte-stable across two runs with the same seeds.
void check_pipeline_determinism() {
    Timer timer;
    const fs::path root = fs::temp_directory_path() / "ccm_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    const auto shell = [](const std::string& cmd) {
        const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return in.good() || in.eof() ? buf.str() : std::string("<unreadable>");
    };

    bool ran_ok = true;
    for (const std::string run : {"r1", "r2"}) {
        const std::string base = (root / run).string();
        ran_ok = ran_ok &&
                 shell(std::string(CONTAGION_BIN) +
                       " simulate --theta 3 --lambda0 1 --lambdas 1,0.5,0.25,0.7,0.4"
                       " --n 500 --seed 42 --out " + base + "/sim --panel") == 0;
        ran_ok = ran_ok &&
                 shell(std::string(CONTAGION_BIN) + " estimate --input " + base +
                       "/sim/intensities.csv --restarts 10 --seed 42 --out " + base +
                       "/fit") == 0;
        const int diag = shell(std::string(CONTAGION_BIN) + " diagnose --input " + base +
                               "/sim/intensities.csv --params " + base +
                               "/fit/fit.json --format svg --out " + base + "/diag");
        ran_ok = ran_ok && (diag == 0 || diag == 3);
    }

    std::size_t identical = 0;
    const std::vector<std::string> files = {
        "sim/sample.csv",  "sim/intensities.csv", "fit/fit.json",    "fit/tau_matrix.csv",
        "diag/report.json", "diag/scatter.svg",    "diag/systemic.csv"};
    if (ran_ok)
        for (const auto& f : files)
            if (slurp(root / "r1" / f) == slurp(root / "r2" / f)) ++identical;
    report(9, "pipeline outputs byte-stable across runs",
           ran_ok && identical == files.size(),
           ran_ok ? fmt("%1.0f/7 files identical", static_cast<double>(identical))
                  : std::string("pipeline run failed"),
           timer.secs());
}

}  // namespace

int main() {
    check_tau_formula_vs_mc();
    check_independence_reduction();
    check_general_integral();
    check_estimator_recovery();
    check_systemic_round_trip();
    check_line_diagnostic_separation();
    check_hac_taus();
    check_kendall_paths();
    check_pipeline_determinism();
    if (g_failures == 0) {
        std::printf("acceptance: 9/9 passed\n");
        return 0;
    }
    std::printf("acceptance: %d of 9 FAILED\n", g_failures);
    return 1;
}
