#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccm/copula.hpp"
#include "ccm/gumbel.hpp"
#include "ccm/hac.hpp"
#include "ccm/rng.hpp"

namespace ccm {

struct SimConfig {
    std::size_t n_samples;
    std::uint64_t seed;
    ShockIntensities shocks;
    double theta;

    SimConfig(std::size_t n, std::uint64_t s, ShockIntensities sh, double th);
};

// times[r*d + k] is entity k's default time in replication r.
struct DefaultTimeSample {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> times;
    std::vector<double> systemic_times;

    double at(std::size_t r, std::size_t k) const { return times[r * d + k]; }
};

// Positive a-stable draw with Laplace transform exp(-t^a), a in (0,1]; a = 1
// is the unit point mass and consumes no randomness.
double sample_positive_stable(double a, CounterRng& rng);

// One draw from the Gumbel copula via the frailty representation
// V_i = psi(E_i / S); every coordinate lies in (0,1).
std::vector<double> sample_gumbel_vector(std::size_t dim, const GumbelGenerator& gen,
                                         CounterRng& rng);

// Observed default times tau_k = min(X_0, X_k) for the full shock vector.
// Replication r uses its own counter stream, so results are independent of
// traversal order and reproducible for a fixed seed.
DefaultTimeSample simulate_default_times(const SimConfig& cfg);

struct TauEstimate {
    double tau;
    double std_error;
};

// Empirical Kendall tau of a simulated pair with systemic shares
// (alpha_j, alpha_k).  Rates are normalized to lambda_0 = 1; alpha = 0
// drops the systemic minimum for that entity and alpha = 1 makes the entity
// default exactly at the systemic shock.
TauEstimate empirical_tau_mc(double alpha_j, double alpha_k, const GumbelGenerator& gen,
                             std::size_t n, std::uint64_t seed);

// Observed default-time pairs of a nested triple: (tau_j, tau_k) when the
// systemic shock sits inside, (tau_i, tau_j) when it sits outside.
std::vector<std::array<double, 2>> simulate_hac_triple(const HacSpec& spec, std::size_t n,
                                                       std::uint64_t seed);

}  // namespace ccm
