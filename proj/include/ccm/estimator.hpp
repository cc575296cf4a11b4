#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccm/copula.hpp"

namespace ccm {

// Panel of default intensities: one row per date, one column per entity.
// Dates are ISO strings, so lexicographic order is chronological order.
struct IntensityPanel {
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    std::vector<double> values;

    IntensityPanel() = default;
    IntensityPanel(std::vector<std::string> dates_, std::vector<std::string> labels_,
                   std::vector<double> values_);

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return labels.size(); }
    double at(std::size_t t, std::size_t k) const { return values[t * cols() + k]; }
};

// Empirical tie-adjusted tau for every entity pair; pairs whose tau is
// undefined (a constant column) stay NaN.  Taus are taken on levels by
// default; `first_differences` switches to day-over-day changes for
// sensitivity analysis.
TauMatrix pairwise_tau_matrix(const IntensityPanel& panel, bool first_differences = false);

enum class Distance { quadratic, absolute };

// Aggregate gap between model and sample tau over the defined pairs:
// squared gaps by default, absolute gaps on request.
double objective(const std::vector<double>& alphas, double theta, const TauMatrix& taus,
                 Distance distance = Distance::quadratic);

struct FitConfig {
    std::uint64_t seed = 1;
    std::size_t restarts = 50;
    double t0 = 0.05;
    double cooling = 0.95;
    std::size_t steps_per_level = 200;
    double t_min = 1e-8;
    double theta_min = 1.0;
    double theta_max = 50.0;
    bool polish = true;
    Distance distance = Distance::quadratic;
};

struct PairResidual {
    std::size_t j;
    std::size_t k;
    double sample_tau;
    double model_tau;
};

struct FitResult {
    std::vector<std::string> labels;
    std::vector<double> alphas;
    double theta = 1.0;
    double objective = 0.0;
    std::vector<PairResidual> residuals;
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Calibrate (alpha_1..alpha_d, theta) to a sample tau matrix by simulated
// annealing with restarts, then a local polish.  Deterministic for a fixed
// config: every restart draws from its own counter stream and ties go to
// the lowest restart index.
FitResult fit(const TauMatrix& taus, const FitConfig& cfg = {});

// Best theta for fixed shares, by golden-section search; model taus are
// affine in 1/theta, so both distances are unimodal along that axis.
FitResult fit_theta_fixed_alphas(const TauMatrix& taus, const std::vector<double>& alphas,
                                 const FitConfig& cfg = {});

struct RollingFit {
    std::string window_end;
    FitResult result;
};

enum class RollingMode { free, fixed_alpha };

// Refit on each length-`window` slice, advancing by `step` rows.  In
// fixed_alpha mode the shares come from one full-sample fit and only theta
// is re-estimated per window.
std::vector<RollingFit> rolling_fit(const IntensityPanel& panel, std::size_t window,
                                    std::size_t step, const FitConfig& cfg = {},
                                    RollingMode mode = RollingMode::free);

// d / sum(1/alpha_k); zero whenever any share is zero.
double harmonic_mean_alpha(const std::vector<double>& alphas);

}  // namespace ccm
