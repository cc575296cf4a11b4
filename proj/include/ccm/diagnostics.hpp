#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccm/estimator.hpp"

namespace ccm {

struct SystemicSeries {
    std::vector<std::string> dates;
    std::vector<double> values;
};

// Cross-sectional systemic intensity: at each date, the sum of the
// theta-powered entity intensities divided by the sum of inverse shares.
// Entities with a share below 1e-6 are excluded from both sums.
SystemicSeries extract_systemic_intensity(const IntensityPanel& panel,
                                          const std::vector<double>& alphas,
                                          double theta);

struct ProfilePoint {
    std::string label;
    double alpha;
    double sample_tau;  // NaN when the pair is undefined
    double line_tau;
};

// Exchangeability check: each entity's tau against the systemic series is
// plotted over its share and compared with the affine profile
// (theta-1)/theta + alpha/theta.
struct SpecCheckReport {
    double theta = 1.0;
    double threshold = 0.05;
    double rmse = 0.0;
    bool passed = false;
    std::vector<ProfilePoint> points;
    std::vector<std::string> warnings;
};

SpecCheckReport systemic_tau_profile(const IntensityPanel& panel,
                                     const std::vector<double>& alphas, double theta,
                                     double threshold = 0.05);

// label, alpha, tau_hat, tau_line, residual rows with full round-trip
// precision.
void emit_scatter_csv(const SpecCheckReport& report, std::ostream& os);

// Self-contained SVG scatter of the profile points over the model line.
std::string render_scatter_svg(const SpecCheckReport& report);

}  // namespace ccm
