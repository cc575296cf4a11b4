#pragma once

#include <vector>

namespace ccm {

// Tie-adjusted (tau-b) Kendall rank correlation.  The default path runs in
// O(m log m) via merge counting; the quadratic scan is kept as a reference
// and both produce bit-identical results because they feed the same integer
// pair counts into the same final expression.
double empirical_kendall_tau(const std::vector<double>& x, const std::vector<double>& y);
double empirical_kendall_tau_brute(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ccm
