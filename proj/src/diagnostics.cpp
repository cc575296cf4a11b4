#include "ccm/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ccm/errors.hpp"
#include "ccm/kendall.hpp"

namespace ccm {
namespace {

constexpr double kAlphaFloor = 1e-6;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void check_fit_params(const IntensityPanel& panel, const std::vector<double>& alphas,
                      double theta) {
    if (alphas.size() != panel.cols())
        throw std::invalid_argument("share count does not match the panel");
    if (!std::isfinite(theta) || theta < 1.0)
        throw std::domain_error("theta must be finite and >= 1");
    for (double a : alphas)
        if (!(a >= 0.0) || a > 1.0)
            throw std::domain_error("shares must be in [0, 1]");
}

}  // namespace

SystemicSeries extract_systemic_intensity(const IntensityPanel& panel,
                                          const std::vector<double>& alphas,
                                          double theta) {
    check_fit_params(panel, alphas, theta);
    double inv_sum = 0.0;
    std::size_t active = 0;
    for (double a : alphas) {
        if (a < kAlphaFloor) continue;
        inv_sum += 1.0 / a;
        ++active;
    }
    if (active == 0)
        throw data_error("extract_systemic_intensity: every share is below the floor");

    SystemicSeries out;
    out.dates = panel.dates;
    out.values.resize(panel.rows());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        double powered = 0.0;
        for (std::size_t k = 0; k < panel.cols(); ++k) {
            if (alphas[k] < kAlphaFloor) continue;
            powered += std::pow(panel.at(t, k), theta);
        }
        out.values[t] = powered / inv_sum;
    }
    return out;
}

SpecCheckReport systemic_tau_profile(const IntensityPanel& panel,
                                     const std::vector<double>& alphas, double theta,
                                     double threshold) {
    check_fit_params(panel, alphas, theta);
    if (panel.cols() < 2)
        throw std::invalid_argument("systemic_tau_profile: need at least two entities");
    if (!(threshold > 0.0))
        throw std::invalid_argument("systemic_tau_profile: threshold must be positive");
    const SystemicSeries systemic = extract_systemic_intensity(panel, alphas, theta);

    SpecCheckReport report;
    report.theta = theta;
    report.threshold = threshold;

    std::vector<double> column(panel.rows());
    double sq_sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t k = 0; k < panel.cols(); ++k) {
        for (std::size_t t = 0; t < panel.rows(); ++t) column[t] = panel.at(t, k);
        ProfilePoint p;
        p.label = panel.labels[k];
        p.alpha = alphas[k];
        p.line_tau = (theta - 1.0) / theta + alphas[k] / theta;
        try {
            p.sample_tau = empirical_kendall_tau(column, systemic.values);
            const double resid = p.sample_tau - p.line_tau;
            sq_sum += resid * resid;
            ++defined;
        } catch (const data_error&) {
            p.sample_tau = std::numeric_limits<double>::quiet_NaN();
            report.warnings.push_back("tau undefined for " + p.label);
        }
        if (alphas[k] < kAlphaFloor)
            report.warnings.push_back(p.label + " excluded from the systemic sum");
        report.points.push_back(std::move(p));
    }
    if (defined == 0)
        throw data_error("systemic_tau_profile: no entity has a defined tau");
    report.rmse = std::sqrt(sq_sum / static_cast<double>(defined));
    report.passed = report.rmse < threshold;
    return report;
}

void emit_scatter_csv(const SpecCheckReport& report, std::ostream& os) {
    os << "label,alpha,tau_hat,tau_line,residual\n";
    for (const auto& p : report.points)
        os << p.label << ',' << g17(p.alpha) << ',' << g17(p.sample_tau) << ','
           << g17(p.line_tau) << ',' << g17(p.sample_tau - p.line_tau) << '\n';
}

std::string render_scatter_svg(const SpecCheckReport& report) {
    const double width = 640, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double y_lo = (report.theta - 1.0) / report.theta, y_hi = 1.0;
    for (const auto& p : report.points)
        if (!std::isnan(p.sample_tau)) y_lo = std::min(y_lo, p.sample_tau);
    y_lo = std::max(0.0, y_lo - 0.05);
    y_hi = std::min(1.05, y_hi + 0.02);

    const auto px = [&](double alpha) { return ml + alpha * pw; };
    const auto py = [&](double tau) {
        return mt + (y_hi - tau) / (y_hi - y_lo) * ph;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' '
       << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double a = i / 5.0;
        os << "<line x1=\"" << svg_num(px(a)) << "\" y1=\"" << svg_num(mt)
           << "\" x2=\"" << svg_num(px(a)) << "\" y2=\"" << svg_num(mt + ph)
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << svg_num(px(a)) << "\" y=\"" << svg_num(mt + ph + 18)
           << "\" text-anchor=\"middle\">" << svg_num(a) << "</text>\n";
        const double tau = y_lo + (y_hi - y_lo) * i / 5.0;
        os << "<line x1=\"" << svg_num(ml) << "\" y1=\"" << svg_num(py(tau))
           << "\" x2=\"" << svg_num(ml + pw) << "\" y2=\"" << svg_num(py(tau))
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << svg_num(ml - 8) << "\" y=\"" << svg_num(py(tau) + 4)
           << "\" text-anchor=\"end\">" << svg_num(tau) << "</text>\n";
    }

    os << "<line x1=\"" << svg_num(px(0.0)) << "\" y1=\""
       << svg_num(py((report.theta - 1.0) / report.theta)) << "\" x2=\""
       << svg_num(px(1.0)) << "\" y2=\"" << svg_num(py(1.0))
       << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";

    for (const auto& p : report.points) {
        if (std::isnan(p.sample_tau)) continue;
        os << "<circle cx=\"" << svg_num(px(p.alpha)) << "\" cy=\""
           << svg_num(py(p.sample_tau)) << "\" r=\"4\" fill=\"#d62728\"/>\n";
        os << "<text x=\"" << svg_num(px(p.alpha) + 6) << "\" y=\""
           << svg_num(py(p.sample_tau) - 6) << "\">" << p.label << "</text>\n";
    }

    os << "<text x=\"" << svg_num(ml + pw / 2) << "\" y=\"" << svg_num(height - 12)
       << "\" text-anchor=\"middle\">systemic share</text>\n";
    os << "<text x=\"18\" y=\"" << svg_num(mt + ph / 2)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << svg_num(mt + ph / 2) << ")\">tau vs systemic</text>\n";
    os << "<text x=\"" << svg_num(ml) << "\" y=\"24\">rmse " << svg_num(report.rmse)
       << (report.passed ? " (within " : " (exceeds ") << svg_num(report.threshold)
       << ")</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace ccm
