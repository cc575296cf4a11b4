#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ccm/errors.hpp"

namespace ccm::num {

// Gauss-Kronrod 7/15 rule on [a,b]; returns the K15 value and writes the
// QUADPACK-style error estimate (200|K15-G7|)^{3/2}.
template <class F>
double gauss_kronrod_15(const F& f, double a, double b, double& err) {
    static const double nw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0, 0.204432940075298},
        {0.586087235467691, 0.0, 0.169004726639267},
        {0.864864423359769, 0.0, 0.104790010322250},
        {0.991455371120813, 0.0, 0.022935322010529}};

    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);

    const double y0 = f(mid);
    double g7 = nw[0][1] * y0;
    double k15 = nw[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        const double dx = hw * nw[i][0];
        const double yi = f(mid + dx) + f(mid - dx);
        g7 += nw[i][1] * yi;
        k15 += nw[i][2] * yi;
    }
    g7 *= hw;
    k15 *= hw;

    err = 200.0 * std::fabs(k15 - g7);
    err *= std::sqrt(err);
    return k15;
}

// Adaptive bisection until every segment meets its length-proportional share
// of abs_tol.  Throws numeric_error when the segment budget runs out.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 int max_segments = 20000) {
    if (!(b > a)) return 0.0;
    struct Seg {
        double a, b;
    };
    std::vector<Seg> stack{{a, b}};
    stack.reserve(64);
    const double span = b - a;
    double sum = 0.0;
    int used = 1;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        double err = 0.0;
        const double v = gauss_kronrod_15(f, s.a, s.b, err);
        if (err <= abs_tol * ((s.b - s.a) / span) || (s.b - s.a) < 1e-14 * span) {
            sum += v;
            continue;
        }
        if (used + 2 > max_segments)
            throw numeric_error("integrate: segment budget exhausted on [" +
                                std::to_string(s.a) + "," + std::to_string(s.b) + "]");
        const double m = 0.5 * (s.a + s.b);
        stack.push_back({s.a, m});
        stack.push_back({m, s.b});
        used += 2;
    }
    return sum;
}

// Smallest positive t with f(t) = y for a continuous increasing f with
// f(0+) <= 0 boundary behaviour; geometric bracketing from `hint`, then
// bisection to a relative tolerance near round-off.
template <class F>
double invert_increasing(const F& f, double y, double hint = 1.0) {
    if (y <= 0.0) return 0.0;
    double lo = hint, hi = hint;
    if (f(hint) < y) {
        for (int i = 0; i < 1100 && f(hi) < y; ++i) {
            lo = hi;
            hi *= 2.0;
        }
        if (f(hi) < y) throw numeric_error("invert_increasing: no upper bracket");
    } else {
        for (int i = 0; i < 1100 && f(lo) >= y; ++i) {
            hi = lo;
            lo *= 0.5;
        }
        if (f(lo) >= y) return 0.0;  // target below reachable range
    }
    for (int i = 0; i < 200 && (hi - lo) > 4e-16 * hi; ++i) {
        const double m = 0.5 * (lo + hi);
        (f(m) < y ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimum of a unimodal f on [a,b]; returns the abscissa.
template <class F>
double golden_section_min(const F& f, double a, double b, double tol = 1e-7) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while ((b - a) > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace ccm::num
