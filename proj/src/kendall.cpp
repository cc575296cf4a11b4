#include "ccm/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "ccm/errors.hpp"

namespace ccm {
namespace {

struct PairCounts {
    std::int64_t n0 = 0;       // all pairs
    std::int64_t tied_x = 0;   // pairs tied in x (joint ties included)
    std::int64_t tied_y = 0;   // pairs tied in y (joint ties included)
    std::int64_t num = 0;      // concordant minus discordant
};

void check_input(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("kendall tau: series lengths differ");
    if (x.size() < 2)
        throw std::invalid_argument("kendall tau: need at least two observations");
    for (double v : x)
        if (std::isnan(v)) throw data_error("kendall tau: NaN in series");
    for (double v : y)
        if (std::isnan(v)) throw data_error("kendall tau: NaN in series");
}

double finish(const PairCounts& c) {
    if (c.n0 == c.tied_x || c.n0 == c.tied_y)
        throw data_error("kendall tau undefined: constant series");
    const std::int64_t dx = c.n0 - c.tied_x;
    const std::int64_t dy = c.n0 - c.tied_y;
    // Equal adjustments (tie-free data in particular) keep the denominator
    // exact, so monotone series come out as exactly +-1.
    const double denom = dx == dy ? static_cast<double>(dx)
                                  : std::sqrt(static_cast<double>(dx)) *
                                        std::sqrt(static_cast<double>(dy));
    return static_cast<double>(c.num) / denom;
}

// Strict inversions y[i] > y[j], i < j.  Bottom-up merge; equal keys are
// taken from the left run so they never count.
std::int64_t count_inversions(std::vector<double>& y) {
    const std::size_t m = y.size();
    std::vector<double> buf(m);
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < m; width *= 2) {
        for (std::size_t lo = 0; lo + width < m; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, m);
            std::size_t a = lo, b = mid, out = lo;
            while (a < mid && b < hi) {
                if (y[b] < y[a]) {
                    swaps += static_cast<std::int64_t>(mid - a);
                    buf[out++] = y[b++];
                } else {
                    buf[out++] = y[a++];
                }
            }
            while (a < mid) buf[out++] = y[a++];
            while (b < hi) buf[out++] = y[b++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      y.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return swaps;
}

std::int64_t tied_pairs_in_runs(const std::vector<double>& v) {
    std::int64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::int64_t run = static_cast<std::int64_t>(j - i);
        total += run * (run - 1) / 2;
        i = j;
    }
    return total;
}

}  // namespace

double empirical_kendall_tau_brute(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    check_input(x, y);
    const std::size_t m = x.size();
    PairCounts c;
    c.n0 = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(m - 1) / 2;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool ex = x[i] == x[j];
            const bool ey = y[i] == y[j];
            if (ex) ++c.tied_x;
            if (ey) ++c.tied_y;
            if (!ex && !ey) {
                const bool up_x = x[i] < x[j];
                const bool up_y = y[i] < y[j];
                c.num += (up_x == up_y) ? 1 : -1;
            }
        }
    }
    return finish(c);
}

double empirical_kendall_tau(const std::vector<double>& x,
                             const std::vector<double>& y) {
    check_input(x, y);
    const std::size_t m = x.size();

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    PairCounts c;
    c.n0 = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(m - 1) / 2;

    // x-runs in sort order; joint ties are runs of equal (x, y).
    std::int64_t joint = 0;
    {
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i + 1;
            while (j < m && x[order[j]] == x[order[i]]) ++j;
            const std::int64_t run = static_cast<std::int64_t>(j - i);
            c.tied_x += run * (run - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a + 1;
                while (b < j && y[order[b]] == y[order[a]]) ++b;
                const std::int64_t jr = static_cast<std::int64_t>(b - a);
                joint += jr * (jr - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> ys(m);
    for (std::size_t i = 0; i < m; ++i) ys[i] = y[order[i]];
    const std::int64_t swaps = count_inversions(ys);
    // ys is now sorted; reuse it for the y-tie count.
    c.tied_y = tied_pairs_in_runs(ys);

    c.num = c.n0 - c.tied_x - c.tied_y + joint - 2 * swaps;
    return finish(c);
}

}  // namespace ccm
