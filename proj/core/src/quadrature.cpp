#include "toalab/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "toalab/error.hpp"

namespace toalab {

std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 2) throw ValidationError("quadrature needs at least 2 points");
    std::vector<double> w(n, 0.0);
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    // Simpson over the leading even number of intervals, 3/8 rule over a trailing 3.
    const std::size_t intervals = n - 1;
    const std::size_t simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t k = 0; k + 2 <= simpson_intervals; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if (simpson_intervals != intervals) {
        const std::size_t k = simpson_intervals;
        w[k] += 3.0 * h / 8.0;
        w[k + 1] += 9.0 * h / 8.0;
        w[k + 2] += 9.0 * h / 8.0;
        w[k + 3] += 3.0 * h / 8.0;
    }
    return w;
}

QuadratureRule simpson(double a, double b, std::size_t n) {
    if (n < 2) throw ValidationError("quadrature needs at least 2 points");
    QuadratureRule rule;
    const double h = (b - a) / static_cast<double>(n - 1);
    rule.weights = simpson_weights(n, h);
    rule.nodes.resize(n);
    for (std::size_t k = 0; k < n; ++k) rule.nodes[k] = a + h * static_cast<double>(k);
    rule.nodes.back() = b;
    return rule;
}

double integrate_uniform(std::span<const double> values, double h) {
    const auto w = simpson_weights(values.size(), h);
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) acc += w[k] * values[k];
    return acc;
}

QuadratureRule gauss_legendre_panels(std::span<const double> breakpoints, double max_panel) {
    using gl = boost::math::quadrature::gauss<double, 16>;
    const auto& abscissa = gl::abscissa();
    const auto& weights = gl::weights();

    QuadratureRule rule;
    for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
        const double lo = breakpoints[b];
        const double hi = breakpoints[b + 1];
        if (!(hi > lo)) continue;
        const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / max_panel)));
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = lo + (static_cast<double>(p) + 0.5) * width;
            const double half = 0.5 * width;
            // Boost stores the non-negative half of the symmetric rule.
            for (std::size_t k = 0; k < abscissa.size(); ++k) {
                if (abscissa[k] == 0.0) {
                    rule.nodes.push_back(mid);
                    rule.weights.push_back(half * weights[k]);
                    continue;
                }
                rule.nodes.push_back(mid - half * abscissa[k]);
                rule.weights.push_back(half * weights[k]);
                rule.nodes.push_back(mid + half * abscissa[k]);
                rule.weights.push_back(half * weights[k]);
            }
        }
    }
    return rule;
}

}  // namespace toalab
