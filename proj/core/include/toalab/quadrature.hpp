#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace toalab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Composite Simpson on n equally spaced points over [a, b]. Even n finishes with the 3/8 rule;
// n = 2 is the trapezoid rule.
QuadratureRule simpson(double a, double b, std::size_t n);

// Weights only, for uniformly sampled data with spacing h.
std::vector<double> simpson_weights(std::size_t n, double h);

double integrate_uniform(std::span<const double> values, double h);

// 16-point Gauss-Legendre on each panel between consecutive breakpoints, panels subdivided so
// that none is longer than max_panel.
QuadratureRule gauss_legendre_panels(std::span<const double> breakpoints, double max_panel);

}  // namespace toalab
