#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "toalab/error.hpp"
#include "toalab/quadrature.hpp"
#include "toalab/toa.hpp"

namespace toalab {

namespace {

double uniform_step(const std::vector<double>& nodes, const char* what) {
    if (nodes.size() < 2) throw ValidationError(std::string("Wigner field needs >= 2 ") + what + " nodes");
    const double h = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
    if (!(h > 0.0)) throw ValidationError(std::string("Wigner ") + what + " nodes must increase");
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (std::abs(nodes[k] - nodes[k - 1] - h) > 1e-9 * h) {
            throw ValidationError(std::string("Wigner ") + what + " nodes must be uniform");
        }
    }
    return h;
}

struct Deposit {
    std::vector<double> mass;  // per time cell
    double lost = 0.0;
};

// Transports weight(p) W0(x, p) dx dp / 2pi along x + v t = L into the time cells of grid.
template <typename Weight>
Deposit transport(const WignerField& w0, const Dispersion& d, double L, const TimeGrid& grid, Deposition mode,
                  Weight weight) {
    const double dx = uniform_step(w0.x, "x");
    const double dp = uniform_step(w0.p, "p");
    const auto pw = simpson_weights(w0.p.size(), dp);
    const double dt = grid.spacing();
    const double lo = grid.t_min() - 0.5 * dt;
    const std::size_t cells = grid.size();

    Deposit out;
    out.mass.assign(cells, 0.0);
    for (std::size_t ip = 0; ip < w0.p.size(); ++ip) {
        const double p = w0.p[ip];
        bool row_has_mass = false;
        for (std::size_t ix = 0; ix < w0.x.size(); ++ix) {
            if (w0.at(ip, ix) != 0.0) {
                row_has_mass = true;
                break;
            }
        }
        if (!row_has_mass) continue;
        const double factor = weight(p) * pw[ip] * dx / (2.0 * std::numbers::pi);
        const double v = d.velocity(p);
        for (std::size_t ix = 0; ix < w0.x.size(); ++ix) {
            const double m = factor * w0.at(ip, ix);
            if (m == 0.0) continue;
            if (!(v > 0.0)) {
                out.lost += m;
                continue;
            }
            const double x = w0.x[ix];
            if (mode == Deposition::nearest) {
                const double t = (L - x) / v;
                const double f = std::floor((t - lo) / dt);
                if (f < 0.0 || f >= static_cast<double>(cells)) {
                    out.lost += m;
                } else {
                    out.mass[static_cast<std::size_t>(f)] += m;
                }
                continue;
            }
            // Arrival-time interval of the cell [x - dx/2, x + dx/2].
            const double a = (L - x - 0.5 * dx) / v;
            const double b = (L - x + 0.5 * dx) / v;
            const double len = b - a;
            double placed = 0.0;
            const double fa = (a - lo) / dt;
            const double fb = (b - lo) / dt;
            const auto first = static_cast<long long>(std::max(0.0, std::floor(fa)));
            const auto last = static_cast<long long>(std::min(static_cast<double>(cells) - 1.0, std::floor(fb)));
            for (long long n = first; n <= last; ++n) {
                const double c0 = lo + static_cast<double>(n) * dt;
                const double overlap = std::min(b, c0 + dt) - std::max(a, c0);
                if (overlap <= 0.0) continue;
                const double share = m * overlap / len;
                out.mass[static_cast<std::size_t>(n)] += share;
                placed += share;
            }
            out.lost += m - placed;
        }
    }
    return out;
}

ToADensity to_density(const Deposit& dep, const TimeGrid& grid, double L) {
    std::vector<double> values(dep.mass.size());
    for (std::size_t n = 0; n < values.size(); ++n) values[n] = dep.mass[n] / grid.spacing();
    ToADensity out = make_density(grid, std::move(values), L, Sampling::cell_average);
    out.diagnostics.lost_mass = dep.lost;
    return out;
}

double checked_alpha(const AbsorptionCoefficient& alpha, double p) {
    const double a = alpha(p);
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw NumericalError("toa", "classical_toa", "alpha undefined or negative at p = " + std::to_string(p));
    }
    return a;
}

}  // namespace

ToADensity classical_toa(const WignerField& w0, const AbsorptionCoefficient& alpha, const Dispersion& d, double L,
                         const TimeGrid& grid, Deposition deposition) {
    const Deposit dep = transport(w0, d, L, grid, deposition, [&](double p) { return checked_alpha(alpha, p); });
    return to_density(dep, grid, L);
}

double semiclassical_coefficient(const AbsorptionCoefficient& alpha, const Dispersion& d, double p) {
    const double a = alpha(p);
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw NumericalError("toa", "semiclassical_correction", "alpha vanishes at p = " + std::to_string(p));
    }
    const double a1 = alpha.derivative(p);
    const double a2 = alpha.second_derivative(p);
    const double v = d.velocity(p);
    const double v1 = d.velocity_derivative(p);
    const double v2 = d.velocity_second_derivative(p);
    return (v * v * (a * a2 - a1 * a1) + a * a * (v * v2 - v1 * v1)) / (8.0 * a * std::pow(v, 4));
}

SemiclassicalResult semiclassical_expansion(const WignerField& w0, const AbsorptionCoefficient& alpha,
                                            const Dispersion& d, double L, const TimeGrid& grid,
                                            Deposition deposition) {
    ToADensity classical = classical_toa(w0, alpha, d, L, grid, deposition);
    const Deposit field =
        transport(w0, d, L, grid, deposition, [&](double p) { return semiclassical_coefficient(alpha, d, p); });
    const std::size_t n = grid.size();
    const double dt = grid.spacing();
    std::vector<double> dens(n);
    for (std::size_t k = 0; k < n; ++k) dens[k] = field.mass[k] / dt;
    std::vector<double> corr(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double left = k > 0 ? dens[k - 1] : 0.0;
        const double right = k + 1 < n ? dens[k + 1] : 0.0;
        corr[k] = -(right - 2.0 * dens[k] + left) / (dt * dt);
    }
    std::vector<double> total(n);
    for (std::size_t k = 0; k < n; ++k) total[k] = classical.values[k] + corr[k];
    ToADensity correction = make_density(grid, std::move(corr), L, Sampling::cell_average);
    ToADensity corrected = make_density(grid, std::move(total), L, Sampling::cell_average);
    corrected.diagnostics.lost_mass = classical.diagnostics.lost_mass;
    return {std::move(classical), std::move(correction), std::move(corrected)};
}

ToADensity semiclassical_correction(const WignerField& w0, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                    double L, const TimeGrid& grid, Deposition deposition) {
    return semiclassical_expansion(w0, alpha, d, L, grid, deposition).corrected;
}

}  // namespace toalab
