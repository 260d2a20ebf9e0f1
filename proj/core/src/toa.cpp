#include "toalab/toa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "toalab/error.hpp"
#include "toalab/linalg.hpp"
#include "toalab/parallel.hpp"
#include "toalab/quadrature.hpp"

namespace toalab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::size_t> support_of(const WavePacket& state) {
    double peak = 0.0;
    for (const auto& a : state.amplitudes()) peak = std::max(peak, std::norm(a));
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (std::norm(state[k]) > 1e-30 * peak) idx.push_back(k);
    }
    return idx;
}

void require_positive_support(const WavePacket& state, const char* op) {
    if (!state.has_positive_support()) {
        throw ValidationError(std::string(op) + " requires positive-momentum support (norm at p <= 0 below 1e-8)");
    }
}

std::vector<double> rule_weights(const ToADensity& density) {
    const double h = density.grid.spacing();
    if (density.sampling == Sampling::cell_average) return std::vector<double>(density.values.size(), h);
    return simpson_weights(density.values.size(), h);
}

}  // namespace

TimeGrid::TimeGrid(double t_min, double t_max, std::size_t n_points) : t_min_(t_min), t_max_(t_max), n_(n_points) {
    if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_min < t_max)) {
        throw ValidationError("time grid requires t_min < t_max");
    }
    if (n_points < 2) throw ValidationError("time grid needs at least 2 points");
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = node(k);
    return out;
}

ToADensity make_density(const TimeGrid& grid, std::vector<double> values, double L, Sampling sampling) {
    if (values.size() != grid.size()) throw ValidationError("density values do not match time grid");
    ToADensity d{grid, std::move(values), L, 0.0, false, sampling, {}};
    d.normalization = integrate_density(d);
    d.diagnostics.min_value = *std::min_element(d.values.begin(), d.values.end());
    d.diagnostics.max_value = *std::max_element(d.values.begin(), d.values.end());
    d.diagnostics.negative_excursion = d.diagnostics.min_value < -1e-8 * std::abs(d.diagnostics.max_value);
    return d;
}

ToADensity toa_density_kernel(const WavePacket& state, const DetectorModel& model, const Dispersion& d,
                              const TimeGrid& grid) {
    model.validate();
    const auto& g = state.grid();
    std::vector<std::size_t> idx;
    double excluded = 0.0, total = 0.0;
    for (std::size_t k : support_of(state)) {
        const double w = std::norm(state[k]);
        total += w;
        if (std::abs(g.node(k)) < model.singular_exclusion) {
            excluded += w;
            continue;
        }
        idx.push_back(k);
    }
    if (excluded > 1e-8 * total) {
        throw NumericalError("toa", "toa_density_kernel", "kernel singularities inside state support (norm fraction " +
                                                              std::to_string(excluded / total) + " near p = 0)");
    }
    const std::size_t n = idx.size();
    std::vector<double> p(n), eps(n);
    std::vector<cplx> psi(n);
    for (std::size_t a = 0; a < n; ++a) {
        p[a] = g.node(idx[a]);
        eps[a] = d.energy(p[a]);
        psi[a] = state[idx[a]];
    }
    // M(r, c) = <p_r|S|p_c>
    ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t c) {
        for (std::size_t r = 0; r < n; ++r) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = kernel(model, p[c], p[r], d);
        }
    });
    const double scale = std::pow(g.spacing() / kTwoPi, 2);
    std::vector<double> values(grid.size());
    std::vector<double> imag(grid.size());
    parallel_for(grid.size(), [&](std::size_t it) {
        const double t = grid.node(it);
        ComplexVector a(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) a[static_cast<Eigen::Index>(k)] = psi[k] * std::polar(1.0, -eps[k] * t);
        const cplx v = a.dot(m * a) * scale;
        values[it] = v.real();
        imag[it] = std::abs(v.imag());
    });
    ToADensity out = make_density(grid, std::move(values), model.L);
    out.diagnostics.max_abs_imag = *std::max_element(imag.begin(), imag.end());
    return out;
}

ToADensity toa_density_absorption(const WavePacket& state, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                  double L, const TimeGrid& grid) {
    require_positive_support(state, "toa_density_absorption");
    const auto& g = state.grid();
    std::vector<cplx> b;
    std::vector<double> eps;
    for (std::size_t k : support_of(state)) {
        const double p = g.node(k);
        if (p <= 0.0) continue;
        const double a = alpha(p);
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw NumericalError("toa", "toa_density_absorption", "alpha undefined or negative at p = " + std::to_string(p));
        }
        b.push_back(std::sqrt(a * std::abs(d.velocity(p))) * state[k] * std::polar(1.0, p * L));
        eps.push_back(d.energy(p));
    }
    const double scale = g.spacing() / kTwoPi;
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t it) {
        const double t = grid.node(it);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) acc += b[k] * std::polar(1.0, -eps[k] * t);
        values[it] = std::norm(acc * scale);
    });
    return make_density(grid, std::move(values), L);
}

ToADensity toa_density_absorption(const MixedState& state, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                  double L, const TimeGrid& grid) {
    std::vector<double> values(grid.size(), 0.0);
    for (const auto& [w, packet] : state.components()) {
        const ToADensity part = toa_density_absorption(packet, alpha, d, L, grid);
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += w * part.values[k];
    }
    return make_density(grid, std::move(values), L);
}

ToADensity kijowski_density(const WavePacket& state, const Dispersion& d, double L, const TimeGrid& grid) {
    require_positive_support(state, "kijowski_density");
    const auto& g = state.grid();
    const double dp = g.spacing();
    std::vector<double> momenta, root_v;
    std::vector<cplx> spatial;
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double p = g.node(k);
        if (p <= 0.0 || state[k] == cplx(0.0)) continue;
        momenta.push_back(p);
        root_v.push_back(std::sqrt(std::abs(d.velocity(p))));
        spatial.push_back(state[k] * std::polar(1.0, p * L));
    }
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t it) {
        const double t = grid.node(it);
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < momenta.size(); ++k) {
            const cplx term = root_v[k] * spatial[k] * std::polar(1.0, -d.energy(momenta[k]) * t);
            re += term.real();
            im += term.imag();
        }
        re *= dp / kTwoPi;
        im *= dp / kTwoPi;
        values[it] = re * re + im * im;
    });
    return make_density(grid, std::move(values), L);
}

ToADensity probability_current(const WavePacket& state, double mass, double L, const TimeGrid& grid) {
    const Dispersion d = Dispersion::nonrelativistic(mass);
    const auto& g = state.grid();
    const double scale = g.spacing() / kTwoPi;
    std::vector<double> p, eps;
    std::vector<cplx> a;
    for (std::size_t k : support_of(state)) {
        p.push_back(g.node(k));
        eps.push_back(d.energy(g.node(k)));
        a.push_back(state[k] * std::polar(1.0, g.node(k) * L));
    }
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t it) {
        const double t = grid.node(it);
        cplx psi = 0.0, dpsi = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const cplx term = a[k] * std::polar(1.0, -eps[k] * t);
            psi += term;
            dpsi += p[k] * term;
        }
        values[it] = (std::conj(psi * scale) * dpsi * scale).real() / mass;
    });
    return make_density(grid, std::move(values), L);
}

double integrate_density(const ToADensity& density) {
    const auto w = rule_weights(density);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * density.values[k];
    return acc;
}

double time_integrated(const ToADensity& density) {
    double peak = 0.0;
    for (double v : density.values) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(density.values.front()), std::abs(density.values.back()));
    if (edge > 1e-8 * peak) {
        throw ValidationError("time window too narrow: boundary value " + std::to_string(edge) +
                              " exceeds 1e-8 of the peak " + std::to_string(peak));
    }
    return integrate_density(density);
}

double analytic_time_integrated(const WavePacket& state, const DetectorModel& model, const Dispersion& d) {
    const auto& g = state.grid();
    double acc = 0.0;
    for (std::size_t k : support_of(state)) {
        const double p = g.node(k);
        if (std::abs(p) < model.singular_exclusion) continue;
        const double v = std::abs(d.velocity(p));
        if (!(v > 0.0)) throw NumericalError("toa", "analytic_time_integrated", "zero velocity at p = " + std::to_string(p));
        acc += kernel(model, p, p, d).real() * std::norm(state[k]) / v;
    }
    return acc * g.spacing() / kTwoPi;
}

ToADensity condition(const ToADensity& density) {
    if (!(density.normalization > 0.0)) {
        throw NumericalError("toa", "condition", "density has non-positive total probability");
    }
    ToADensity out = density;
    for (auto& v : out.values) v /= density.normalization;
    out.normalization = 1.0;
    out.conditioned = true;
    out.diagnostics.min_value /= density.normalization;
    out.diagnostics.max_value /= density.normalization;
    return out;
}

TimeGrid cell_refinement(const TimeGrid& coarse, std::size_t r) {
    if (r < 1) throw ValidationError("cell refinement factor must be >= 1");
    const double h = coarse.spacing();
    return TimeGrid(coarse.t_min() - 0.5 * h, coarse.t_max() + 0.5 * h, 2 * r * coarse.size() + 1);
}

ToADensity average_cells(const ToADensity& fine, const TimeGrid& coarse, std::size_t r) {
    if (!(fine.grid == cell_refinement(coarse, r))) throw ValidationError("fine grid is not the cell refinement of the coarse grid");
    const std::size_t sub = 2 * r;
    const auto w = simpson_weights(sub + 1, fine.grid.spacing());
    std::vector<double> values(coarse.size(), 0.0);
    for (std::size_t n = 0; n < coarse.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= sub; ++j) acc += w[j] * fine.values[n * sub + j];
        values[n] = acc / coarse.spacing();
    }
    ToADensity out = make_density(coarse, std::move(values), fine.L, Sampling::cell_average);
    out.diagnostics.max_abs_imag = fine.diagnostics.max_abs_imag;
    return out;
}

std::size_t argmax(const ToADensity& density) {
    return static_cast<std::size_t>(std::max_element(density.values.begin(), density.values.end()) -
                                    density.values.begin());
}

ComparisonReport compare(const ToADensity& a, const ToADensity& b) {
    if (!(a.grid == b.grid)) throw ValidationError("compared densities must share a time grid");
    if (a.sampling != b.sampling) throw ValidationError("compared densities must share a sampling convention");
    ComparisonReport r;
    const ToADensity ca = condition(a);
    const ToADensity cb = condition(b);
    const auto w = rule_weights(ca);
    double tv = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        tv += w[k] * std::abs(ca.values[k] - cb.values[k]);
        r.max_abs_difference = std::max(r.max_abs_difference, std::abs(a.values[k] - b.values[k]));
    }
    r.tv_distance = 0.5 * tv;
    r.argmax_shift = b.grid.node(argmax(b)) - a.grid.node(argmax(a));
    return r;
}

}  // namespace toalab
