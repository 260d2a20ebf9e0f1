#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "toalab/dispersion.hpp"
#include "toalab/tolerances.hpp"

namespace toalab {

using cplx = std::complex<double>;

// Nodes p_k = p_min + k dp, k = 0..n-1, dp = (p_max - p_min) / n.
class MomentumGrid {
public:
    MomentumGrid(double p_min, double p_max, std::size_t n_points);

    double p_min() const { return p_min_; }
    double p_max() const { return p_max_; }
    std::size_t size() const { return n_; }
    double spacing() const { return (p_max_ - p_min_) / static_cast<double>(n_); }
    double node(std::size_t k) const { return p_min_ + spacing() * static_cast<double>(k); }
    double position_spacing() const;
    double position_span() const;
    // Index of the node equal to p (within 1e-9 dp), or throws.
    std::size_t index_of(double p) const;

    bool operator==(const MomentumGrid& other) const = default;

private:
    double p_min_, p_max_;
    std::size_t n_;
};

class WavePacket {
public:
    // Normalizes so that (1/2pi) sum |psi|^2 dp = 1.
    WavePacket(MomentumGrid grid, std::vector<cplx> amplitudes);

    const MomentumGrid& grid() const { return grid_; }
    const std::vector<cplx>& amplitudes() const { return amp_; }
    cplx operator[](std::size_t k) const { return amp_[k]; }
    std::size_t size() const { return amp_.size(); }

    double norm() const;
    double mean_momentum() const;
    double momentum_variance() const;
    // Norm fraction carried by nodes with p <= 0.
    double nonpositive_fraction() const;
    bool has_positive_support(double tol = 1e-8) const { return nonpositive_fraction() < tol; }

    // psi(x, t) = int dp/2pi psi~(p) e^{ipx - i eps_p t}, by direct summation.
    cplx position_amplitude(double x, double t, const Dispersion& d) const;
    cplx position_amplitude(double x) const;

    static WavePacket unnormalized(MomentumGrid grid, std::vector<cplx> amplitudes);

private:
    struct RawTag {};
    WavePacket(MomentumGrid grid, std::vector<cplx> amplitudes, RawTag);

    MomentumGrid grid_;
    std::vector<cplx> amp_;
};

// psi~(p) ~ exp[-(p - p0)^2 / (4 dp^2) - i p x0]
WavePacket gaussian_packet(const MomentumGrid& grid, double p0, double dp, double x0 = 0.0);

// Normalized coherent sum of packets on a common grid.
WavePacket superpose(std::span<const std::pair<cplx, WavePacket>> terms);

WavePacket evolve(const WavePacket& state, const Dispersion& d, double t);

cplx inner_product(const WavePacket& a, const WavePacket& b);

// Position-space samples x_j = x_center + (j - n/2) dx, dx = 2pi / (n dp).
struct PositionWaveFunction {
    MomentumGrid grid;
    double x_center = 0.0;
    std::vector<cplx> values;

    double spacing() const { return grid.position_spacing(); }
    double x(std::size_t j) const {
        return x_center + (static_cast<double>(j) - static_cast<double>(values.size() / 2)) * spacing();
    }
};

PositionWaveFunction to_position(const WavePacket& state, double x_center = 0.0);
// Inverse transform; no renormalization is applied.
WavePacket from_position(const PositionWaveFunction& psi);
double position_mean(const WavePacket& state, double x_center = 0.0);

class MixedState {
public:
    MixedState(std::vector<std::pair<double, WavePacket>> components, const Tolerances& tol = {});
    const std::vector<std::pair<double, WavePacket>>& components() const { return components_; }

private:
    std::vector<std::pair<double, WavePacket>> components_;
};

// W0 on a rectangular phase-space grid; values[ip * x.size() + ix].
struct WignerField {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> values;
    double max_imag = 0.0;

    double at(std::size_t ip, std::size_t ix) const { return values[ip * x.size() + ix]; }
};

// W0(x, p) = int dxi/2pi e^{i x xi} psi~(p + xi/2) psi~*(p - xi/2); measure dx dp / 2pi.
// p nodes must be grid nodes; |x| must be below pi / (2 dp).
WignerField wigner(const WavePacket& state, std::span<const double> x_nodes, std::span<const double> p_nodes);

std::vector<double> uniform_nodes(double lo, double hi, std::size_t n);

}  // namespace toalab
