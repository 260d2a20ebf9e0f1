#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toalab/linalg.hpp"
#include "toalab/tolerances.hpp"

namespace toalab {

enum class EnvelopeShape { gaussian, exponential };

std::string to_string(EnvelopeShape shape);

// Real, unit-normalized initial envelope phi0(x) of spread sigma_x.
//   gaussian    (pi sigma^2)^{-1/4} exp(-x^2 / (2 sigma^2))
//   exponential sigma^{-1/2} exp(-|x| / sigma)
class Envelope {
public:
    Envelope(EnvelopeShape shape, double sigma_x);

    EnvelopeShape shape() const { return shape_; }
    double sigma() const { return sigma_; }
    double operator()(double x) const;
    // int phi0(y) e^{i kappa y} dy (both shapes are even, so this is real)
    double transform(double kappa) const;
    // int_y^inf phi0^2 for y >= 0
    double tail_mass(double y) const;
    // |x| beyond which phi0 is below ~1e-16 of its peak scale
    double cutoff() const;
    bool has_kink() const { return shape_ == EnvelopeShape::exponential; }
    // int phi0^2 dx by quadrature
    double norm_squared() const;
    // phi1(x) = int phi0(y) phi0(y - x) dy, the inverse transform of |phi0~|^2, by quadrature
    double phi1(double x) const;

private:
    EnvelopeShape shape_;
    double sigma_;
};

enum class DecoherenceKind { delta, constant, gaussian };

std::string to_string(DecoherenceKind kind);

struct DecoherenceKernel {
    DecoherenceKind kind = DecoherenceKind::delta;
    double tau_dec = 0.0;
    double f0 = 1.0;

    static DecoherenceKernel delta(double f0 = 1.0);
    static DecoherenceKernel constant(double f0 = 1.0);
    static DecoherenceKernel gaussian(double tau_dec, double f0 = 1.0);

    // f(tau); the delta kernel returns its weight f0 at tau = 0 and 0 elsewhere
    double operator()(double tau) const;
    // f^(omega) = int f(tau) e^{i omega tau} d tau for the gaussian kernel
    double spectrum(double omega) const;
};

enum class MeanVelocity { arithmetic, geometric };

class OscillationScenario {
public:
    OscillationScenario(std::vector<double> masses, ComplexMatrix mixing, std::vector<double> momenta,
                        Envelope envelope, double E0, DecoherenceKernel kernel,
                        MeanVelocity mean_velocity = MeanVelocity::arithmetic, const Tolerances& tol = {});

    std::size_t mass_count() const { return masses_.size(); }
    std::size_t flavor_count() const { return static_cast<std::size_t>(mixing_.rows()); }
    const std::vector<double>& masses() const { return masses_; }
    const ComplexMatrix& mixing() const { return mixing_; }
    const std::vector<double>& momenta() const { return momenta_; }
    const Envelope& envelope() const { return envelope_; }
    double E0() const { return E0_; }
    const DecoherenceKernel& kernel() const { return kernel_; }
    MeanVelocity mean_velocity_mode() const { return mean_; }
    const Tolerances& tolerances() const { return tol_; }

    // eps_i = sqrt(p_i^2 + m_i^2) - E0
    double energy(std::size_t i) const;
    double velocity(std::size_t i) const;
    double mean_velocity(std::size_t i, std::size_t j) const;
    // max_ij |p_i - p_j| / min_i |p_i|; << 1 expected
    double momentum_spread() const;

    OscillationScenario with_kernel(DecoherenceKernel kernel) const;

private:
    std::vector<double> masses_;
    ComplexMatrix mixing_;
    std::vector<double> momenta_;
    Envelope envelope_;
    double E0_;
    DecoherenceKernel kernel_;
    MeanVelocity mean_;
    Tolerances tol_;
};

struct OscillationQuadrature {
    // Maximum Gauss-Legendre panel as a fraction of the fastest phase period.
    double period_fraction = 0.5;
    // Maximum panel as a fraction of the envelope duration sigma_x / v.
    double envelope_fraction = 0.25;
};

struct OscillationResult {
    double value = 0.0;
    double imag = 0.0;
    double clipped_mass = 0.0;  // envelope mass placed at s < 0 by the extended limits
};

// P_{beta alpha}(L) with the mixing factor U*_{alpha i} U_{alpha j} U_{beta i} U*_{beta j}.
OscillationResult oscillation_probability(const OscillationScenario& s, std::size_t alpha, std::size_t beta,
                                          double L, const OscillationQuadrature& quad = {});

// P_{beta alpha} for every L, evaluated in parallel.
std::vector<OscillationResult> oscillation_sweep(const OscillationScenario& s, std::size_t alpha, std::size_t beta,
                                                 std::span<const double> L, const OscillationQuadrature& quad = {});

struct StandardWavenumber {
    double general = 0.0;                  // (p_j - p_i) - (eps_j - eps_i) / v
    std::optional<double> equal_momentum;  // (m_i^2 - m_j^2) / (2 p), when p_i = p_j
};

struct NonstandardWavenumber {
    double general = 0.0;                     // (p_j - p_i) - (eps_j / v_j - eps_i / v_i)
    std::optional<double> equal_momentum;     // (m_i^2 - m_j^2)/p - (E0/p)(E_i - E_j)
    std::optional<double> nonrelativistic;    // (m_i - m_j)(2m - E0)/p, m the mean mass
    std::optional<double> ultrarelativistic;  // (m_i^2 - m_j^2)/p (1 - E0/(2p))
};

StandardWavenumber standard_wavenumber(const OscillationScenario& s, std::size_t i, std::size_t j);
NonstandardWavenumber nonstandard_wavenumber(const OscillationScenario& s, std::size_t i, std::size_t j);

// sigma_x v / |v_i - v_j|; nullopt means no suppression (equal velocities).
std::optional<double> localization_length(const OscillationScenario& s, std::size_t i, std::size_t j);

struct WavenumberFit {
    double wavenumber = 0.0;
    double periodogram_wavenumber = 0.0;  // interpolated periodogram peak before refinement
    double periods = 0.0;
    double samples_per_period = 0.0;
    double peak_to_floor = 0.0;
};

// Dominant nonzero wavenumber of uniformly sampled P(L). Requires >= 4 periods at >= 16 samples
// per period; throws NumericalError when no peak stands above the noise floor.
WavenumberFit fit_wavenumber_detailed(std::span<const double> L, std::span<const double> P);
double fit_wavenumber(std::span<const double> L, std::span<const double> P);

}  // namespace toalab
