#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "toalab/dispersion.hpp"
#include "toalab/wavepacket.hpp"

namespace toalab {

enum class CouplingFamily { constant, gaussian, power_law, tabulated };

// u~(p) = |u~(p)| e^{i theta(p)}; the phase is theta0 + theta1 p on top of the family's own sign.
class CouplingFunction {
public:
    static CouplingFunction constant(double amplitude);
    // amplitude * exp(-(p - center)^2 / (2 width^2))
    static CouplingFunction gaussian(double amplitude, double center, double width);
    // amplitude * |p|^exponent
    static CouplingFunction power_law(double amplitude, double exponent);
    // Linear interpolation of complex samples; undefined outside [p.front(), p.back()].
    static CouplingFunction tabulated(std::vector<double> p, std::vector<cplx> values);

    CouplingFunction with_phase(double theta0, double theta1) const;
    CouplingFunction scaled(double factor) const;

    CouplingFamily family() const { return family_; }
    const std::vector<double>& parameters() const { return params_; }
    double phase_offset() const { return theta0_; }
    double phase_slope() const { return theta1_; }

    cplx operator()(double p) const;
    double modulus(double p) const { return std::abs((*this)(p)); }
    double phase(double p) const { return std::arg((*this)(p)); }

private:
    CouplingFunction(CouplingFamily family, std::vector<double> params);

    CouplingFamily family_;
    std::vector<double> params_;
    std::vector<double> table_p_;
    std::vector<cplx> table_v_;
    double theta0_ = 0.0;
    double theta1_ = 0.0;
    double scale_ = 1.0;
};

enum class DensityOfStatesFamily { constant, power_law, step };

// w(E) for the energy-absorption detector.
class DensityOfStates {
public:
    static DensityOfStates constant(double w0);
    // w0 * E^exponent for E > 0
    static DensityOfStates power_law(double w0, double exponent);
    // w0 for E >= threshold, 0 below
    static DensityOfStates step(double w0, double threshold);

    DensityOfStatesFamily family() const { return family_; }
    double w0() const { return w0_; }
    double parameter() const { return param_; }
    // Throws NumericalError where w is undefined or negative.
    double operator()(double energy) const;

private:
    DensityOfStates(DensityOfStatesFamily family, double w0, double param);
    DensityOfStatesFamily family_;
    double w0_;
    double param_;
};

enum class DetectorKind { coherent, decoherent, energy };

std::string to_string(DetectorKind kind);

struct DetectorModel {
    DetectorKind kind = DetectorKind::coherent;
    CouplingFunction coupling = CouplingFunction::constant(1.0);
    double L = 0.0;
    double delta = 1.0;       // spatial localization of the detector excitation
    double mu_star = 1.0;     // effective mass (coherent, decoherent)
    double E0 = 0.0;          // threshold (coherent)
    double diffusion = 1.0;   // D (decoherent)
    std::optional<DensityOfStates> density_of_states;  // energy model
    bool keep_phase = true;   // false replaces u~ by |u~|
    double singular_exclusion = 0.0;  // momenta with |p| < this are outside the model's domain

    static DetectorModel coherent(double mu_star, double E0, double delta, CouplingFunction u, double L);
    static DetectorModel decoherent(double mu_star, double diffusion, double delta, CouplingFunction u, double L);
    static DetectorModel energy(DensityOfStates w, double delta, CouplingFunction u, double L);

    void validate() const;
    // tau_dec = mu*^2 delta^2 / D (decoherent model)
    double decoherence_time() const;
    DetectorModel with_distance(double distance) const;
    DetectorModel with_coupling(CouplingFunction u) const;
};

cplx kernel_coherent(const DetectorModel& model, double p, double p_prime, const Dispersion& d);
cplx kernel_decoherent(const DetectorModel& model, double p, double p_prime);
cplx kernel_energy(const DetectorModel& model, double p, double p_prime, const Dispersion& d);
// <p'|S(L)|p> for the model's kind.
cplx kernel(const DetectorModel& model, double p, double p_prime, const Dispersion& d);

class AbsorptionCoefficient {
public:
    using Fn = std::function<double(double)>;

    AbsorptionCoefficient(Fn value, Fn first = {}, Fn second = {});
    static AbsorptionCoefficient constant(double c);
    // c * p^exponent, for p > 0
    static AbsorptionCoefficient power_law(double c, double exponent);

    double operator()(double p) const;
    double derivative(double p) const;
    double second_derivative(double p) const;
    AbsorptionCoefficient scaled(double factor) const;

private:
    Fn value_, first_, second_;
};

// alpha(p) = <p|S|p> / |v_p|, consistent with the model's kernel.
AbsorptionCoefficient absorption(const DetectorModel& model, const Dispersion& d);

// The models' printed closed forms:
//   coherent   K |u|^2 / (|v| sqrt(eps - E0)),  K = sqrt(pi delta^2 mu* / 2)
//   decoherent mu*^2 |u|^2 / (D |v| p^2)
//   energy     sqrt(2) pi w(eps) |u|^2 / |v|
// For the coherent model the kernel diagonal over |v| equals sqrt(2) exp(-delta^2 p^2) times this.
double absorption_closed_form(const DetectorModel& model, const Dispersion& d, double p);

struct DetectorDiagnostics {
    double coherent_validity = 0.0;   // max eps mu* delta^2 over the state's support; << 1 expected
    double diffusion_ratio = 0.0;     // D / mu*; >> 1 expected for the decoherent model
    double decoherence_time = 0.0;
};

DetectorDiagnostics diagnose(const DetectorModel& model, const WavePacket& state, const Dispersion& d);

}  // namespace toalab
