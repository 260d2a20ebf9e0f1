#pragma once

#include <cstddef>
#include <vector>

#include "toalab/detectors.hpp"
#include "toalab/dispersion.hpp"
#include "toalab/wavepacket.hpp"

namespace toalab {

class TimeGrid {
public:
    TimeGrid(double t_min, double t_max, std::size_t n_points);

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    std::size_t size() const { return n_; }
    double spacing() const { return (t_max_ - t_min_) / static_cast<double>(n_ - 1); }
    double node(std::size_t k) const { return k + 1 == n_ ? t_max_ : t_min_ + spacing() * static_cast<double>(k); }
    std::vector<double> nodes() const;

    bool operator==(const TimeGrid& other) const = default;

private:
    double t_min_, t_max_;
    std::size_t n_;
};

// point: values are samples of the density at the nodes.
// cell_average: values are averages over [t_k - dt/2, t_k + dt/2].
enum class Sampling { point, cell_average };

struct DensityDiagnostics {
    double min_value = 0.0;
    double max_value = 0.0;
    double max_abs_imag = 0.0;
    double lost_mass = 0.0;
    // true when min_value < -1e-8 * max_value
    bool negative_excursion = false;
};

struct ToADensity {
    TimeGrid grid;
    std::vector<double> values;
    double L = 0.0;
    double normalization = 0.0;
    bool conditioned = false;
    Sampling sampling = Sampling::point;
    DensityDiagnostics diagnostics;
};

// Builds a density and fills normalization and min/max diagnostics.
ToADensity make_density(const TimeGrid& grid, std::vector<double> values, double L, Sampling sampling = Sampling::point);

// (1/2pi)^2 dp^2 sum psi~*(p') <p'|S(L)|p> psi~(p) e^{-i(eps_p - eps_p') t}
ToADensity toa_density_kernel(const WavePacket& state, const DetectorModel& model, const Dispersion& d,
                              const TimeGrid& grid);

// |(1/2pi) int dp sqrt(alpha |v|) psi~ e^{ipL - i eps t}|^2
ToADensity toa_density_absorption(const WavePacket& state, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                  double L, const TimeGrid& grid);
ToADensity toa_density_absorption(const MixedState& state, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                  double L, const TimeGrid& grid);

// Generalized Kijowski density, sqrt|v_p| weighting.
ToADensity kijowski_density(const WavePacket& state, const Dispersion& d, double L, const TimeGrid& grid);

// Signed probability current at x = L for free nonrelativistic evolution with mass m.
ToADensity probability_current(const WavePacket& state, double mass, double L, const TimeGrid& grid);

enum class Deposition {
    overlap,  // split each cell's mass over the time cells its arrival-time interval overlaps
    nearest,  // whole cell mass into the time cell containing the arrival time of the cell center
};

// Classical transport of alpha W0 to x = L; cell-averaged on the time grid.
ToADensity classical_toa(const WignerField& w0, const AbsorptionCoefficient& alpha, const Dispersion& d, double L,
                         const TimeGrid& grid, Deposition deposition = Deposition::overlap);

// c(p) = [v^2 (alpha alpha'' - alpha'^2) + alpha^2 (v v'' - v'^2)] / (8 alpha v^4)
double semiclassical_coefficient(const AbsorptionCoefficient& alpha, const Dispersion& d, double p);

struct SemiclassicalResult {
    ToADensity classical;
    ToADensity correction;  // -d^2/dt^2 of the transported c(p) W0 density
    ToADensity corrected;
};

SemiclassicalResult semiclassical_expansion(const WignerField& w0, const AbsorptionCoefficient& alpha,
                                            const Dispersion& d, double L, const TimeGrid& grid,
                                            Deposition deposition = Deposition::overlap);

// Classical density plus first quantum correction.
ToADensity semiclassical_correction(const WignerField& w0, const AbsorptionCoefficient& alpha, const Dispersion& d,
                                    double L, const TimeGrid& grid, Deposition deposition = Deposition::overlap);

// Quadrature integral; throws ValidationError when a boundary value exceeds 1e-8 of the peak.
double time_integrated(const ToADensity& density);
double integrate_density(const ToADensity& density);

// (1/2pi) int dp <p|S(L)|p> |psi~(p)|^2 / |v_p|
double analytic_time_integrated(const WavePacket& state, const DetectorModel& model, const Dispersion& d);

ToADensity condition(const ToADensity& density);

// Fine grid over [t_min - dt/2, t_max + dt/2] with 2r sub-intervals per cell.
TimeGrid cell_refinement(const TimeGrid& coarse, std::size_t r);
// Simpson average of a point-sampled density on cell_refinement(coarse, r) over each coarse cell.
ToADensity average_cells(const ToADensity& fine, const TimeGrid& coarse, std::size_t r);

struct ComparisonReport {
    double tv_distance = 0.0;
    double max_abs_difference = 0.0;
    double argmax_shift = 0.0;  // argmax(b) - argmax(a)
};

// Metrics on conditioned densities sharing a grid.
ComparisonReport compare(const ToADensity& a, const ToADensity& b);

std::size_t argmax(const ToADensity& density);

}  // namespace toalab
