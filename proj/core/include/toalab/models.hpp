#pragma once

#include <cstdint>
#include <random>

#include "toalab/hilbert.hpp"

namespace toalab::models {

// Deterministic uniform doubles in [0, 1) from a 64-bit Mersenne twister; stable across platforms.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * next() - 1.0; }

private:
    std::mt19937_64 engine_;
};

ComplexMatrix random_hermitian(Eigen::Index dim, UniformSource& rng);

// Two levels: |0> pre-transition, |1> event. H = eps sigma_z + g sigma_x, P = P_1 = |1><1|.
TransitionSystem two_level(double eps, double g);

struct RandomPerturbativeParams {
    Eigen::Index dim = 4;
    Eigen::Index event_dim = 2;  // trailing basis states span range(P); one outcome per state
    double epsilon = 1e-2;
    std::uint64_t seed = 20240611;
};

// H0 block diagonal in the P/Q split, H_I = epsilon (X + X^dagger) with X mapping Q to P.
// rho0 is a random pure state in range(Q).
TransitionSystem random_perturbative(const RandomPerturbativeParams& params);

struct DephasingBandParams {
    Eigen::Index band_levels = 101;
    double bandwidth = 1.0;      // B; coupling weights ~ exp(-E^2 / (4 B^2)), dephasing time 1/B
    double band_extent = 5.0;    // band energies uniform in [-extent B, extent B]
    double coupling = 0.05;      // root-sum-square coupling of |0> to the band
    double level_energy = 0.0;
};

// |0> coupled to a band of event levels; the correlation function decays as exp(-B^2 tau^2 / 2).
TransitionSystem dephasing_band(const DephasingBandParams& params);
inline double dephasing_time(const DephasingBandParams& params) { return 1.0 / params.bandwidth; }

}  // namespace toalab::models
