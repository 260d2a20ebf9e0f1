#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toalab/linalg.hpp"
#include "toalab/tolerances.hpp"

namespace toalab {

// Where rho0 is required to live. pre_transition projects it onto range(Q).
enum class InitialSupport { pre_transition, post_event, unconstrained };

struct Outcome {
    std::string label;
    ComplexMatrix op;
};

struct HamiltonianSplit {
    ComplexMatrix free;         // H0, must commute with P
    ComplexMatrix interaction;  // H_I
};

struct TransitionSystemOptions {
    bool exclusive_outcomes = false;
    InitialSupport initial_support = InitialSupport::pre_transition;
    Tolerances tolerances{};
};

class TransitionSystem {
public:
    TransitionSystem(ComplexMatrix hamiltonian, ComplexMatrix projector_p, std::vector<Outcome> outcomes,
                     ComplexMatrix rho0, std::optional<HamiltonianSplit> split = std::nullopt,
                     TransitionSystemOptions options = {});

    Eigen::Index dim() const { return h_.rows(); }
    const ComplexMatrix& hamiltonian() const { return h_; }
    const ComplexMatrix& projector_p() const { return p_; }
    const ComplexMatrix& projector_q() const { return q_; }
    // Initial state after the support convention has been applied.
    const ComplexMatrix& rho0() const { return rho_; }
    const ComplexMatrix& rho0_input() const { return rho_input_; }
    double initial_projection_loss() const { return projection_loss_; }
    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    const ComplexMatrix& outcome(std::string_view label) const;
    const ComplexMatrix& sqrt_outcome(std::string_view label) const;
    bool has_split() const { return split_.has_value(); }
    const HamiltonianSplit& split() const;
    const TransitionSystemOptions& options() const { return options_; }

    const HermitianSpectrum& spectrum() const { return spectrum_; }
    const HermitianSpectrum& free_spectrum() const;
    // Orthonormal columns spanning range(Q), and V^dagger of those columns in the eigenbasis of H.
    const ComplexMatrix& q_basis() const { return q_basis_; }
    const ComplexMatrix& q_in_eigenbasis() const { return q_eig_; }
    // R with R R^dagger = rho0.
    const ComplexMatrix& rho_factor() const { return rho_factor_; }

private:
    std::size_t index_of(std::string_view label) const;

    ComplexMatrix h_, p_, q_, rho_, rho_input_;
    std::vector<Outcome> outcomes_;
    std::vector<ComplexMatrix> sqrt_outcomes_;
    std::optional<HamiltonianSplit> split_;
    TransitionSystemOptions options_;
    HermitianSpectrum spectrum_;
    std::optional<HermitianSpectrum> free_spectrum_;
    ComplexMatrix q_basis_, q_eig_, rho_factor_;
    double projection_loss_ = 0.0;
};

inline constexpr std::size_t kDefaultTrotterSteps = 4096;

struct RestrictedPropagator {
    ComplexMatrix value;
    double convergence_estimate = 0.0;  // max-abs(S(N) - S(2N))
    std::size_t steps = 0;
};

// (Q e^{-iHt/N} Q)^N with N = steps.
RestrictedPropagator restricted_propagator(const TransitionSystem& system, double t,
                                           std::size_t steps = kDefaultTrotterSteps);

// e^{iHt} sqrt(P_lambda) H S_t
ComplexMatrix class_operator_exact(const TransitionSystem& system, std::string_view label, double t,
                                   std::size_t steps = kDefaultTrotterSteps);

// e^{iH0 t} sqrt(P_lambda) H_I e^{-iH0 t}
ComplexMatrix class_operator_perturbative(const TransitionSystem& system, std::string_view label, double t);

// C(lambda, t) R for the factor R of rho0; every trace below is built from these.
ComplexMatrix class_amplitude(const TransitionSystem& system, std::string_view label, double t,
                              std::size_t steps = kDefaultTrotterSteps);

double detection_probability_interval(const TransitionSystem& system, std::string_view label, double t1,
                                      double t2, std::size_t steps, std::size_t quadrature_points);

// 2 Re int_{t1}^{t2} dt int_{t2}^{t3} dt' Tr[C(t) rho0 C^dagger(t')]
double consistency_offdiagonal(const TransitionSystem& system, std::string_view label, double t1, double t2,
                               double t3, std::size_t steps, std::size_t quadrature_points);

class SmearingKernel {
public:
    explicit SmearingKernel(double sigma);
    double sigma() const { return sigma_; }
    // f_sigma(s), unit-normalized Gaussian
    double operator()(double s) const;
    // g_sigma(tau) = exp(-tau^2 / (8 sigma^2))
    double g(double tau) const;
    // Half-width of the truncated s-domain of the POVM element. The integrand carries sqrt(f), whose
    // standard deviation is sqrt(2) sigma, so 6 sigma would leave ~1e-5 of the mass outside.
    double support_radius() const { return 12.0 * sigma_; }
    // Half-width of the truncated tau-domain of the transition density.
    double tau_radius() const { return 12.0 * sigma_; }

private:
    double sigma_;
};

ComplexMatrix smeared_povm_element(const TransitionSystem& system, std::string_view label, double t,
                                   const SmearingKernel& kernel, std::size_t steps, std::size_t quadrature_points);

// 1 - sum_lambda int_0^T dt Pi(lambda, t)
ComplexMatrix no_detection_element(const TransitionSystem& system, double horizon, const SmearingKernel& kernel,
                                   std::size_t steps, std::size_t quadrature_points, std::size_t time_points);

struct TransitionDensity {
    double value = 0.0;
    double imag = 0.0;  // imaginary part of the trace integral before the real part is taken
};

// With a kernel: tau integral weighted by g_sigma. Without: g = 1 over |tau| <= window.
TransitionDensity transition_density(const TransitionSystem& system, std::string_view label, double t,
                                     const std::optional<SmearingKernel>& kernel, std::size_t steps,
                                     std::size_t quadrature_points, std::optional<double> window = std::nullopt);

}  // namespace toalab
