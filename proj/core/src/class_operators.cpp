#include <cmath>
#include <numbers>
#include <string>

#include "toalab/error.hpp"
#include "toalab/hilbert.hpp"
#include "toalab/parallel.hpp"
#include "toalab/quadrature.hpp"

namespace toalab {

namespace {

void check_time(double t) {
    if (!std::isfinite(t)) throw ValidationError("time must be finite");
}

void check_steps(std::size_t steps) {
    if (steps < 1) throw ValidationError("Trotter steps must be >= 1");
}

// (B^dagger e^{-iHt/N} B)^N in the basis of range(Q).
ComplexMatrix restricted_in_q(const TransitionSystem& sys, double t, std::size_t steps) {
    const ComplexMatrix& w = sys.q_in_eigenbasis();
    // Every step is the identity on range(Q); skip the round-off of N products.
    if (t == 0.0) return ComplexMatrix::Identity(w.cols(), w.cols());
    const RealVector& e = sys.spectrum().eigenvalues();
    const double dt = t / static_cast<double>(steps);
    ComplexMatrix scaled = w;
    for (Eigen::Index k = 0; k < e.size(); ++k) scaled.row(k) *= std::polar(1.0, -e[k] * dt);
    const ComplexMatrix step = w.adjoint() * scaled;
    return matrix_power(step, steps);
}

// S_t X, evaluated in the Q basis.
ComplexMatrix apply_restricted(const TransitionSystem& sys, double t, std::size_t steps, const ComplexMatrix& x) {
    const ComplexMatrix& b = sys.q_basis();
    if (b.cols() == 0) return ComplexMatrix::Zero(x.rows(), x.cols());
    return b * (restricted_in_q(sys, t, steps) * (b.adjoint() * x));
}

ComplexMatrix class_operator_on(const TransitionSystem& sys, std::string_view label, double t, std::size_t steps,
                                const ComplexMatrix& x) {
    const ComplexMatrix inner = sys.sqrt_outcome(label) * (sys.hamiltonian() * apply_restricted(sys, t, steps, x));
    return sys.spectrum().evolve(-t, inner);
}

std::vector<ComplexMatrix> amplitudes_at(const TransitionSystem& sys, std::string_view label,
                                         const std::vector<double>& times, std::size_t steps) {
    std::vector<ComplexMatrix> out(times.size());
    parallel_for(times.size(), [&](std::size_t k) { out[k] = class_amplitude(sys, label, times[k], steps); });
    return out;
}

ComplexMatrix weighted_amplitude(const TransitionSystem& sys, std::string_view label, const QuadratureRule& rule,
                                 std::size_t steps) {
    const auto amps = amplitudes_at(sys, label, rule.nodes, steps);
    ComplexMatrix acc = ComplexMatrix::Zero(sys.dim(), sys.rho_factor().cols());
    for (std::size_t k = 0; k < amps.size(); ++k) acc += rule.weights[k] * amps[k];
    return acc;
}

cplx trace_pair(const ComplexMatrix& a, const ComplexMatrix& b) {
    // Tr[A B^dagger] for amplitude factors A = C R, B = C' R.
    return (a.array() * b.array().conjugate()).sum();
}

}  // namespace

RestrictedPropagator restricted_propagator(const TransitionSystem& system, double t, std::size_t steps) {
    check_time(t);
    check_steps(steps);
    const ComplexMatrix& b = system.q_basis();
    RestrictedPropagator out;
    out.steps = steps;
    if (b.cols() == 0) {
        out.value = ComplexMatrix::Zero(system.dim(), system.dim());
        return out;
    }
    if (t == 0.0) {
        out.value = system.projector_q();
        return out;
    }
    out.value = b * restricted_in_q(system, t, steps) * b.adjoint();
    const ComplexMatrix refined = b * restricted_in_q(system, t, 2 * steps) * b.adjoint();
    out.convergence_estimate = max_abs(out.value - refined);
    return out;
}

ComplexMatrix class_operator_exact(const TransitionSystem& system, std::string_view label, double t,
                                   std::size_t steps) {
    check_time(t);
    check_steps(steps);
    const Eigen::Index d = system.dim();
    return class_operator_on(system, label, t, steps, ComplexMatrix::Identity(d, d));
}

ComplexMatrix class_operator_perturbative(const TransitionSystem& system, std::string_view label, double t) {
    check_time(t);
    const auto& split = system.split();
    const auto& free = system.free_spectrum();
    const ComplexMatrix inner = system.sqrt_outcome(label) * split.interaction * free.unitary(t);
    return free.evolve(-t, inner);
}

ComplexMatrix class_amplitude(const TransitionSystem& system, std::string_view label, double t, std::size_t steps) {
    check_time(t);
    check_steps(steps);
    return class_operator_on(system, label, t, steps, system.rho_factor());
}

double detection_probability_interval(const TransitionSystem& system, std::string_view label, double t1,
                                      double t2, std::size_t steps, std::size_t quadrature_points) {
    if (quadrature_points < 2) throw ValidationError("quadrature_points must be >= 2");
    if (!(t1 < t2)) throw ValidationError("detection interval requires t1 < t2");
    system.outcome(label);
    const ComplexMatrix a = weighted_amplitude(system, label, simpson(t1, t2, quadrature_points), steps);
    return a.squaredNorm();
}

double consistency_offdiagonal(const TransitionSystem& system, std::string_view label, double t1, double t2,
                               double t3, std::size_t steps, std::size_t quadrature_points) {
    if (quadrature_points < 2) throw ValidationError("quadrature_points must be >= 2");
    if (!(t1 <= t2 && t2 <= t3)) throw ValidationError("consistency check requires t1 <= t2 <= t3");
    system.outcome(label);
    if (t1 == t2 || t2 == t3) return 0.0;
    const QuadratureRule first = simpson(t1, t2, quadrature_points);
    const QuadratureRule second = simpson(t2, t3, quadrature_points);
    const auto a = amplitudes_at(system, label, first.nodes, steps);
    const auto b = amplitudes_at(system, label, second.nodes, steps);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            acc += first.weights[i] * second.weights[j] * trace_pair(a[i], b[j]);
        }
    }
    return 2.0 * acc.real();
}

SmearingKernel::SmearingKernel(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("smearing sigma must be > 0");
}

double SmearingKernel::operator()(double s) const {
    return std::exp(-s * s / (2.0 * sigma_ * sigma_)) / (std::sqrt(2.0 * std::numbers::pi) * sigma_);
}

double SmearingKernel::g(double tau) const {
    return std::exp(-tau * tau / (8.0 * sigma_ * sigma_));
}

ComplexMatrix smeared_povm_element(const TransitionSystem& system, std::string_view label, double t,
                                   const SmearingKernel& kernel, std::size_t steps, std::size_t quadrature_points) {
    check_time(t);
    if (quadrature_points < 2) throw ValidationError("quadrature_points must be >= 2");
    system.outcome(label);
    const Eigen::Index d = system.dim();
    const double lower = std::max(0.0, t - kernel.support_radius());
    const double upper = t + kernel.support_radius();
    if (upper <= 0.0) return ComplexMatrix::Zero(d, d);
    const double h = (upper - lower) / static_cast<double>(quadrature_points - 1);
    if (h > kernel.sigma()) {
        throw ValidationError("smearing sigma is smaller than the quadrature step; increase quadrature_points");
    }
    const QuadratureRule rule = simpson(lower, upper, quadrature_points);
    std::vector<ComplexMatrix> ops(rule.size());
    parallel_for(rule.size(), [&](std::size_t k) {
        ops[k] = class_operator_exact(system, label, rule.nodes[k], steps);
    });
    ComplexMatrix b = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        b += (rule.weights[k] * std::sqrt(kernel(rule.nodes[k] - t))) * ops[k];
    }
    return b.adjoint() * b;
}

ComplexMatrix no_detection_element(const TransitionSystem& system, double horizon, const SmearingKernel& kernel,
                                   std::size_t steps, std::size_t quadrature_points, std::size_t time_points) {
    if (!(horizon > 0.0)) throw ValidationError("no-detection horizon must be > 0");
    const Eigen::Index d = system.dim();
    const QuadratureRule rule = simpson(0.0, horizon, time_points);
    ComplexMatrix acc = ComplexMatrix::Identity(d, d);
    for (const auto& o : system.outcomes()) {
        for (std::size_t k = 0; k < rule.size(); ++k) {
            acc -= rule.weights[k] *
                   smeared_povm_element(system, o.label, rule.nodes[k], kernel, steps, quadrature_points);
        }
    }
    return acc;
}

TransitionDensity transition_density(const TransitionSystem& system, std::string_view label, double t,
                                     const std::optional<SmearingKernel>& kernel, std::size_t steps,
                                     std::size_t quadrature_points, std::optional<double> window) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("transition density requires finite t >= 0");
    if (quadrature_points < 2) throw ValidationError("quadrature_points must be >= 2");
    system.outcome(label);
    double radius = 0.0;
    if (kernel) {
        radius = kernel->tau_radius();
    } else {
        if (!window) throw ValidationError("tau truncation window must be set when no smearing kernel is given");
        if (!(*window > 0.0)) throw ValidationError("tau truncation window must be > 0");
        radius = *window;
    }
    // Amplitudes vanish before preparation, so t +- tau/2 >= 0.
    const double tau_max = std::min(radius, 2.0 * t);
    TransitionDensity out;
    if (tau_max <= 0.0) return out;
    const QuadratureRule rule = simpson(-tau_max, tau_max, quadrature_points);
    std::vector<cplx> terms(rule.size());
    parallel_for(rule.size(), [&](std::size_t k) {
        const double tau = rule.nodes[k];
        const ComplexMatrix plus = class_amplitude(system, label, t + 0.5 * tau, steps);
        const ComplexMatrix minus = class_amplitude(system, label, t - 0.5 * tau, steps);
        const double g = kernel ? kernel->g(tau) : 1.0;
        terms[k] = rule.weights[k] * g * trace_pair(plus, minus);
    });
    cplx acc = 0.0;
    for (const auto& v : terms) acc += v;
    out.value = acc.real();
    out.imag = acc.imag();
    return out;
}

}  // namespace toalab
