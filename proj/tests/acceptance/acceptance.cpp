// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "toalab/detectors.hpp"
#include "toalab/hilbert.hpp"
#include "toalab/linalg.hpp"
#include "toalab/models.hpp"
#include "toalab/oscillations.hpp"
#include "toalab/toa.hpp"
#include "toalab/wavepacket.hpp"

#ifdef TOALAB_ACCEPTANCE_RUNNER
#include "determinism.hpp"
#endif

using namespace toalab;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [violated]");
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// 1. Kijowski normalization and peak position.
Verdict kijowski_normalization() {
    Verdict out;
    const MomentumGrid grid(2.5, 7.5, 4096);
    const WavePacket psi = gaussian_packet(grid, 5.0, 0.25, 0.0);
    const Dispersion d = Dispersion::nonrelativistic(1.0);
    const TimeGrid times(0.0, 20.0, 201);
    const ToADensity rho = kijowski_density(psi, d, 50.0, times);
    const double total = time_integrated(rho);
    const double t_peak = times.node(argmax(rho));
    out.check(std::abs(total - 1.0) <= 1e-6, fmt("integral - 1 = %.3g", total - 1.0));
    out.check(std::abs(t_peak - 10.0) <= times.spacing(), fmt("argmax t = %.4g (expected 10 +- %.3g)", t_peak, times.spacing()));
    return out;
}

// 2. Current negativity for a two-momentum superposition.
Verdict current_negativity() {
    Verdict out;
    const MomentumGrid grid(0.2, 4.0, 4096);
    const WavePacket a = gaussian_packet(grid, 1.0, 0.1);
    const WavePacket b = gaussian_packet(grid, 3.0, 0.1);
    const std::vector<std::pair<cplx, WavePacket>> terms{{1.0, a}, {1.0, b}};
    const WavePacket psi = superpose(terms);
    const TimeGrid times(0.0, 60.0, 3001);
    const ToADensity j = probability_current(psi, 1.0, 10.0, times);
    const ToADensity k = kijowski_density(psi, Dispersion::nonrelativistic(1.0), 10.0, times);
    const double j_min = *std::min_element(j.values.begin(), j.values.end());
    const double k_min = *std::min_element(k.values.begin(), k.values.end());
    out.check(j_min < 0.0, fmt("min J = %.3g", j_min));
    out.check(k_min >= -1e-10, fmt("min Kijowski = %.3g", k_min));
    return out;
}

// 3. Constant absorption coefficient reproduces the Kijowski density.
Verdict constant_alpha_reduction() {
    Verdict out;
    const MomentumGrid grid(2.5, 7.5, 4096);
    const WavePacket psi = gaussian_packet(grid, 5.0, 0.25);
    const TimeGrid times(0.0, 40.0, 401);
    for (const Dispersion& d : {Dispersion::nonrelativistic(1.0), Dispersion::relativistic(1.0)}) {
        const ToADensity k = kijowski_density(psi, d, 50.0, times);
        const ToADensity a = toa_density_absorption(psi, AbsorptionCoefficient::constant(1.0), d, 50.0, times);
        double diff = 0.0;
        for (std::size_t n = 0; n < times.size(); ++n) diff = std::max(diff, std::abs(k.values[n] - a.values[n]));
        out.check(diff <= 1e-10, to_string(d.kind()) + fmt(" max-abs %.3g", diff));
    }
    return out;
}

// 4. Detector kernels against the closed-form absorption coefficients.
Verdict detector_consistency() {
    Verdict out;
    const Dispersion d = Dispersion::nonrelativistic(1.0);
    const auto u = CouplingFunction::gaussian(0.8, 5.0, 2.0).with_phase(0.3, 0.7);
    const std::vector<DetectorModel> models{
        DetectorModel::coherent(0.5, 0.0, 0.1, u, 50.0),
        DetectorModel::decoherent(0.5, 40.0, 0.1, u, 50.0),
        DetectorModel::energy(DensityOfStates::power_law(0.7, 0.5), 0.1, u, 50.0),
    };
    for (const DetectorModel& model : models) {
        double rel = 0.0;
        bool hermitian = true;
        for (int k = 0; k < 100; ++k) {
            const double p = 1.0 + 0.08 * k;
            const double diag = kernel(model, p, p, d).real() / std::abs(d.velocity(p));
            double closed = absorption_closed_form(model, d, p);
            if (model.kind == DetectorKind::coherent) closed *= std::sqrt(2.0) * std::exp(-model.delta * model.delta * p * p);
            rel = std::max(rel, std::abs(diag - closed) / std::abs(closed));
            const double q = 1.3 + 0.05 * k;
            hermitian = hermitian && kernel(model, p, q, d) == std::conj(kernel(model, q, p, d));
        }
        out.check(rel <= 1e-10, to_string(model.kind) + fmt(" alpha rel %.3g", rel));
        out.check(hermitian, to_string(model.kind) + " hermitian");

        const MomentumGrid grid(2.5, 7.5, 512);
        const WavePacket psi = gaussian_packet(grid, 5.0, 0.25);
        const double i50 = time_integrated(toa_density_kernel(psi, model.with_distance(50.0), d, TimeGrid(0.0, 30.0, 601)));
        const double i80 = time_integrated(toa_density_kernel(psi, model.with_distance(80.0), d, TimeGrid(0.0, 40.0, 801)));
        out.check(std::abs(i50 - i80) <= 1e-4 * std::abs(i50), to_string(model.kind) + fmt(" L-independence rel %.3g", std::abs(i50 - i80) / std::abs(i50)));
    }
    return out;
}

// 5. Finite-dimensional POVM suite.
Verdict povm_suite() {
    Verdict out;
    models::RandomPerturbativeParams params;
    params.dim = 4;
    params.event_dim = 2;
    params.epsilon = 1e-2;
    const TransitionSystem sys = models::random_perturbative(params);

    const double t = 1.0;
    const RestrictedPropagator s = restricted_propagator(sys, t, std::size_t{1} << 14);
    const ComplexMatrix& Q = sys.projector_q();
    const HermitianSpectrum qhq(Q * sys.hamiltonian() * Q);
    const double trotter = max_abs(s.value - Q * qhq.unitary(t) * Q);
    out.check(trotter <= 1e-6, fmt("(a) Trotter %.3g", trotter));

    const SmearingKernel kernel(0.5);
    double povm_min = INFINITY;
    for (const auto& o : sys.outcomes()) {
        for (double tt : {0.5, 2.0, 4.0, 7.0}) {
            povm_min = std::min(povm_min, min_eigenvalue(smeared_povm_element(sys, o.label, tt, kernel, 512, 97)));
        }
    }
    out.check(povm_min >= -1e-8, fmt("(b) min eig Pi = %.3g", povm_min));

    const double none_min = min_eigenvalue(no_detection_element(sys, 8.0, kernel, 512, 97, 33));
    out.check(none_min >= -1e-8, fmt("(c) min eig Pi(N) = %.3g", none_min));

    double diff = 0.0;
    for (const auto& o : sys.outcomes()) {
        for (double tt : {0.0, 0.5, 1.0, 2.0}) {
            diff = std::max(diff, max_abs(class_operator_exact(sys, o.label, tt) - class_operator_perturbative(sys, o.label, tt)));
        }
    }
    out.check(diff <= 1e-3, fmt("(d) exact vs perturbative %.3g", diff));
    return out;
}

// 6. Off-diagonal decoherence functional decays with interval width.
Verdict consistency_decay() {
    Verdict out;
    const models::DephasingBandParams params;
    const TransitionSystem sys = models::dephasing_band(params);
    const double tau = models::dephasing_time(params);
    const double t1 = 5.0;
    std::vector<double> relative;
    std::string abs_values;
    for (double w : {0.1, 1.0, 10.0}) {
        const double width = w * tau;
        const double off = consistency_offdiagonal(sys, "band", t1, t1 + width, t1 + 2 * width, 2048, 201);
        const double p1 = detection_probability_interval(sys, "band", t1, t1 + width, 2048, 201);
        const double p2 = detection_probability_interval(sys, "band", t1 + width, t1 + 2 * width, 2048, 201);
        relative.push_back(std::abs(off) / (p1 + p2));
        abs_values += fmt(" %.3g", off);
    }
    out.check(relative.front() >= 10.0 * relative.back(),
              fmt("relative off-diagonal %.3g -> %.3g", relative.front(), relative.back()) + "; absolute" + abs_values);
    out.check(relative[0] >= relative[1] && relative[1] >= relative[2], "monotone");
    return out;
}

struct ClassicalCase {
    ToADensity quantum, classical, corrected;
};

ClassicalCase classical_case(double rel) {
    const double p0 = 5.0, dp = rel * p0, L = 50.0;
    const MomentumGrid grid(p0 - 8 * dp, p0 + 8 * dp, 512);
    const WavePacket psi = gaussian_packet(grid, p0, dp);
    const Dispersion d = Dispersion::nonrelativistic(1.0);
    const AbsorptionCoefficient alpha = AbsorptionCoefficient::constant(1.0);
    const TimeGrid times(2.0, 25.0, 1151);
    const std::size_t r = 4;
    const ToADensity quantum = average_cells(toa_density_absorption(psi, alpha, d, L, cell_refinement(times, r)), times, r);
    const double sx = 1.0 / (2.0 * dp);
    std::vector<double> p_nodes;
    for (std::size_t k = 0; k < grid.size(); ++k) p_nodes.push_back(grid.node(k));
    const auto x_nodes = uniform_nodes(-8.0 * sx, 8.0 * sx, static_cast<std::size_t>(std::lround(16.0 * sx / 0.01)) + 1);
    const WignerField w = wigner(psi, x_nodes, p_nodes);
    SemiclassicalResult sc = semiclassical_expansion(w, alpha, d, L, times);
    return {quantum, sc.classical, sc.corrected};
}

// 7. Classical and semiclassical limits.
Verdict classical_limit() {
    Verdict out;
    const ClassicalCase narrow = classical_case(0.05);
    const double tv_narrow = compare(narrow.quantum, narrow.classical).tv_distance;
    out.check(tv_narrow <= 0.05, fmt("TV(quantum, classical) at dp/p0 = 0.05: %.3g", tv_narrow));
    const ClassicalCase wide = classical_case(0.1);
    const double tv_cl = compare(wide.quantum, wide.classical).tv_distance;
    const double tv_sc = compare(wide.quantum, wide.corrected).tv_distance;
    out.check(tv_sc < tv_cl, fmt("at dp/p0 = 0.1: TV classical %.3g, corrected %.3g", tv_cl, tv_sc));
    return out;
}

ComplexMatrix rotation(double theta) {
    ComplexMatrix u(2, 2);
    u << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return u;
}

std::vector<double> sweep(double lo, double hi, std::size_t n) { return uniform_nodes(lo, hi, n); }

std::vector<double> real_parts(const std::vector<OscillationResult>& r) {
    std::vector<double> v;
    for (const auto& x : r) v.push_back(x.value);
    return v;
}

// 8. Standard versus non-standard wavenumber.
Verdict oscillation_dichotomy() {
    Verdict out;
    const std::vector<double> masses{std::sqrt(1.25), 0.5};
    const std::vector<double> momenta{10.0, 10.0};
    const Envelope env(EnvelopeShape::exponential, 50.0);
    const OscillationScenario delta(masses, rotation(std::numbers::pi / 4), momenta, env, 0.0, DecoherenceKernel::delta());
    const OscillationScenario constant = delta.with_kernel(DecoherenceKernel::constant());
    const double k_std = standard_wavenumber(delta, 0, 1).equal_momentum.value();
    const double k_non = nonstandard_wavenumber(delta, 0, 1).equal_momentum.value();
    const double period = 2.0 * std::numbers::pi / k_std;
    const double l_loc = localization_length(delta, 0, 1).value();
    const auto L = sweep(1000.0, 1000.0 + 4.5 * period, 181);

    const double k_delta = fit_wavenumber(L, real_parts(oscillation_sweep(delta, 0, 0, L)));
    const double k_const = fit_wavenumber(L, real_parts(oscillation_sweep(constant, 0, 0, L)));
    out.check(L.back() < 0.2 * l_loc, fmt("L_max / L_loc = %.3g", L.back() / l_loc));
    out.check(std::abs(k_delta / k_std - 1.0) <= 0.01, fmt("delta k = %.6g (standard %.6g)", k_delta, k_std));
    out.check(std::abs(k_const / k_non - 1.0) <= 0.01, fmt("constant k = %.6g (non-standard %.6g)", k_const, k_non));
    out.check(std::abs(k_const / k_delta / 2.0 - 1.0) <= 0.02, fmt("ratio %.5g", k_const / k_delta));

    const OscillationScenario shifted(masses, rotation(std::numbers::pi / 4), momenta, env, 5.0, DecoherenceKernel::delta());
    const auto k5 = nonstandard_wavenumber(shifted, 0, 1);
    const double mbar2 = 0.5 * (masses[0] * masses[0] + masses[1] * masses[1]);
    const double rel = std::abs(k5.ultrarelativistic.value() / k5.equal_momentum.value() - 1.0);
    out.check(rel <= 4.0 * mbar2 / 100.0, fmt("E0 = 5: UR reduction rel %.3g vs m^2/p^2 %.3g", rel, mbar2 / 100.0));
    return out;
}

// Peak-to-peak half amplitude of P(L) over two standard periods starting at l0.
double oscillation_amplitude(const OscillationScenario& s, double l0, double period) {
    const auto L = sweep(l0, l0 + 2.0 * period, 129);
    const auto p = real_parts(oscillation_sweep(s, 0, 0, L));
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    return 0.5 * (*hi - *lo);
}

// 9. Localization suppression.
Verdict localization_suppression() {
    Verdict out;
    const OscillationScenario s({std::sqrt(1.25), 0.5}, rotation(std::numbers::pi / 4), {10.0, 10.0},
                                Envelope(EnvelopeShape::gaussian, 50.0), 0.0, DecoherenceKernel::delta());
    const double period = 2.0 * std::numbers::pi / standard_wavenumber(s, 0, 1).equal_momentum.value();
    const double l_loc = localization_length(s, 0, 1).value();
    const double near = oscillation_amplitude(s, 1000.0, period);
    const double far = oscillation_amplitude(s, 3.0 * l_loc, period);
    out.check(far < 0.2 * near, fmt("amplitude at 3 L_loc / small L = %.3g (L_loc = %.6g)", far / near, l_loc));
    return out;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"Kijowski normalization", kijowski_normalization},
        {"Current negativity", current_negativity},
        {"Constant-alpha reduction", constant_alpha_reduction},
        {"Detector-model consistency", detector_consistency},
        {"Finite-dimensional POVM suite", povm_suite},
        {"Consistency-condition decay", consistency_decay},
        {"Classical limit", classical_limit},
        {"Oscillation dichotomy", oscillation_dichotomy},
        {"Localization suppression", localization_suppression},
#ifdef TOALAB_ACCEPTANCE_RUNNER
        {"Determinism", [] {
             Verdict o;
             const auto r = acceptance::check_determinism();
             o.check(r.identical, r.detail);
             return o;
         }},
#endif
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%2d. %-32s %s  (%.1fs) %s\n", index, name.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures;
}
