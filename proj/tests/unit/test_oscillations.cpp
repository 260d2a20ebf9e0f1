#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "toalab/error.hpp"
#include "toalab/oscillations.hpp"
#include "toalab/quadrature.hpp"
#include "toalab/wavepacket.hpp"

using namespace toalab;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix rotation(double theta) {
    ComplexMatrix u(2, 2);
    u << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return u;
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// A generic 3x3 unitary: exponential of i times a hermitian matrix.
ComplexMatrix unitary3() {
    ComplexMatrix h(3, 3);
    h << 0.3, cplx(0.2, 0.4), cplx(-0.1, 0.3),
         cplx(0.2, -0.4), -0.5, cplx(0.6, 0.1),
         cplx(-0.1, -0.3), cplx(0.6, -0.1), 0.8;
    return HermitianSpectrum(h).unitary(-1.0);
}

// Scenario of the wavenumber dichotomy: m^2 = 1.25 and 0.25, p = 10, maximal mixing.
OscillationScenario dichotomy(DecoherenceKernel kernel, EnvelopeShape shape = EnvelopeShape::exponential) {
    return OscillationScenario({std::sqrt(1.25), 0.5}, rotation(kPi / 4), {10.0, 10.0}, Envelope(shape, 50.0), 0.0,
                               kernel);
}

std::vector<double> values(const std::vector<OscillationResult>& r) {
    std::vector<double> v;
    for (const auto& x : r) v.push_back(x.value);
    return v;
}

double simpson_integral(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const auto rule = simpson(a, b, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
    return acc;
}

}  // namespace

TEST_CASE("envelopes are normalized and their transforms match quadrature") {
    for (EnvelopeShape shape : {EnvelopeShape::gaussian, EnvelopeShape::exponential}) {
        const Envelope env(shape, 2.0);
        CHECK(std::abs(env.norm_squared() - 1.0) <= 1e-8);
        const double reach = env.cutoff();
        // Exponential kink at 0: integrate each half separately.
        auto half = [&](const std::function<double(double)>& f) {
            return simpson_integral(f, -reach, 0.0, 40001) + simpson_integral(f, 0.0, reach, 40001);
        };
        CHECK(half([&](double x) { return env(x) * env(x); }) == doctest::Approx(1.0).epsilon(1e-10));
        for (double kappa : {0.0, 0.3, 1.1}) {
            const double numeric = half([&](double y) { return env(y) * std::cos(kappa * y); });
            CHECK(env.transform(kappa) == doctest::Approx(numeric).epsilon(1e-8));
        }
        for (double y : {0.0, 1.0, 5.0}) {
            const double tail = simpson_integral([&](double x) { return env(x) * env(x); }, y, reach, 40001);
            CHECK(env.tail_mass(y) == doctest::Approx(tail).epsilon(1e-8));
        }
        CHECK(env(reach) <= 1e-15 * env(0.0));
    }
    // phi1 closed forms
    const Envelope g(EnvelopeShape::gaussian, 2.0);
    const Envelope e(EnvelopeShape::exponential, 2.0);
    for (double x : {0.0, 1.0, 3.5}) {
        CHECK(g.phi1(x) == doctest::Approx(std::exp(-x * x / 16.0)).epsilon(1e-8));
        CHECK(e.phi1(x) == doctest::Approx((1.0 + x / 2.0) * std::exp(-x / 2.0)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(Envelope(EnvelopeShape::gaussian, 0.0), ValidationError);
}

TEST_CASE("decoherence kernels") {
    const auto g = DecoherenceKernel::gaussian(0.7, 2.0);
    CHECK(g(0.0) == 2.0);
    CHECK(g(0.7) == doctest::Approx(2.0 * std::exp(-0.5)));
    CHECK(g(-1.3) == g(1.3));
    for (double tau : {0.1, 1.0, 3.0}) CHECK(g(tau) <= g(0.0));
    for (double w : {0.0, 0.8, 2.5}) {
        const double numeric = simpson_integral([&](double t) { return g(t) * std::cos(w * t); }, -7.0, 7.0, 4001);
        CHECK(g.spectrum(w) == doctest::Approx(numeric).epsilon(1e-10));
    }
    CHECK(DecoherenceKernel::constant(3.0)(100.0) == 3.0);
    CHECK(DecoherenceKernel::delta(1.5)(0.0) == 1.5);
    CHECK(DecoherenceKernel::delta(1.5)(0.1) == 0.0);
    CHECK_THROWS_AS(DecoherenceKernel::gaussian(0.0), ValidationError);
}

TEST_CASE("scenario validation") {
    const Envelope env(EnvelopeShape::gaussian, 1.0);
    ComplexMatrix bad = rotation(0.3);
    bad(0, 0) *= 1.01;
    CHECK_THROWS_AS(OscillationScenario({1.0, 0.5}, bad, {10.0, 10.0}, env, 0.0, DecoherenceKernel::delta()), ValidationError);
    CHECK_THROWS_AS(OscillationScenario({1.0, 0.5}, rotation(0.3), {10.0}, env, 0.0, DecoherenceKernel::delta()), ValidationError);
    CHECK_THROWS_AS(OscillationScenario({1.0, -0.5}, rotation(0.3), {10.0, 10.0}, env, 0.0, DecoherenceKernel::delta()),
                    ValidationError);
    CHECK_THROWS_AS(OscillationScenario({1.0, 0.5}, rotation(0.3), {10.0, -1.0}, env, 0.0, DecoherenceKernel::delta()),
                    ValidationError);
    const OscillationScenario s({1.0, 0.5}, rotation(0.3), {10.0, 10.2}, env, 0.0, DecoherenceKernel::delta());
    CHECK(s.momentum_spread() == doctest::Approx(0.02));
}

TEST_CASE("standard wavenumber") {
    const Envelope env(EnvelopeShape::gaussian, 1.0);
    const OscillationScenario s({std::sqrt(1.5), std::sqrt(0.5)}, rotation(0.4), {2.0, 2.0}, env, 0.0, DecoherenceKernel::delta());
    CHECK(*standard_wavenumber(s, 0, 1).equal_momentum == doctest::Approx(0.25));
    CHECK(standard_wavenumber(s, 0, 0).general == 0.0);
    CHECK(*standard_wavenumber(s, 1, 1).equal_momentum == 0.0);

    // Ultra-relativistic: exact energies reproduce the equal-momentum form to O(m^2/p^2).
    const double p = 50.0;
    const OscillationScenario ur({1.0, 0.5}, rotation(0.4), {p, p}, env, 0.0, DecoherenceKernel::delta());
    const auto k = standard_wavenumber(ur, 0, 1);
    CHECK(std::abs(k.general / *k.equal_momentum - 1.0) <= 1.0 / (p * p));
    const OscillationScenario unequal({1.0, 0.5}, rotation(0.4), {p, p + 0.1}, env, 0.0, DecoherenceKernel::delta());
    CHECK_FALSE(standard_wavenumber(unequal, 0, 1).equal_momentum.has_value());
}

TEST_CASE("non-standard wavenumber and its reductions") {
    const Envelope env(EnvelopeShape::gaussian, 1.0);
    const auto kernel = DecoherenceKernel::constant();
    const OscillationScenario zero({std::sqrt(1.5), std::sqrt(0.5)}, rotation(0.4), {2.0, 2.0}, env, 0.0, kernel);
    CHECK(*nonstandard_wavenumber(zero, 0, 1).equal_momentum / *standard_wavenumber(zero, 0, 1).equal_momentum == 2.0);
    CHECK(nonstandard_wavenumber(zero, 0, 1).general == doctest::Approx(0.5).epsilon(1e-12));

    const OscillationScenario nr({10.5, 9.5}, rotation(0.4), {1.0, 1.0}, env, 1.0, kernel);
    const auto knr = nonstandard_wavenumber(nr, 0, 1);
    CHECK(*knr.nonrelativistic == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(*knr.equal_momentum == doctest::Approx(19.0).epsilon(0.01));
    CHECK(knr.general == doctest::Approx(*knr.equal_momentum).epsilon(1e-10));

    const double p = 100.0;
    const OscillationScenario ur({1.0, 0.5}, rotation(0.4), {p, p}, env, 10.0, kernel);
    const auto kur = nonstandard_wavenumber(ur, 0, 1);
    CHECK(*kur.ultrarelativistic == doctest::Approx(0.75 / p * (1.0 - 10.0 / (2.0 * p))).epsilon(1e-14));
    CHECK(std::abs(*kur.ultrarelativistic / *kur.equal_momentum - 1.0) <= 1.0 / (p * p));
}

TEST_CASE("localization length") {
    const Envelope env(EnvelopeShape::gaussian, 3.0);
    const OscillationScenario s({1.0, 0.5}, rotation(0.4), {4.0, 4.0}, env, 0.0, DecoherenceKernel::delta());
    const double vi = 4.0 / std::sqrt(17.0), vj = 4.0 / std::sqrt(16.25);
    CHECK(*localization_length(s, 0, 1) == doctest::Approx(3.0 * 0.5 * (vi + vj) / std::abs(vi - vj)).epsilon(1e-12));
    CHECK_FALSE(localization_length(s, 1, 1).has_value());
    const OscillationScenario same({0.7, 0.7}, rotation(0.4), {4.0, 4.0}, env, 0.0, DecoherenceKernel::delta());
    CHECK_FALSE(localization_length(same, 0, 1).has_value());
    // the mean-velocity choice is immaterial when the velocities are close
    const OscillationScenario geo({1.0, 0.5}, rotation(0.4), {4.0, 4.0}, env, 0.0, DecoherenceKernel::delta(),
                                  MeanVelocity::geometric);
    CHECK(*localization_length(geo, 0, 1) == doctest::Approx(*localization_length(s, 0, 1)).epsilon(1e-3));
}

TEST_CASE("single mass eigenspace gives an L-independent probability") {
    const Envelope env(EnvelopeShape::gaussian, 20.0);
    for (auto kernel : {DecoherenceKernel::delta(), DecoherenceKernel::constant(), DecoherenceKernel::gaussian(3.0)}) {
        const OscillationScenario s({0.8, 0.8, 0.8}, unitary3(), {5.0, 5.0, 5.0}, env, 0.0, kernel);
        const auto L = uniform_nodes(500.0, 900.0, 9);
        const auto r = values(oscillation_sweep(s, 0, 1, L));
        for (double v : r) CHECK(v == doctest::Approx(r.front()).epsilon(1e-6));
    }
}

TEST_CASE("no mixing means no flavor change") {
    const Envelope env(EnvelopeShape::gaussian, 20.0);
    const OscillationScenario s({1.0, 0.5, 0.2}, identity(3), {5.0, 5.0, 5.0}, env, 0.0, DecoherenceKernel::delta());
    for (double L : {300.0, 700.0}) {
        CHECK(oscillation_probability(s, 0, 1, L).value == 0.0);
        CHECK(oscillation_probability(s, 2, 0, L).value == 0.0);
    }
}

TEST_CASE("delta and constant kernels against envelope oracles") {
    // With U = 1 only i = j survives: the delta kernel gives int phi0^2 / v = 1 / v,
    // the constant kernel |phi0~(eps / v)|^2 / v^2.
    const double p = 1.0;
    for (EnvelopeShape shape : {EnvelopeShape::gaussian, EnvelopeShape::exponential}) {
        const Envelope env(shape, 0.5);
        const OscillationScenario s({1.0, 0.3}, identity(2), {p, p}, env, 0.2, DecoherenceKernel::delta());
        for (std::size_t a : {0u, 1u}) {
            const double v = s.velocity(a);
            const double L = 40.0;
            CHECK(oscillation_probability(s, a, a, L).value == doctest::Approx(1.0 / v).epsilon(1e-9));
            const auto c = s.with_kernel(DecoherenceKernel::constant(2.0));
            const double ft = env.transform(s.energy(a) / v);
            CHECK(oscillation_probability(c, a, a, L).value == doctest::Approx(2.0 * ft * ft / (v * v)).epsilon(1e-8));
        }
    }
}

TEST_CASE("gaussian kernel limits") {
    const Envelope env(EnvelopeShape::gaussian, 5.0);
    const OscillationScenario delta({1.0, 0.5}, rotation(0.5), {3.0, 3.0}, env, 0.0, DecoherenceKernel::delta());
    const double tau = 1e-3;
    const auto small = delta.with_kernel(DecoherenceKernel::gaussian(tau));
    const auto big = delta.with_kernel(DecoherenceKernel::gaussian(1e5));
    const auto constant = delta.with_kernel(DecoherenceKernel::constant());
    for (double L : {60.0, 95.0}) {
        const double d = oscillation_probability(delta, 0, 1, L).value;
        CHECK(oscillation_probability(small, 0, 1, L).value == doctest::Approx(std::sqrt(2 * kPi) * tau * d).epsilon(1e-3));
        CHECK(oscillation_probability(big, 0, 1, L).value ==
              doctest::Approx(oscillation_probability(constant, 0, 1, L).value).epsilon(1e-3));
    }
}

TEST_CASE("probabilities are real and conserve flavor under the delta kernel") {
    const Envelope env(EnvelopeShape::gaussian, 30.0);
    const OscillationScenario s({1.0, 0.6, 0.2}, unitary3(), {8.0, 8.0, 8.0}, env, 0.0, DecoherenceKernel::delta());
    const auto L = uniform_nodes(400.0, 800.0, 13);
    std::vector<double> total(L.size(), 0.0);
    for (std::size_t a = 0; a < 3; ++a) {
        const auto r = oscillation_sweep(s, a, 1, L);
        for (std::size_t k = 0; k < L.size(); ++k) {
            CHECK(std::abs(r[k].imag) <= 1e-8 * std::abs(r[k].value));
            total[k] += r[k].value;
        }
    }
    for (double t : total) CHECK(t == doctest::Approx(total.front()).epsilon(1e-4));
}

TEST_CASE("window clipping is rejected") {
    const Envelope env(EnvelopeShape::gaussian, 50.0);
    const OscillationScenario s({1.0, 0.5}, rotation(0.5), {10.0, 10.0}, env, 0.0, DecoherenceKernel::delta());
    CHECK_THROWS_AS(oscillation_probability(s, 0, 1, 100.0), ValidationError);
    CHECK(oscillation_probability(s, 0, 1, 600.0).clipped_mass <= 1e-6);
}

TEST_CASE("wavenumber fit on synthetic data") {
    const auto L = uniform_nodes(0.0, 800.0, 4096);
    std::vector<double> P;
    for (double x : L) P.push_back(1.0 + 0.5 * std::cos(0.25 * x));
    CHECK(fit_wavenumber(L, P) == doctest::Approx(0.25).epsilon(0.005));
    const auto detail = fit_wavenumber_detailed(L, P);
    CHECK(detail.periods >= 4.0);
    CHECK(detail.samples_per_period >= 16.0);

    const std::vector<double> flat(L.size(), 0.7);
    CHECK_THROWS_AS(fit_wavenumber(L, flat), NumericalError);

    const auto few = uniform_nodes(0.0, 60.0, 512);  // fewer than 4 periods
    std::vector<double> Q;
    for (double x : few) Q.push_back(std::cos(0.25 * x));
    CHECK_THROWS_AS(fit_wavenumber(few, Q), ValidationError);
    const auto coarse = uniform_nodes(0.0, 800.0, 300);  // fewer than 16 samples per period
    std::vector<double> R;
    for (double x : coarse) R.push_back(std::cos(0.25 * x));
    CHECK_THROWS_AS(fit_wavenumber(coarse, R), ValidationError);
}

TEST_CASE("fitted wavenumber of the delta kernel is the standard one") {
    const auto s = dichotomy(DecoherenceKernel::delta(), EnvelopeShape::gaussian);
    const double k_std = *standard_wavenumber(s, 0, 1).equal_momentum;
    const double period = 2 * kPi / std::abs(k_std);
    CHECK(1000.0 + 4.5 * period < 0.2 * *localization_length(s, 0, 1));
    const auto L = uniform_nodes(1000.0, 1000.0 + 4.5 * period, 181);
    CHECK(std::abs(fit_wavenumber(L, values(oscillation_sweep(s, 0, 1, L)))) == doctest::Approx(std::abs(k_std)).epsilon(0.01));
}

TEST_CASE("gaussian kernel wavenumber moves monotonically between the two regimes") {
    const auto base = dichotomy(DecoherenceKernel::delta());
    const double k_std = std::abs(*standard_wavenumber(base, 0, 1).equal_momentum);
    const double k_non = std::abs(*nonstandard_wavenumber(base, 0, 1).equal_momentum);
    const double period = 2 * kPi / k_std;
    const auto L = uniform_nodes(1000.0, 1000.0 + 4.5 * period, 181);
    // |L/v_i - L/v_j| is about 5 here; sweep tau_dec from 0.01x to 100x of it.
    std::vector<double> k;
    for (double tau : {0.05, 0.158, 0.5, 1.58, 5.0, 15.8, 50.0, 158.0, 500.0}) {
        const auto s = base.with_kernel(DecoherenceKernel::gaussian(tau));
        k.push_back(std::abs(fit_wavenumber(L, values(oscillation_sweep(s, 0, 1, L)))));
    }
    CHECK(k.front() == doctest::Approx(k_std).epsilon(0.01));
    CHECK(k.back() == doctest::Approx(k_non).epsilon(0.01));
    for (std::size_t i = 1; i < k.size(); ++i) CHECK(k[i] >= k[i - 1] * (1.0 - 1e-6));
}
