#include "toalab/oscillations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toalab/error.hpp"
#include "toalab/parallel.hpp"
#include "toalab/quadrature.hpp"

namespace toalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

// Integrates f over [lo, hi] with Gauss-Legendre panels, breaking at interior kinks.
template <typename F>
cplx integrate_panels(F&& f, double lo, double hi, std::vector<double> kinks, double max_panel) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> breaks{lo, hi};
    for (double k : kinks) {
        if (k > lo && k < hi) breaks.push_back(k);
    }
    std::sort(breaks.begin(), breaks.end());
    const QuadratureRule rule = gauss_legendre_panels(breaks, max_panel);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) acc += rule.weights[k] * f(rule.nodes[k]);
    return acc;
}

double phase_panel(double omega, double fraction) {
    return omega == 0.0 ? kInf : fraction * 2.0 * kPi / std::abs(omega);
}

}  // namespace

std::string to_string(EnvelopeShape shape) {
    return shape == EnvelopeShape::gaussian ? "gaussian" : "exponential";
}

std::string to_string(DecoherenceKind kind) {
    switch (kind) {
        case DecoherenceKind::delta: return "delta";
        case DecoherenceKind::constant: return "constant";
        case DecoherenceKind::gaussian: return "gaussian";
    }
    return "unknown";
}

Envelope::Envelope(EnvelopeShape shape, double sigma_x) : shape_(shape), sigma_(sigma_x) {
    require(sigma_x > 0.0 && std::isfinite(sigma_x), "envelope sigma_x must be > 0");
}

double Envelope::operator()(double x) const {
    if (shape_ == EnvelopeShape::gaussian) {
        return std::pow(kPi * sigma_ * sigma_, -0.25) * std::exp(-0.5 * x * x / (sigma_ * sigma_));
    }
    return std::exp(-std::abs(x) / sigma_) / std::sqrt(sigma_);
}

double Envelope::transform(double kappa) const {
    const double ks = kappa * sigma_;
    if (shape_ == EnvelopeShape::gaussian) {
        return std::pow(kPi * sigma_ * sigma_, -0.25) * std::sqrt(2.0 * kPi) * sigma_ * std::exp(-0.5 * ks * ks);
    }
    return 2.0 * std::sqrt(sigma_) / (1.0 + ks * ks);
}

double Envelope::tail_mass(double y) const {
    if (y < 0.0) return 1.0 - tail_mass(-y);
    if (shape_ == EnvelopeShape::gaussian) return 0.5 * std::erfc(y / sigma_);
    return 0.5 * std::exp(-2.0 * y / sigma_);
}

double Envelope::cutoff() const { return (shape_ == EnvelopeShape::gaussian ? 9.0 : 37.0) * sigma_; }

double Envelope::norm_squared() const {
    const double y = cutoff();
    return integrate_panels([this](double x) { const double v = (*this)(x); return cplx(v * v); }, -y, y, {0.0},
                            0.25 * sigma_)
        .real();
}

double Envelope::phi1(double x) const {
    const double y = cutoff();
    const double lo = std::max(-y, x - y);
    const double hi = std::min(y, x + y);
    return integrate_panels([this, x](double u) { return cplx((*this)(u) * (*this)(u - x)); }, lo, hi, {0.0, x},
                            0.25 * sigma_)
        .real();
}

DecoherenceKernel DecoherenceKernel::delta(double f0) {
    require(f0 > 0.0 && std::isfinite(f0), "decoherence kernel f(0) must be > 0");
    return {DecoherenceKind::delta, 0.0, f0};
}

DecoherenceKernel DecoherenceKernel::constant(double f0) {
    require(f0 > 0.0 && std::isfinite(f0), "decoherence kernel f(0) must be > 0");
    return {DecoherenceKind::constant, 0.0, f0};
}

DecoherenceKernel DecoherenceKernel::gaussian(double tau_dec, double f0) {
    require(f0 > 0.0 && std::isfinite(f0), "decoherence kernel f(0) must be > 0");
    require(tau_dec > 0.0 && std::isfinite(tau_dec), "gaussian decoherence kernel needs tau_dec > 0");
    return {DecoherenceKind::gaussian, tau_dec, f0};
}

double DecoherenceKernel::operator()(double tau) const {
    switch (kind) {
        case DecoherenceKind::delta: return tau == 0.0 ? f0 : 0.0;
        case DecoherenceKind::constant: return f0;
        case DecoherenceKind::gaussian: return f0 * std::exp(-0.5 * tau * tau / (tau_dec * tau_dec));
    }
    return 0.0;
}

double DecoherenceKernel::spectrum(double omega) const {
    if (kind != DecoherenceKind::gaussian) throw ValidationError("kernel spectrum is defined for the gaussian kernel");
    const double u = omega * tau_dec;
    return f0 * std::sqrt(2.0 * kPi) * tau_dec * std::exp(-0.5 * u * u);
}

OscillationScenario::OscillationScenario(std::vector<double> masses, ComplexMatrix mixing, std::vector<double> momenta,
                                         Envelope envelope, double E0, DecoherenceKernel kernel,
                                         MeanVelocity mean_velocity, const Tolerances& tol)
    : masses_(std::move(masses)),
      mixing_(std::move(mixing)),
      momenta_(std::move(momenta)),
      envelope_(envelope),
      E0_(E0),
      kernel_(kernel),
      mean_(mean_velocity),
      tol_(tol) {
    require(!masses_.empty(), "oscillation scenario needs at least one mass eigenstate");
    for (double m : masses_) require(m >= 0.0 && std::isfinite(m), "masses must be finite and >= 0");
    require(momenta_.size() == masses_.size(), "one mean momentum per mass eigenstate is required");
    for (double p : momenta_) require(p > 0.0 && std::isfinite(p), "mean momenta must be > 0");
    require(std::isfinite(E0_), "E0 must be finite");
    require(mixing_.cols() == static_cast<Eigen::Index>(masses_.size()), "mixing matrix needs one column per mass");
    require(all_finite(mixing_), "mixing matrix has non-finite entries");
    require(is_unitary(mixing_, tol_.hermitian), "mixing matrix U must be unitary");
    require(std::abs(envelope_.norm_squared() - 1.0) <= 1e-8, "envelope must be normalized");
    if (kernel_.kind == DecoherenceKind::gaussian) require(kernel_.tau_dec > 0.0, "gaussian kernel needs tau_dec > 0");
}

double OscillationScenario::energy(std::size_t i) const { return std::hypot(momenta_[i], masses_[i]) - E0_; }

double OscillationScenario::velocity(std::size_t i) const {
    return momenta_[i] / std::hypot(momenta_[i], masses_[i]);
}

double OscillationScenario::mean_velocity(std::size_t i, std::size_t j) const {
    const double a = velocity(i), b = velocity(j);
    return mean_ == MeanVelocity::arithmetic ? 0.5 * (a + b) : std::sqrt(a * b);
}

double OscillationScenario::momentum_spread() const {
    const double lo = *std::min_element(momenta_.begin(), momenta_.end());
    const double hi = *std::max_element(momenta_.begin(), momenta_.end());
    return (hi - lo) / lo;
}

OscillationScenario OscillationScenario::with_kernel(DecoherenceKernel kernel) const {
    OscillationScenario s = *this;
    s.kernel_ = kernel;
    if (kernel.kind == DecoherenceKind::gaussian) require(kernel.tau_dec > 0.0, "gaussian kernel needs tau_dec > 0");
    return s;
}

namespace {

struct Pair {
    double vi, vj, ei, ej;
};

cplx delta_term(const OscillationScenario& s, const Pair& q, double L, const OscillationQuadrature& quad) {
    const Envelope& env = s.envelope();
    const double y = env.cutoff();
    const double lo = std::max((L - y) / q.vi, (L - y) / q.vj);
    const double hi = std::min((L + y) / q.vi, (L + y) / q.vj);
    const double w = q.ej - q.ei;
    const double panel = std::min(phase_panel(w, quad.period_fraction),
                                  quad.envelope_fraction * env.sigma() / std::max(q.vi, q.vj));
    std::vector<double> kinks;
    if (env.has_kink()) kinks = {L / q.vi, L / q.vj};
    const cplx value = integrate_panels(
        [&](double s_) { return env(L - q.vj * s_) * env(L - q.vi * s_) * std::polar(1.0, -w * s_); }, lo, hi, kinks,
        panel);
    return s.kernel().f0 * value;
}

// A_k = int ds phi0(L - v_k s) e^{-i eps_k s}
cplx arrival_amplitude(const OscillationScenario& s, double v, double e, double L, const OscillationQuadrature& quad) {
    const Envelope& env = s.envelope();
    const double y = env.cutoff();
    const double panel = std::min(phase_panel(e, quad.period_fraction), quad.envelope_fraction * env.sigma() / v);
    std::vector<double> kinks;
    if (env.has_kink()) kinks = {L / v};
    return integrate_panels([&](double s_) { return env(L - v * s_) * std::polar(1.0, -e * s_); }, (L - y) / v,
                            (L + y) / v, kinks, panel);
}

// int d omega / 2pi f^(omega) a^_j(omega) conj(a^_i(omega)) with
// a^_k(omega) = e^{i (omega - eps_k) L / v_k} phi0^((eps_k - omega) / v_k) / v_k.
cplx gaussian_term(const OscillationScenario& s, const Pair& q, double L, const OscillationQuadrature& quad) {
    const Envelope& env = s.envelope();
    const auto& k = s.kernel();
    const double reach = 9.0 / k.tau_dec;
    const double drift = L * (1.0 / q.vj - 1.0 / q.vi);
    double cap = std::min(phase_panel(drift, quad.period_fraction), 0.5 / k.tau_dec);
    const double width = std::min(q.vi, q.vj) / env.sigma();
    // Envelope transforms peak at omega = eps with width v / sigma_x; grade panels toward the peaks.
    std::vector<double> edges{-reach};
    double w = -reach;
    while (w < reach) {
        const double dist = std::min(std::abs(w - q.ei), std::abs(w - q.ej));
        double step = std::min(cap, std::max(0.25 * width, 0.5 * dist));
        for (double peak : {q.ei, q.ej}) {
            if (peak > w + 1e-12 * std::max(1.0, std::abs(peak)) && peak < w + step) step = peak - w;
        }
        w = std::min(reach, w + step);
        edges.push_back(w);
    }
    const QuadratureRule rule = gauss_legendre_panels(edges, kInf);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < rule.size(); ++n) {
        const double om = rule.nodes[n];
        const cplx aj = std::polar(env.transform((q.ej - om) / q.vj) / q.vj, (om - q.ej) * L / q.vj);
        const cplx ai = std::polar(env.transform((q.ei - om) / q.vi) / q.vi, (om - q.ei) * L / q.vi);
        acc += rule.weights[n] * k.spectrum(om) * aj * std::conj(ai);
    }
    return acc / (2.0 * kPi);
}

}  // namespace

OscillationResult oscillation_probability(const OscillationScenario& s, std::size_t alpha, std::size_t beta, double L,
                                          const OscillationQuadrature& quad) {
    require(alpha < s.flavor_count() && beta < s.flavor_count(), "flavor index out of range");
    require(L > 0.0 && std::isfinite(L), "baseline L must be > 0");
    OscillationResult out;
    out.clipped_mass = s.envelope().tail_mass(L);
    if (out.clipped_mass > s.tolerances().clipped_mass) {
        throw ValidationError("integration window clips " + std::to_string(out.clipped_mass) +
                              " of the envelope mass at s < 0; increase L");
    }
    const std::size_t n = s.mass_count();
    const ComplexMatrix& U = s.mixing();
    const auto a = static_cast<Eigen::Index>(alpha);
    const auto b = static_cast<Eigen::Index>(beta);

    std::vector<cplx> amplitude;
    if (s.kernel().kind == DecoherenceKind::constant) {
        for (std::size_t k = 0; k < n; ++k) amplitude.push_back(arrival_amplitude(s, s.velocity(k), s.energy(k), L, quad));
    }
    cplx total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const cplx mix = std::conj(U(a, ii)) * U(a, jj) * U(b, ii) * std::conj(U(b, jj));
            if (std::abs(mix) == 0.0) continue;
            const Pair q{s.velocity(i), s.velocity(j), s.energy(i), s.energy(j)};
            cplx integral;
            switch (s.kernel().kind) {
                case DecoherenceKind::delta: integral = delta_term(s, q, L, quad); break;
                case DecoherenceKind::constant: integral = s.kernel().f0 * amplitude[j] * std::conj(amplitude[i]); break;
                case DecoherenceKind::gaussian: integral = gaussian_term(s, q, L, quad); break;
            }
            total += mix * std::polar(1.0, (s.momenta()[j] - s.momenta()[i]) * L) * integral;
        }
    }
    out.value = total.real();
    out.imag = total.imag();
    return out;
}

std::vector<OscillationResult> oscillation_sweep(const OscillationScenario& s, std::size_t alpha, std::size_t beta,
                                                 std::span<const double> L, const OscillationQuadrature& quad) {
    std::vector<OscillationResult> out(L.size());
    parallel_for(L.size(), [&](std::size_t k) { out[k] = oscillation_probability(s, alpha, beta, L[k], quad); });
    return out;
}

StandardWavenumber standard_wavenumber(const OscillationScenario& s, std::size_t i, std::size_t j) {
    require(i < s.mass_count() && j < s.mass_count(), "mass index out of range");
    const double v = s.mean_velocity(i, j);
    require(v > 0.0, "mean velocity must be > 0");
    StandardWavenumber k;
    k.general = (s.momenta()[j] - s.momenta()[i]) - (s.energy(j) - s.energy(i)) / v;
    if (s.momenta()[i] == s.momenta()[j]) {
        const double mi = s.masses()[i], mj = s.masses()[j];
        k.equal_momentum = (mi * mi - mj * mj) / (2.0 * s.momenta()[i]);
    }
    return k;
}

NonstandardWavenumber nonstandard_wavenumber(const OscillationScenario& s, std::size_t i, std::size_t j) {
    require(i < s.mass_count() && j < s.mass_count(), "mass index out of range");
    NonstandardWavenumber k;
    k.general = (s.momenta()[j] - s.momenta()[i]) - (s.energy(j) / s.velocity(j) - s.energy(i) / s.velocity(i));
    if (s.momenta()[i] == s.momenta()[j]) {
        const double p = s.momenta()[i];
        const double mi = s.masses()[i], mj = s.masses()[j];
        const double e0 = s.E0();
        k.equal_momentum = (mi * mi - mj * mj) / p - (e0 / p) * (std::hypot(mi, p) - std::hypot(mj, p));
        k.nonrelativistic = (mi - mj) * (mi + mj - e0) / p;
        k.ultrarelativistic = (mi * mi - mj * mj) / p * (1.0 - e0 / (2.0 * p));
    }
    return k;
}

std::optional<double> localization_length(const OscillationScenario& s, std::size_t i, std::size_t j) {
    require(i < s.mass_count() && j < s.mass_count(), "mass index out of range");
    const double dv = std::abs(s.velocity(i) - s.velocity(j));
    if (dv == 0.0) return std::nullopt;
    return s.envelope().sigma() * s.mean_velocity(i, j) / dv;
}

}  // namespace toalab
