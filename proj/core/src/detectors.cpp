#include "toalab/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "toalab/error.hpp"

namespace toalab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string pair_text(double p, double q) {
    std::ostringstream os;
    os.precision(17);
    os << "(p=" << p << ", p'=" << q << ")";
    return os.str();
}

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be > 0");
}

void check_domain(const DetectorModel& m, double p, const char* op) {
    if (std::abs(p) < m.singular_exclusion) {
        throw NumericalError("detectors", op, "momentum " + std::to_string(p) + " inside the excluded neighborhood of p = 0");
    }
}

cplx coupling_value(const DetectorModel& m, double p) {
    const cplx u = m.coupling(p);
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
        throw NumericalError("detectors", "coupling", "u~ is not finite at p = " + std::to_string(p));
    }
    return m.keep_phase ? u : cplx(std::abs(u), 0.0);
}

cplx plane_phase(double p, double q, double L) { return std::polar(1.0, (p - q) * L); }

// u~(p) u~*(q); exactly |u~|^2 on the diagonal.
cplx coupling_product(const DetectorModel& m, double p, double q) {
    const cplx up = coupling_value(m, p);
    if (p == q) return std::norm(up);
    return up * std::conj(coupling_value(m, q));
}

}  // namespace

CouplingFunction::CouplingFunction(CouplingFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    for (double v : params_) {
        if (!std::isfinite(v)) throw ValidationError("coupling parameters must be finite");
    }
}

CouplingFunction CouplingFunction::constant(double amplitude) { return {CouplingFamily::constant, {amplitude}}; }

CouplingFunction CouplingFunction::gaussian(double amplitude, double center, double width) {
    require_finite_positive(width, "gaussian coupling width");
    return {CouplingFamily::gaussian, {amplitude, center, width}};
}

CouplingFunction CouplingFunction::power_law(double amplitude, double exponent) {
    return {CouplingFamily::power_law, {amplitude, exponent}};
}

CouplingFunction CouplingFunction::tabulated(std::vector<double> p, std::vector<cplx> values) {
    if (p.size() < 2 || p.size() != values.size()) throw ValidationError("tabulated coupling needs >= 2 matching samples");
    if (!std::is_sorted(p.begin(), p.end()) || std::adjacent_find(p.begin(), p.end()) != p.end()) {
        throw ValidationError("tabulated coupling momenta must be strictly increasing");
    }
    CouplingFunction f(CouplingFamily::tabulated, {});
    f.table_p_ = std::move(p);
    f.table_v_ = std::move(values);
    return f;
}

CouplingFunction CouplingFunction::with_phase(double theta0, double theta1) const {
    CouplingFunction f = *this;
    f.theta0_ = theta0;
    f.theta1_ = theta1;
    return f;
}

CouplingFunction CouplingFunction::scaled(double factor) const {
    CouplingFunction f = *this;
    f.scale_ *= factor;
    return f;
}

cplx CouplingFunction::operator()(double p) const {
    cplx base;
    switch (family_) {
        case CouplingFamily::constant:
            base = params_[0];
            break;
        case CouplingFamily::gaussian: {
            const double u = (p - params_[1]) / params_[2];
            base = params_[0] * std::exp(-0.5 * u * u);
            break;
        }
        case CouplingFamily::power_law:
            base = params_[0] * std::pow(std::abs(p), params_[1]);
            break;
        case CouplingFamily::tabulated: {
            if (p < table_p_.front() || p > table_p_.back()) {
                throw NumericalError("detectors", "coupling", "p = " + std::to_string(p) + " outside tabulated range");
            }
            const auto it = std::upper_bound(table_p_.begin(), table_p_.end(), p);
            const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - table_p_.begin()), table_p_.size() - 1);
            const std::size_t lo = hi - 1;
            const double f = (p - table_p_[lo]) / (table_p_[hi] - table_p_[lo]);
            base = (1.0 - f) * table_v_[lo] + f * table_v_[hi];
            break;
        }
    }
    return scale_ * base * std::polar(1.0, theta0_ + theta1_ * p);
}

DensityOfStates::DensityOfStates(DensityOfStatesFamily family, double w0, double param)
    : family_(family), w0_(w0), param_(param) {
    if (!(w0 >= 0.0) || !std::isfinite(w0) || !std::isfinite(param)) {
        throw ValidationError("density of states requires finite w0 >= 0");
    }
}

DensityOfStates DensityOfStates::constant(double w0) { return {DensityOfStatesFamily::constant, w0, 0.0}; }
DensityOfStates DensityOfStates::power_law(double w0, double exponent) {
    return {DensityOfStatesFamily::power_law, w0, exponent};
}
DensityOfStates DensityOfStates::step(double w0, double threshold) {
    return {DensityOfStatesFamily::step, w0, threshold};
}

double DensityOfStates::operator()(double energy) const {
    switch (family_) {
        case DensityOfStatesFamily::constant:
            return w0_;
        case DensityOfStatesFamily::power_law:
            if (!(energy > 0.0)) {
                throw NumericalError("detectors", "density_of_states", "w(E) undefined at E = " + std::to_string(energy));
            }
            return w0_ * std::pow(energy, param_);
        case DensityOfStatesFamily::step:
            return energy >= param_ ? w0_ : 0.0;
    }
    return 0.0;
}

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::coherent: return "coherent";
        case DetectorKind::decoherent: return "decoherent";
        case DetectorKind::energy: return "energy";
    }
    return "unknown";
}

DetectorModel DetectorModel::coherent(double mu_star, double E0, double delta, CouplingFunction u, double L) {
    DetectorModel m;
    m.kind = DetectorKind::coherent;
    m.mu_star = mu_star;
    m.E0 = E0;
    m.delta = delta;
    m.coupling = std::move(u);
    m.L = L;
    m.validate();
    return m;
}

DetectorModel DetectorModel::decoherent(double mu_star, double diffusion, double delta, CouplingFunction u, double L) {
    DetectorModel m;
    m.kind = DetectorKind::decoherent;
    m.mu_star = mu_star;
    m.diffusion = diffusion;
    m.delta = delta;
    m.coupling = std::move(u);
    m.L = L;
    m.validate();
    return m;
}

DetectorModel DetectorModel::energy(DensityOfStates w, double delta, CouplingFunction u, double L) {
    DetectorModel m;
    m.kind = DetectorKind::energy;
    m.density_of_states = w;
    m.delta = delta;
    m.coupling = std::move(u);
    m.L = L;
    m.validate();
    return m;
}

void DetectorModel::validate() const {
    require_finite_positive(delta, "detector delta");
    if (!std::isfinite(L)) throw ValidationError("detector distance L must be finite");
    if (!(singular_exclusion >= 0.0)) throw ValidationError("singular_exclusion must be >= 0");
    switch (kind) {
        case DetectorKind::coherent:
            require_finite_positive(mu_star, "detector mu_star");
            if (!std::isfinite(E0)) throw ValidationError("detector E0 must be finite");
            break;
        case DetectorKind::decoherent:
            require_finite_positive(mu_star, "detector mu_star");
            require_finite_positive(diffusion, "detector diffusion constant D");
            break;
        case DetectorKind::energy:
            if (!density_of_states) throw ValidationError("energy detector requires a density of states");
            break;
    }
}

double DetectorModel::decoherence_time() const {
    if (kind != DetectorKind::decoherent) return 0.0;
    return mu_star * mu_star * delta * delta / diffusion;
}

DetectorModel DetectorModel::with_distance(double distance) const {
    DetectorModel m = *this;
    m.L = distance;
    m.validate();
    return m;
}

DetectorModel DetectorModel::with_coupling(CouplingFunction u) const {
    DetectorModel m = *this;
    m.coupling = std::move(u);
    return m;
}

namespace {

cplx kernel_coherent_ordered(const DetectorModel& m, double p, double q, const Dispersion& d) {
    check_domain(m, p, "kernel_coherent");
    check_domain(m, q, "kernel_coherent");
    const double e = 0.5 * (d.energy(p) + d.energy(q)) - m.E0;
    if (!(e > 0.0)) {
        throw NumericalError("detectors", "kernel_coherent", "energy at or below threshold at " + pair_text(p, q));
    }
    const double pref = std::sqrt(kPi * m.mu_star * m.delta * m.delta) / std::sqrt(e);
    const double cut = std::exp(-0.5 * m.delta * m.delta * (p * p + q * q));
    return pref * cut * coupling_product(m, p, q) * plane_phase(p, q, m.L);
}

cplx kernel_decoherent_ordered(const DetectorModel& m, double p, double q) {
    check_domain(m, p, "kernel_decoherent");
    check_domain(m, q, "kernel_decoherent");
    const double s = p + q;
    if (s == 0.0) throw NumericalError("detectors", "kernel_decoherent", "p + p' = 0 at " + pair_text(p, q));
    const double pref = 4.0 * m.mu_star * m.mu_star / (m.diffusion * s * s);
    const double diff = p - q;
    const double cut = std::exp(-0.25 * m.delta * m.delta * diff * diff);
    return pref * cut * coupling_product(m, p, q) * plane_phase(p, q, m.L);
}

cplx kernel_energy_ordered(const DetectorModel& m, double p, double q, const Dispersion& d) {
    check_domain(m, p, "kernel_energy");
    check_domain(m, q, "kernel_energy");
    if (!m.density_of_states) throw ValidationError("energy detector requires a density of states");
    const double e = 0.5 * (d.energy(p) + d.energy(q));
    const double w = (*m.density_of_states)(e);
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw NumericalError("detectors", "kernel_energy", "w(E) negative or undefined at " + pair_text(p, q));
    }
    const double diff = p - q;
    const double cut = std::exp(-0.25 * m.delta * m.delta * diff * diff);
    return std::sqrt(2.0) * kPi * cut * w * coupling_product(m, p, q) *
           plane_phase(p, q, m.L);
}

}  // namespace

// The formulas are hermitian on paper; evaluating the ordered pair and conjugating makes the
// symmetry exact in floating point as well.
cplx kernel_coherent(const DetectorModel& m, double p, double q, const Dispersion& d) {
    return p <= q ? kernel_coherent_ordered(m, p, q, d) : std::conj(kernel_coherent_ordered(m, q, p, d));
}

cplx kernel_decoherent(const DetectorModel& m, double p, double q) {
    return p <= q ? kernel_decoherent_ordered(m, p, q) : std::conj(kernel_decoherent_ordered(m, q, p));
}

cplx kernel_energy(const DetectorModel& m, double p, double q, const Dispersion& d) {
    return p <= q ? kernel_energy_ordered(m, p, q, d) : std::conj(kernel_energy_ordered(m, q, p, d));
}

cplx kernel(const DetectorModel& model, double p, double q, const Dispersion& d) {
    switch (model.kind) {
        case DetectorKind::coherent: return kernel_coherent(model, p, q, d);
        case DetectorKind::decoherent: return kernel_decoherent(model, p, q);
        case DetectorKind::energy: return kernel_energy(model, p, q, d);
    }
    return 0.0;
}

AbsorptionCoefficient::AbsorptionCoefficient(Fn value, Fn first, Fn second)
    : value_(std::move(value)), first_(std::move(first)), second_(std::move(second)) {
    if (!value_) throw ValidationError("absorption coefficient needs a value function");
}

AbsorptionCoefficient AbsorptionCoefficient::constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("absorption coefficient must be >= 0");
    return AbsorptionCoefficient([c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; });
}

AbsorptionCoefficient AbsorptionCoefficient::power_law(double c, double n) {
    if (!(c >= 0.0) || !std::isfinite(c) || !std::isfinite(n)) throw ValidationError("absorption coefficient must be >= 0");
    auto domain = [](double p) {
        if (!(p > 0.0)) throw NumericalError("detectors", "absorption", "power-law alpha undefined at p = " + std::to_string(p));
    };
    return AbsorptionCoefficient(
        [=](double p) { domain(p); return c * std::pow(p, n); },
        [=](double p) { domain(p); return c * n * std::pow(p, n - 1.0); },
        [=](double p) { domain(p); return c * n * (n - 1.0) * std::pow(p, n - 2.0); });
}

double AbsorptionCoefficient::operator()(double p) const { return value_(p); }

double AbsorptionCoefficient::derivative(double p) const {
    if (first_) return first_(p);
    const double h = 1e-4 * std::max(1.0, std::abs(p));
    return (value_(p + h) - value_(p - h)) / (2.0 * h);
}

double AbsorptionCoefficient::second_derivative(double p) const {
    if (second_) return second_(p);
    const double h = 1e-3 * std::max(1.0, std::abs(p));
    return (value_(p + h) - 2.0 * value_(p) + value_(p - h)) / (h * h);
}

AbsorptionCoefficient AbsorptionCoefficient::scaled(double factor) const {
    Fn v = value_, f = first_, s = second_;
    return AbsorptionCoefficient([=](double p) { return factor * v(p); },
                                 f ? Fn([=](double p) { return factor * f(p); }) : Fn{},
                                 s ? Fn([=](double p) { return factor * s(p); }) : Fn{});
}

AbsorptionCoefficient absorption(const DetectorModel& model, const Dispersion& d) {
    model.validate();
    return AbsorptionCoefficient([model, d](double p) {
        const double v = std::abs(d.velocity(p));
        if (!(v > 0.0)) throw NumericalError("detectors", "absorption", "zero velocity at p = " + std::to_string(p));
        return kernel(model, p, p, d).real() / v;
    });
}

double absorption_closed_form(const DetectorModel& m, const Dispersion& d, double p) {
    check_domain(m, p, "absorption_closed_form");
    const double v = std::abs(d.velocity(p));
    if (!(v > 0.0)) throw NumericalError("detectors", "absorption_closed_form", "zero velocity at p = " + std::to_string(p));
    const double u2 = std::norm(m.coupling(p));
    switch (m.kind) {
        case DetectorKind::coherent: {
            const double e = d.energy(p) - m.E0;
            if (!(e > 0.0)) throw NumericalError("detectors", "absorption_closed_form", "energy at or below threshold");
            const double k = std::sqrt(kPi * m.delta * m.delta * m.mu_star / 2.0);
            return k * u2 / (v * std::sqrt(e));
        }
        case DetectorKind::decoherent:
            if (p == 0.0) throw NumericalError("detectors", "absorption_closed_form", "alpha singular at p = 0");
            return m.mu_star * m.mu_star * u2 / (m.diffusion * v * p * p);
        case DetectorKind::energy:
            return std::sqrt(2.0) * kPi * (*m.density_of_states)(d.energy(p)) * u2 / v;
    }
    return 0.0;
}

DetectorDiagnostics diagnose(const DetectorModel& model, const WavePacket& state, const Dispersion& d) {
    DetectorDiagnostics out;
    double peak = 0.0;
    for (const auto& a : state.amplitudes()) peak = std::max(peak, std::norm(a));
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (std::norm(state[k]) < 1e-16 * peak) continue;
        const double e = std::abs(d.energy(state.grid().node(k)));
        out.coherent_validity = std::max(out.coherent_validity, e * model.mu_star * model.delta * model.delta);
    }
    if (model.kind == DetectorKind::decoherent) {
        out.diffusion_ratio = model.diffusion / model.mu_star;
        out.decoherence_time = model.decoherence_time();
    }
    return out;
}

}  // namespace toalab
