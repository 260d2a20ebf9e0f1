#include "toalab/dispersion.hpp"

#include <cmath>

#include "toalab/error.hpp"

namespace toalab {

std::string to_string(DispersionKind kind) {
    switch (kind) {
        case DispersionKind::nonrelativistic: return "nonrelativistic";
        case DispersionKind::relativistic: return "relativistic";
        case DispersionKind::threshold_shifted: return "threshold-shifted";
    }
    return "unknown";
}

DispersionKind dispersion_kind_from_string(const std::string& name) {
    if (name == "nonrelativistic") return DispersionKind::nonrelativistic;
    if (name == "relativistic") return DispersionKind::relativistic;
    if (name == "threshold-shifted") return DispersionKind::threshold_shifted;
    throw ValidationError("unknown dispersion kind '" + name + "'");
}

Dispersion::Dispersion(DispersionKind kind, double mass, double threshold)
    : kind_(kind), mass_(mass), threshold_(threshold) {
    if (!std::isfinite(mass) || !std::isfinite(threshold)) throw ValidationError("dispersion parameters must be finite");
    if (kind == DispersionKind::nonrelativistic && !(mass > 0.0)) {
        throw ValidationError("nonrelativistic dispersion requires m > 0");
    }
    if (mass < 0.0) throw ValidationError("dispersion mass must be >= 0");
}

Dispersion Dispersion::nonrelativistic(double mass) { return {DispersionKind::nonrelativistic, mass, 0.0}; }
Dispersion Dispersion::relativistic(double mass) { return {DispersionKind::relativistic, mass, 0.0}; }
Dispersion Dispersion::threshold_shifted(double mass, double threshold) {
    return {DispersionKind::threshold_shifted, mass, threshold};
}

double Dispersion::energy(double p) const {
    if (kind_ == DispersionKind::nonrelativistic) return p * p / (2.0 * mass_);
    return std::hypot(p, mass_) - threshold_;
}

double Dispersion::velocity(double p) const {
    if (kind_ == DispersionKind::nonrelativistic) return p / mass_;
    return p / std::hypot(p, mass_);
}

double Dispersion::velocity_derivative(double p) const {
    if (kind_ == DispersionKind::nonrelativistic) return 1.0 / mass_;
    const double e = std::hypot(p, mass_);
    return mass_ * mass_ / (e * e * e);
}

double Dispersion::velocity_second_derivative(double p) const {
    if (kind_ == DispersionKind::nonrelativistic) return 0.0;
    const double e = std::hypot(p, mass_);
    return -3.0 * mass_ * mass_ * p / std::pow(e, 5);
}

}  // namespace toalab
