#pragma once

#include <string>

namespace toalab {

enum class DispersionKind { nonrelativistic, relativistic, threshold_shifted };

std::string to_string(DispersionKind kind);
DispersionKind dispersion_kind_from_string(const std::string& name);

// Energy-momentum relation with analytic derivatives up to v''.
class Dispersion {
public:
    static Dispersion nonrelativistic(double mass);
    static Dispersion relativistic(double mass);
    static Dispersion threshold_shifted(double mass, double threshold);

    DispersionKind kind() const { return kind_; }
    double mass() const { return mass_; }
    double threshold() const { return threshold_; }

    double energy(double p) const;
    double velocity(double p) const;
    double velocity_derivative(double p) const;
    double velocity_second_derivative(double p) const;

private:
    Dispersion(DispersionKind kind, double mass, double threshold);

    DispersionKind kind_;
    double mass_;
    double threshold_;
};

}  // namespace toalab
