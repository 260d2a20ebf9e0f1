#pragma once

namespace toalab {

// Validation tolerances. Every field is overridable; scaled() multiplies all of them.
struct Tolerances {
    double hermitian = 1e-10;      // max-abs entry norm for hermitian/projector/unitary checks
    double psd = 1e-12;            // most negative eigenvalue accepted for positive operators
    double trace = 1e-10;          // |Tr rho - 1|
    double outcome_sum = 1e-10;    // sum of outcome operators against P
    double commutator = 1e-10;     // [H0, P]
    double norm = 1e-9;            // wave-packet normalization
    double weights = 1e-9;         // mixture weights
    double support = 1e-8;         // norm fraction allowed outside a declared support
    double clipped_mass = 1e-6;    // oscillation window clipping

    Tolerances scaled(double factor) const {
        Tolerances t = *this;
        t.hermitian *= factor;
        t.psd *= factor;
        t.trace *= factor;
        t.outcome_sum *= factor;
        t.commutator *= factor;
        t.norm *= factor;
        t.weights *= factor;
        t.support *= factor;
        t.clipped_mass *= factor;
        return t;
    }
};

}  // namespace toalab
