#include "toalab/linalg.hpp"

#include <cmath>
#include <string>

#include "toalab/error.hpp"

namespace toalab {

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) return false;
    }
    return true;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool is_projector(const ComplexMatrix& m, double tol) {
    return is_hermitian(m, tol) && max_abs(m * m - m) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const ComplexMatrix id = ComplexMatrix::Identity(m.rows(), m.cols());
    return max_abs(m.adjoint() * m - id) <= tol && max_abs(m * m.adjoint() - id) <= tol;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

HermitianSpectrum::HermitianSpectrum(const ComplexMatrix& h) {
    // Symmetrize so that roundoff-level antihermitian parts do not leak into the spectrum.
    const ComplexMatrix hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hs);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("linalg", "HermitianSpectrum", "eigendecomposition failed");
    }
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

ComplexMatrix HermitianSpectrum::apply_function(const std::function<cplx(double)>& f) const {
    ComplexVector d(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) d[k] = f(values_[k]);
    return vectors_ * d.asDiagonal() * vectors_.adjoint();
}

ComplexMatrix HermitianSpectrum::unitary(double t) const {
    return apply_function([t](double w) { return std::polar(1.0, -w * t); });
}

ComplexMatrix HermitianSpectrum::evolve(double t, const ComplexMatrix& x) const {
    ComplexMatrix y = vectors_.adjoint() * x;
    for (Eigen::Index k = 0; k < values_.size(); ++k) y.row(k) *= std::polar(1.0, -values_[k] * t);
    return vectors_ * y;
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
    if (hermitian.size() == 0) return 0.0;
    const ComplexMatrix hs = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hs, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

ComplexMatrix sqrt_positive(const ComplexMatrix& p, double psd_tol) {
    HermitianSpectrum spec(p);
    const double lowest = spec.eigenvalues().size() ? spec.eigenvalues().minCoeff() : 0.0;
    if (lowest < -psd_tol) {
        throw ValidationError("operator is not positive: eigenvalue " + std::to_string(lowest));
    }
    return spec.apply_function([](double w) { return cplx(std::sqrt(std::max(w, 0.0)), 0.0); });
}

ComplexMatrix positive_factor(const ComplexMatrix& rho, double cutoff) {
    HermitianSpectrum spec(rho);
    std::vector<Eigen::Index> keep;
    const double top = spec.eigenvalues().size() ? spec.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        if (spec.eigenvalues()[k] > std::max(cutoff, 1e-15 * top)) keep.push_back(k);
    }
    ComplexMatrix r(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        r.col(static_cast<Eigen::Index>(c)) =
            spec.eigenvectors().col(keep[c]) * std::sqrt(spec.eigenvalues()[keep[c]]);
    }
    return r;
}

ComplexMatrix range_basis(const ComplexMatrix& projector) {
    HermitianSpectrum spec(projector);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        if (spec.eigenvalues()[k] > 0.5) keep.push_back(k);
    }
    ComplexMatrix b(projector.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        b.col(static_cast<Eigen::Index>(c)) = spec.eigenvectors().col(keep[c]);
    }
    return b;
}

ComplexMatrix matrix_power(ComplexMatrix base, std::uint64_t exponent) {
    ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

}  // namespace toalab
