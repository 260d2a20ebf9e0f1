#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace toalab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kMaxDimension = 4096;

double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_projector(const ComplexMatrix& m, double tol);
bool is_unitary(const ComplexMatrix& m, double tol);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Eigendecomposition of a hermitian matrix, cached for repeated matrix functions.
class HermitianSpectrum {
public:
    HermitianSpectrum() = default;
    explicit HermitianSpectrum(const ComplexMatrix& h);

    const RealVector& eigenvalues() const { return values_; }
    const ComplexMatrix& eigenvectors() const { return vectors_; }
    Eigen::Index dim() const { return values_.size(); }

    // f(H) = V diag(f(w)) V^dagger
    ComplexMatrix apply_function(const std::function<cplx(double)>& f) const;
    // e^{-iHt}
    ComplexMatrix unitary(double t) const;
    // e^{-iHt} X without forming the exponential
    ComplexMatrix evolve(double t, const ComplexMatrix& x) const;

private:
    RealVector values_;
    ComplexMatrix vectors_;
};

double min_eigenvalue(const ComplexMatrix& hermitian);

// Square root of a positive operator; throws ValidationError if an eigenvalue is below -psd_tol.
ComplexMatrix sqrt_positive(const ComplexMatrix& p, double psd_tol);

// Factor R with R R^dagger = rho, dropping eigenvalues below cutoff.
ComplexMatrix positive_factor(const ComplexMatrix& rho, double cutoff = 0.0);

// Orthonormal basis (columns) of the range of a projector.
ComplexMatrix range_basis(const ComplexMatrix& projector);

// Integer power by repeated squaring.
ComplexMatrix matrix_power(ComplexMatrix base, std::uint64_t exponent);

}  // namespace toalab
