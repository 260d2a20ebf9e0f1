#include "toalab/models.hpp"

#include <cmath>

#include "toalab/error.hpp"

namespace toalab::models {

ComplexMatrix random_hermitian(Eigen::Index dim, UniformSource& rng) {
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        m(r, r) = rng.symmetric();
        for (Eigen::Index c = r + 1; c < dim; ++c) {
            m(r, c) = cplx(rng.symmetric(), rng.symmetric());
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

TransitionSystem two_level(double eps, double g) {
    ComplexMatrix h(2, 2);
    h << eps, g, g, -eps;
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    p(1, 1) = 1.0;
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    ComplexMatrix h0 = ComplexMatrix::Zero(2, 2);
    h0(0, 0) = eps;
    h0(1, 1) = -eps;
    return TransitionSystem(h, p, {{"1", p}}, rho, HamiltonianSplit{h0, h - h0});
}

TransitionSystem random_perturbative(const RandomPerturbativeParams& params) {
    const Eigen::Index d = params.dim;
    const Eigen::Index e = params.event_dim;
    if (d < 2 || e < 1 || e >= d) throw ValidationError("random_perturbative needs 1 <= event_dim < dim");
    const Eigen::Index q = d - e;
    UniformSource rng(params.seed);

    ComplexMatrix h0 = ComplexMatrix::Zero(d, d);
    h0.topLeftCorner(q, q) = random_hermitian(q, rng);
    h0.bottomRightCorner(e, e) = random_hermitian(e, rng);

    ComplexMatrix x = ComplexMatrix::Zero(d, d);
    for (Eigen::Index r = q; r < d; ++r) {
        for (Eigen::Index c = 0; c < q; ++c) x(r, c) = cplx(rng.symmetric(), rng.symmetric());
    }
    const ComplexMatrix hi = params.epsilon * (x + x.adjoint());

    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    std::vector<Outcome> outcomes;
    for (Eigen::Index k = q; k < d; ++k) {
        p(k, k) = 1.0;
        ComplexMatrix pk = ComplexMatrix::Zero(d, d);
        pk(k, k) = 1.0;
        outcomes.push_back({"e" + std::to_string(k - q), pk});
    }

    ComplexVector psi = ComplexVector::Zero(d);
    for (Eigen::Index k = 0; k < q; ++k) psi[k] = cplx(rng.symmetric(), rng.symmetric());
    psi.normalize();
    const ComplexMatrix rho = psi * psi.adjoint();

    TransitionSystemOptions opts;
    opts.exclusive_outcomes = true;
    return TransitionSystem(h0 + hi, p, std::move(outcomes), rho, HamiltonianSplit{h0, hi}, opts);
}

TransitionSystem dephasing_band(const DephasingBandParams& params) {
    const Eigen::Index m = params.band_levels;
    if (m < 2) throw ValidationError("dephasing band needs at least 2 levels");
    if (!(params.bandwidth > 0.0)) throw ValidationError("dephasing bandwidth must be > 0");
    const Eigen::Index d = m + 1;
    const double half = params.band_extent * params.bandwidth;

    RealVector energy(m), weight(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        energy[k] = -half + 2.0 * half * static_cast<double>(k) / static_cast<double>(m - 1);
        weight[k] = std::exp(-energy[k] * energy[k] / (4.0 * params.bandwidth * params.bandwidth));
    }
    weight *= params.coupling / weight.norm();

    ComplexMatrix h0 = ComplexMatrix::Zero(d, d);
    ComplexMatrix hi = ComplexMatrix::Zero(d, d);
    h0(0, 0) = params.level_energy;
    for (Eigen::Index k = 0; k < m; ++k) {
        h0(k + 1, k + 1) = energy[k];
        hi(0, k + 1) = weight[k];
        hi(k + 1, 0) = weight[k];
    }
    ComplexMatrix p = ComplexMatrix::Identity(d, d);
    p(0, 0) = 0.0;
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    rho(0, 0) = 1.0;
    return TransitionSystem(h0 + hi, p, {{"band", p}}, rho, HamiltonianSplit{h0, hi});
}

}  // namespace toalab::models
