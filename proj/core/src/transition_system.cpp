#include <cmath>
#include <sstream>

#include "toalab/error.hpp"
#include "toalab/hilbert.hpp"

namespace toalab {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

TransitionSystem::TransitionSystem(ComplexMatrix hamiltonian, ComplexMatrix projector_p,
                                   std::vector<Outcome> outcomes, ComplexMatrix rho0,
                                   std::optional<HamiltonianSplit> split, TransitionSystemOptions options)
    : h_(std::move(hamiltonian)),
      p_(std::move(projector_p)),
      rho_input_(std::move(rho0)),
      outcomes_(std::move(outcomes)),
      split_(std::move(split)),
      options_(options) {
    const auto& tol = options_.tolerances;
    const Eigen::Index d = h_.rows();

    require(d > 0 && h_.cols() == d, "hamiltonian must be a non-empty square matrix");
    require(static_cast<std::size_t>(d) <= kMaxDimension,
            "dimension " + std::to_string(d) + " exceeds limit " + std::to_string(kMaxDimension));
    require(all_finite(h_), "hamiltonian has non-finite entries");
    require(is_hermitian(h_, tol.hermitian), "hamiltonian is not hermitian (H = H^dagger)");

    require(p_.rows() == d && p_.cols() == d, "projector_P dimension does not match hamiltonian");
    require(all_finite(p_), "projector_P has non-finite entries");
    require(is_projector(p_, tol.hermitian), "projector_P is not a projector (P^2 = P = P^dagger)");
    q_ = ComplexMatrix::Identity(d, d) - p_;

    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
        const auto& o = outcomes_[k];
        require(!o.label.empty(), "outcome labels must be non-empty");
        for (std::size_t j = 0; j < k; ++j) {
            require(outcomes_[j].label != o.label, "duplicate outcome label '" + o.label + "'");
        }
        require(o.op.rows() == d && o.op.cols() == d, "outcome '" + o.label + "' has wrong dimension");
        require(all_finite(o.op), "outcome '" + o.label + "' has non-finite entries");
        require(is_hermitian(o.op, tol.hermitian), "outcome '" + o.label + "' is not hermitian");
        const double lowest = min_eigenvalue(o.op);
        require(lowest >= -tol.psd, "outcome '" + o.label + "' is not positive (eigenvalue " + fmt(lowest) + ")");
        sqrt_outcomes_.push_back(sqrt_positive(o.op, tol.psd));
        sum += o.op;
    }
    require(max_abs(sum - p_) <= tol.outcome_sum,
            "sum of outcome operators must equal the event projector (sum_lambda P_lambda = P), deviation " +
                fmt(max_abs(sum - p_)));
    if (options_.exclusive_outcomes) {
        for (std::size_t a = 0; a < outcomes_.size(); ++a) {
            for (std::size_t b = a + 1; b < outcomes_.size(); ++b) {
                require(max_abs(outcomes_[a].op * outcomes_[b].op) <= tol.hermitian,
                        "exclusive outcomes '" + outcomes_[a].label + "' and '" + outcomes_[b].label +
                            "' are not orthogonal (P_a P_b = 0)");
            }
        }
    }

    require(rho_input_.rows() == d && rho_input_.cols() == d, "rho0 dimension does not match hamiltonian");
    require(all_finite(rho_input_), "rho0 has non-finite entries");
    require(is_hermitian(rho_input_, tol.hermitian), "rho0 is not hermitian");
    require(std::abs(rho_input_.trace() - cplx(1.0)) <= tol.trace, "rho0 must have unit trace");
    const double rho_low = min_eigenvalue(rho_input_);
    require(rho_low >= -tol.psd, "rho0 is not positive (eigenvalue " + fmt(rho_low) + ")");

    switch (options_.initial_support) {
        case InitialSupport::pre_transition: {
            ComplexMatrix projected = q_ * rho_input_ * q_;
            const double kept = projected.trace().real();
            require(kept > 1e-12, "rho0 has no weight in range(Q) (pre-transition support)");
            projection_loss_ = 1.0 - kept;
            rho_ = projected / kept;
            break;
        }
        case InitialSupport::post_event: {
            const double outside = (q_ * rho_input_ * q_).trace().real();
            require(outside <= tol.support, "rho0 has weight " + fmt(outside) + " outside range(P)");
            rho_ = rho_input_;
            break;
        }
        case InitialSupport::unconstrained:
            rho_ = rho_input_;
            break;
    }

    if (split_) {
        require(split_->free.rows() == d && split_->free.cols() == d && split_->interaction.rows() == d &&
                    split_->interaction.cols() == d,
                "hamiltonian split has wrong dimension");
        require(is_hermitian(split_->free, tol.hermitian), "h0 is not hermitian");
        require(is_hermitian(split_->interaction, tol.hermitian), "h_int is not hermitian");
        require(max_abs(split_->free + split_->interaction - h_) <= tol.hermitian, "h0 + h_int must equal H");
        require(max_abs(commutator(split_->free, p_)) <= tol.commutator, "h0 must commute with P ([H0, P] = 0)");
        free_spectrum_.emplace(split_->free);
    }

    spectrum_ = HermitianSpectrum(h_);
    q_basis_ = range_basis(q_);
    q_eig_ = spectrum_.eigenvectors().adjoint() * q_basis_;
    rho_factor_ = positive_factor(rho_);
}

std::size_t TransitionSystem::index_of(std::string_view label) const {
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
        if (outcomes_[k].label == label) return k;
    }
    throw ValidationError("unknown outcome label '" + std::string(label) + "'");
}

const ComplexMatrix& TransitionSystem::outcome(std::string_view label) const {
    return outcomes_[index_of(label)].op;
}

const ComplexMatrix& TransitionSystem::sqrt_outcome(std::string_view label) const {
    return sqrt_outcomes_[index_of(label)];
}

const HamiltonianSplit& TransitionSystem::split() const {
    if (!split_) throw ValidationError("system has no h0/h_int split");
    return *split_;
}

const HermitianSpectrum& TransitionSystem::free_spectrum() const {
    if (!free_spectrum_) throw ValidationError("system has no h0/h_int split");
    return *free_spectrum_;
}

}  // namespace toalab
