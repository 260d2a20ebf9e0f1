#include "toalab/wavepacket.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "fftw_lock.hpp"
#include "toalab/error.hpp"

namespace toalab {

std::mutex& detail::fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cplx>& data, int sign) {
    const int n = static_cast<int>(data.size());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_plan_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

MomentumGrid::MomentumGrid(double p_min, double p_max, std::size_t n_points)
    : p_min_(p_min), p_max_(p_max), n_(n_points) {
    if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_min < p_max)) {
        throw ValidationError("momentum grid requires p_min < p_max");
    }
    if (!is_power_of_two(n_points)) throw ValidationError("momentum grid size must be a power of two");
}

double MomentumGrid::position_spacing() const { return kTwoPi / (static_cast<double>(n_) * spacing()); }
double MomentumGrid::position_span() const { return kTwoPi / spacing(); }

std::size_t MomentumGrid::index_of(double p) const {
    const double f = (p - p_min_) / spacing();
    const double k = std::round(f);
    if (std::abs(f - k) > 1e-9 || k < 0 || k >= static_cast<double>(n_)) {
        throw ValidationError("momentum " + std::to_string(p) + " is not a grid node");
    }
    return static_cast<std::size_t>(k);
}

WavePacket::WavePacket(MomentumGrid grid, std::vector<cplx> amplitudes, RawTag)
    : grid_(grid), amp_(std::move(amplitudes)) {
    if (amp_.size() != grid_.size()) throw ValidationError("amplitude count does not match momentum grid");
    for (const auto& a : amp_) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ValidationError("non-finite amplitude");
    }
}

WavePacket::WavePacket(MomentumGrid grid, std::vector<cplx> amplitudes)
    : WavePacket(grid, std::move(amplitudes), RawTag{}) {
    const double n = norm();
    if (!(n > 0.0)) throw ValidationError("wave packet has zero norm");
    const double s = 1.0 / std::sqrt(n);
    for (auto& a : amp_) a *= s;
}

WavePacket WavePacket::unnormalized(MomentumGrid grid, std::vector<cplx> amplitudes) {
    return WavePacket(grid, std::move(amplitudes), RawTag{});
}

double WavePacket::norm() const {
    double acc = 0.0;
    for (const auto& a : amp_) acc += std::norm(a);
    return acc * grid_.spacing() / kTwoPi;
}

double WavePacket::mean_momentum() const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) {
        const double w = std::norm(amp_[k]);
        num += w * grid_.node(k);
        den += w;
    }
    return num / den;
}

double WavePacket::momentum_variance() const {
    const double mean = mean_momentum();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) {
        const double w = std::norm(amp_[k]);
        const double dp = grid_.node(k) - mean;
        num += w * dp * dp;
        den += w;
    }
    return num / den;
}

double WavePacket::nonpositive_fraction() const {
    double neg = 0.0, all = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) {
        const double w = std::norm(amp_[k]);
        all += w;
        if (grid_.node(k) <= 0.0) neg += w;
    }
    return all > 0.0 ? neg / all : 0.0;
}

cplx WavePacket::position_amplitude(double x, double t, const Dispersion& d) const {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) {
        if (amp_[k] == cplx(0.0)) continue;
        const double p = grid_.node(k);
        acc += amp_[k] * std::polar(1.0, p * x - d.energy(p) * t);
    }
    return acc * grid_.spacing() / kTwoPi;
}

cplx WavePacket::position_amplitude(double x) const {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) acc += amp_[k] * std::polar(1.0, grid_.node(k) * x);
    return acc * grid_.spacing() / kTwoPi;
}

WavePacket gaussian_packet(const MomentumGrid& grid, double p0, double dp, double x0) {
    if (!(dp > 0.0) || !std::isfinite(dp)) throw ValidationError("gaussian packet requires dp > 0");
    if (p0 - 5.0 * dp < grid.p_min() || p0 + 5.0 * dp > grid.p_max()) {
        throw ValidationError("gaussian packet p0 +- 5 dp must lie inside the momentum grid");
    }
    const double top = grid.p_min() + grid.spacing() * static_cast<double>(grid.size() - 1);
    const double clipped = 0.5 * std::erfc((p0 - grid.p_min()) / (std::sqrt(2.0) * dp)) +
                           0.5 * std::erfc((top - p0) / (std::sqrt(2.0) * dp));
    if (clipped > 1e-8) {
        throw ValidationError("gaussian packet support clipped by the grid boundary (lost norm " +
                              std::to_string(clipped) + ")");
    }
    std::vector<cplx> amp(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = grid.node(k);
        const double u = (p - p0) / dp;
        amp[k] = std::exp(-0.25 * u * u) * std::polar(1.0, -p * x0);
    }
    return WavePacket(grid, std::move(amp));
}

WavePacket superpose(std::span<const std::pair<cplx, WavePacket>> terms) {
    if (terms.empty()) throw ValidationError("superposition needs at least one term");
    const MomentumGrid grid = terms.front().second.grid();
    std::vector<cplx> amp(grid.size(), 0.0);
    for (const auto& [c, packet] : terms) {
        if (!(packet.grid() == grid)) throw ValidationError("superposed packets must share a grid");
        for (std::size_t k = 0; k < amp.size(); ++k) amp[k] += c * packet[k];
    }
    return WavePacket(grid, std::move(amp));
}

WavePacket evolve(const WavePacket& state, const Dispersion& d, double t) {
    std::vector<cplx> amp = state.amplitudes();
    for (std::size_t k = 0; k < amp.size(); ++k) amp[k] *= std::polar(1.0, -d.energy(state.grid().node(k)) * t);
    return WavePacket::unnormalized(state.grid(), std::move(amp));
}

cplx inner_product(const WavePacket& a, const WavePacket& b) {
    if (!(a.grid() == b.grid())) throw ValidationError("inner product needs a common grid");
    cplx acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
    return acc * a.grid().spacing() / kTwoPi;
}

PositionWaveFunction to_position(const WavePacket& state, double x_center) {
    const auto& g = state.grid();
    const std::size_t n = g.size();
    const double dp = g.spacing();
    std::vector<cplx> buf(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        buf[k] = state[k] * std::polar(sign, static_cast<double>(k) * dp * x_center);
    }
    fft_inplace(buf, FFTW_BACKWARD);
    PositionWaveFunction out{g, x_center, std::move(buf)};
    for (std::size_t j = 0; j < n; ++j) out.values[j] *= std::polar(dp / kTwoPi, g.p_min() * out.x(j));
    return out;
}

WavePacket from_position(const PositionWaveFunction& psi) {
    const auto& g = psi.grid;
    const std::size_t n = g.size();
    if (psi.values.size() != n) throw ValidationError("position samples do not match grid");
    const double dp = g.spacing();
    const double dx = g.position_spacing();
    std::vector<cplx> buf(n);
    for (std::size_t j = 0; j < n; ++j) buf[j] = psi.values[j] * std::polar(dx, -g.p_min() * psi.x(j));
    fft_inplace(buf, FFTW_FORWARD);
    for (std::size_t k = 0; k < n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        buf[k] *= std::polar(sign, -static_cast<double>(k) * dp * psi.x_center);
    }
    return WavePacket::unnormalized(g, std::move(buf));
}

double position_mean(const WavePacket& state, double x_center) {
    const auto psi = to_position(state, x_center);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < psi.values.size(); ++j) {
        const double w = std::norm(psi.values[j]);
        num += w * psi.x(j);
        den += w;
    }
    return num / den;
}

MixedState::MixedState(std::vector<std::pair<double, WavePacket>> components, const Tolerances& tol)
    : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("mixed state needs at least one component");
    double total = 0.0;
    for (const auto& [w, packet] : components_) {
        if (!(w >= 0.0)) throw ValidationError("mixture weights must be >= 0");
        if (!(packet.grid() == components_.front().second.grid())) {
            throw ValidationError("mixture components must share a grid");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > tol.weights) throw ValidationError("mixture weights must sum to 1");
}

std::vector<double> uniform_nodes(double lo, double hi, std::size_t n) {
    if (n < 2) throw ValidationError("uniform node set needs at least 2 points");
    std::vector<double> out(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + h * static_cast<double>(k);
    out.back() = hi;
    return out;
}

}  // namespace toalab
