#include <cmath>
#include <numbers>

#include "toalab/error.hpp"
#include "toalab/parallel.hpp"
#include "toalab/wavepacket.hpp"

namespace toalab {

WignerField wigner(const WavePacket& state, std::span<const double> x_nodes, std::span<const double> p_nodes) {
    const auto& g = state.grid();
    const double dp = g.spacing();
    const double x_limit = std::numbers::pi / (2.0 * dp);
    for (double x : x_nodes) {
        if (!(std::abs(x) < x_limit)) {
            throw ValidationError("Wigner x node " + std::to_string(x) + " outside the resolvable cell |x| < " +
                                  std::to_string(x_limit));
        }
    }
    std::vector<std::size_t> p_index(p_nodes.size());
    for (std::size_t i = 0; i < p_nodes.size(); ++i) p_index[i] = g.index_of(p_nodes[i]);

    // Restrict the xi sum to the numerical support of the state.
    double peak = 0.0;
    for (const auto& a : state.amplitudes()) peak = std::max(peak, std::norm(a));
    std::size_t lo = g.size(), hi = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::norm(state[k]) > 1e-32 * peak) {
            lo = std::min(lo, k);
            hi = k;
        }
    }

    WignerField out;
    out.x.assign(x_nodes.begin(), x_nodes.end());
    out.p.assign(p_nodes.begin(), p_nodes.end());
    out.values.assign(out.x.size() * out.p.size(), 0.0);
    std::vector<double> row_imag(out.p.size(), 0.0);
    const std::size_t nx = out.x.size();

    // xi = 2 k dp, dxi / 2pi = dp / pi.
    parallel_for(out.p.size(), [&](std::size_t ip) {
        const std::size_t j = p_index[ip];
        if (lo > hi || j < lo || j > hi) return;
        const std::size_t reach = std::min(j - lo, hi - j);
        std::vector<cplx> c(reach + 1);
        for (std::size_t k = 0; k <= reach; ++k) c[k] = state[j + k] * std::conj(state[j - k]);
        std::vector<cplx> c_neg(reach + 1);
        for (std::size_t k = 0; k <= reach; ++k) c_neg[k] = state[j - k] * std::conj(state[j + k]);
        double worst = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const cplx z = std::polar(1.0, 2.0 * dp * out.x[ix]);
            const cplx zc = std::conj(z);
            cplx pos = 0.0, neg = 0.0;
            for (std::size_t k = reach; k >= 1; --k) {
                pos = (pos + c[k]) * z;
                neg = (neg + c_neg[k]) * zc;
            }
            const cplx total = c[0] + pos + neg;
            out.values[ip * nx + ix] = total.real() * dp / std::numbers::pi;
            worst = std::max(worst, std::abs(total.imag()) * dp / std::numbers::pi);
        }
        row_imag[ip] = worst;
    });
    for (double v : row_imag) out.max_imag = std::max(out.max_imag, v);
    return out;
}

}  // namespace toalab
