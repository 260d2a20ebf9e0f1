#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "toalab/dispersion.hpp"
#include "toalab/hilbert.hpp"
#include "toalab/models.hpp"
#include "toalab/oscillations.hpp"
#include "toalab/toa.hpp"
#include "toalab/wavepacket.hpp"

using namespace toalab;

namespace {

void restricted_propagator_band(benchmark::State& state) {
    models::DephasingBandParams params;
    params.band_levels = state.range(0);
    const TransitionSystem system = models::dephasing_band(params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(restricted_propagator(system, 2.0, 1024).value);
    }
}
BENCHMARK(restricted_propagator_band)->Arg(21)->Arg(101)->Unit(benchmark::kMillisecond);

void kijowski(benchmark::State& state) {
    const MomentumGrid grid(2.5, 7.5, static_cast<std::size_t>(state.range(0)));
    const WavePacket psi = gaussian_packet(grid, 5.0, 0.25);
    const TimeGrid times(0.0, 20.0, 201);
    const Dispersion d = Dispersion::nonrelativistic(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kijowski_density(psi, d, 50.0, times).values);
    }
}
BENCHMARK(kijowski)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void wigner_field(benchmark::State& state) {
    const MomentumGrid grid(2.5, 7.5, 256);
    const WavePacket psi = gaussian_packet(grid, 5.0, 0.25);
    const auto x = uniform_nodes(-20.0, 20.0, static_cast<std::size_t>(state.range(0)));
    std::vector<double> p(grid.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = grid.node(k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wigner(psi, x, p).values);
    }
}
BENCHMARK(wigner_field)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);

void oscillation_point(benchmark::State& state) {
    ComplexMatrix u(2, 2);
    const double c = std::cos(std::numbers::pi / 4);
    u << c, c, -c, c;
    const DecoherenceKernel kernels[] = {DecoherenceKernel::delta(), DecoherenceKernel::constant(),
                                         DecoherenceKernel::gaussian(10.0)};
    const OscillationScenario s({std::sqrt(1.25), 0.5}, u, {10.0, 10.0}, Envelope(EnvelopeShape::exponential, 50.0),
                                0.0, kernels[state.range(0)]);
    for (auto _ : state) {
        benchmark::DoNotOptimize(oscillation_probability(s, 0, 0, 1000.0).value);
    }
    state.SetLabel(to_string(s.kernel().kind));
}
BENCHMARK(oscillation_point)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
