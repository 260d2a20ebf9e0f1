#include <cmath>
#include <optional>

#include "plans.hpp"
#include "toalab/error.hpp"
#include "toalab/oscillations.hpp"

namespace toalab::runner {

namespace {

Envelope envelope(const Node& node) {
    const std::string shape = node.text_or("shape", "gaussian");
    const double sigma = node.positive("sigma_x");
    node.finish();
    if (shape == "gaussian") return Envelope(EnvelopeShape::gaussian, sigma);
    if (shape == "exponential") return Envelope(EnvelopeShape::exponential, sigma);
    node.fail("shape", "expected gaussian or exponential");
}

DecoherenceKernel decoherence_kernel(const Node& node) {
    const std::string kind = node.text("kind");
    const double f0 = node.number_or("f0", 1.0);
    std::optional<DecoherenceKernel> k;
    if (kind == "delta") {
        k = DecoherenceKernel::delta(f0);
    } else if (kind == "constant") {
        k = DecoherenceKernel::constant(f0);
    } else if (kind == "gaussian") {
        k = DecoherenceKernel::gaussian(node.positive("tau_dec"), f0);
    } else {
        node.fail("kind", "expected delta, constant or gaussian");
    }
    node.finish();
    return *k;
}

MeanVelocity mean_velocity(const Node& root) {
    const std::string m = root.text_or("mean_velocity", "arithmetic");
    if (m == "arithmetic") return MeanVelocity::arithmetic;
    if (m == "geometric") return MeanVelocity::geometric;
    root.fail("mean_velocity", "expected arithmetic or geometric");
}

OscillationScenario scenario(const Node& root, const Context& ctx) {
    return OscillationScenario(root.numbers("masses"), complex_matrix(root.raw("mixing"), root.path() + ".mixing", false),
                               root.numbers("momenta"), envelope(root.child("envelope")), root.number_or("E0", 0.0),
                               decoherence_kernel(root.child("kernel")), mean_velocity(root), ctx.tolerances);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class OscillationPlan final : public Plan {
public:
    OscillationPlan(const Node& root, const Context& ctx) : s_(scenario(root, ctx)) {
        if (auto f = root.optional_child("flavors")) {
            alpha_ = f->count_or("alpha", 0);
            beta_ = f->count_or("beta", 0);
            f->finish();
        }
        if (alpha_ >= s_.flavor_count() || beta_ >= s_.flavor_count()) root.fail("flavors", "flavor index out of range");
        const Node sw = root.child("sweep");
        L_ = uniform_nodes(sw.positive("L_min"), sw.positive("L_max"), sw.count("n_points"));
        sw.finish();
        if (auto q = root.optional_child("quadrature")) {
            quad_.period_fraction = q->positive("period_fraction");
            quad_.envelope_fraction = q->positive("envelope_fraction");
            q->finish();
        }
        fit_ = root.flag_or("fit", true);
        const double clipped = s_.envelope().tail_mass(L_.front());
        if (clipped > ctx.tolerances.clipped_mass) {
            root.fail("sweep", "L_min clips " + std::to_string(clipped) + " of the envelope mass (limit " +
                                   std::to_string(ctx.tolerances.clipped_mass) + ")");
        }
    }

    void execute(Writer& out) const override {
        const auto results = oscillation_sweep(s_, alpha_, beta_, L_, quad_);
        std::vector<double> P;
        double imag_ratio = 0.0, clipped = 0.0;
        for (const auto& r : results) {
            P.push_back(r.value);
            if (r.value != 0.0) imag_ratio = std::max(imag_ratio, std::abs(r.imag / r.value));
            clipped = std::max(clipped, r.clipped_mass);
        }
        out.sweep("oscillation", L_, P, {{"alpha", alpha_}, {"beta", beta_}, {"kernel", to_string(s_.kernel().kind)}});

        json& report = out.report();
        report["kernel"] = {{"kind", to_string(s_.kernel().kind)}, {"tau_dec", s_.kernel().tau_dec}, {"f0", s_.kernel().f0}};
        report["envelope"] = {{"shape", to_string(s_.envelope().shape())}, {"sigma_x", s_.envelope().sigma()}};
        report["alpha"] = alpha_;
        report["beta"] = beta_;
        json pairs = json::array();
        double shortest_loc = INFINITY;
        for (std::size_t i = 0; i < s_.mass_count(); ++i) {
            for (std::size_t j = i + 1; j < s_.mass_count(); ++j) {
                const auto ks = standard_wavenumber(s_, i, j);
                const auto kn = nonstandard_wavenumber(s_, i, j);
                const auto loc = localization_length(s_, i, j);
                if (loc) shortest_loc = std::min(shortest_loc, *loc);
                pairs.push_back({{"i", i},
                                 {"j", j},
                                 {"standard", {{"general", ks.general}, {"equal_momentum", optional_number(ks.equal_momentum)}}},
                                 {"nonstandard",
                                  {{"general", kn.general},
                                   {"equal_momentum", optional_number(kn.equal_momentum)},
                                   {"nonrelativistic", optional_number(kn.nonrelativistic)},
                                   {"ultrarelativistic", optional_number(kn.ultrarelativistic)}}},
                                 {"localization_length", optional_number(loc)}});
            }
        }
        report["pairs"] = pairs;
        report["regime"] = {{"momentum_spread", s_.momentum_spread()},
                            {"max_imag_ratio", imag_ratio},
                            {"max_clipped_mass", clipped},
                            {"L_max_over_L_loc", std::isfinite(shortest_loc) ? json(L_.back() / shortest_loc) : json(nullptr)}};
        if (fit_) {
            const WavenumberFit f = fit_wavenumber_detailed(L_, P);
            report["fit"] = {{"wavenumber", f.wavenumber},
                             {"periodogram_wavenumber", f.periodogram_wavenumber},
                             {"periods", f.periods},
                             {"samples_per_period", f.samples_per_period},
                             {"peak_to_floor", f.peak_to_floor}};
        } else {
            report["fit"] = nullptr;
        }
    }

private:
    OscillationScenario s_;
    std::size_t alpha_ = 0, beta_ = 0;
    std::vector<double> L_;
    OscillationQuadrature quad_;
    bool fit_ = true;
};

}  // namespace

std::unique_ptr<Plan> plan_oscillation(const Node& root, const Context& ctx) {
    return std::make_unique<OscillationPlan>(root, ctx);
}

}  // namespace toalab::runner
