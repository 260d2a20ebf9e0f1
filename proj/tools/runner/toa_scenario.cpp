#include <cmath>
#include <optional>

#include "plans.hpp"
#include "toalab/detectors.hpp"
#include "toalab/error.hpp"
#include "toalab/io.hpp"

namespace toalab::runner {

namespace {

CouplingFunction coupling(const Node& node) {
    const std::string family = node.text("family");
    std::optional<CouplingFunction> u;
    if (family == "constant") {
        u = CouplingFunction::constant(node.number("amplitude"));
    } else if (family == "gaussian") {
        u = CouplingFunction::gaussian(node.number("amplitude"), node.number("center"), node.positive("width"));
    } else if (family == "power_law") {
        u = CouplingFunction::power_law(node.number("amplitude"), node.number("exponent"));
    } else if (family == "tabulated") {
        std::vector<cplx> values;
        const json& v = node.raw("values");
        if (!v.is_array()) node.fail("values", "expected a list");
        for (const auto& e : v) values.push_back(complex_entry(e, node.path() + ".values"));
        u = CouplingFunction::tabulated(node.numbers("p"), std::move(values));
    } else {
        node.fail("family", "unknown coupling family '" + family + "'");
    }
    if (auto phase = node.optional_child("phase")) {
        u = u->with_phase(phase->number_or("theta0", 0.0), phase->number_or("theta1", 0.0));
        phase->finish();
    }
    node.finish();
    return *u;
}

DensityOfStates density_of_states(const Node& node) {
    const std::string family = node.text("family");
    std::optional<DensityOfStates> w;
    if (family == "constant") {
        w = DensityOfStates::constant(node.number("w0"));
    } else if (family == "power_law") {
        w = DensityOfStates::power_law(node.number("w0"), node.number("exponent"));
    } else if (family == "step") {
        w = DensityOfStates::step(node.number("w0"), node.number("threshold"));
    } else {
        node.fail("family", "unknown density-of-states family '" + family + "'");
    }
    node.finish();
    return *w;
}

enum class Method { kijowski, absorption, kernel, current };

Method method_from(const Node& root) {
    const std::string m = root.text("method");
    if (m == "kijowski") return Method::kijowski;
    if (m == "absorption") return Method::absorption;
    if (m == "kernel") return Method::kernel;
    if (m == "current") return Method::current;
    root.fail("method", "expected kijowski, absorption, kernel or current");
}

const char* method_name(Method m) {
    switch (m) {
        case Method::kijowski: return "kijowski";
        case Method::absorption: return "absorption";
        case Method::kernel: return "kernel";
        case Method::current: return "current";
    }
    return "unknown";
}

json state_json(const WavePacket& psi) {
    return {{"norm", psi.norm()},
            {"mean_momentum", psi.mean_momentum()},
            {"momentum_variance", psi.momentum_variance()},
            {"nonpositive_fraction", psi.nonpositive_fraction()}};
}

json window_checked_integral(const ToADensity& d) {
    try {
        return time_integrated(d);
    } catch (const ValidationError&) {
        return nullptr;
    }
}

class ToaPlan final : public Plan {
public:
    ToaPlan(const Node& root, const Context&)
        : method_(method_from(root)),
          psi_(wave_packet(root.child("state"))),
          p0_(leading_momentum(root.child("state"))),
          d_(dispersion(root.child("dispersion"))),
          L_(root.number("L")),
          times_(time_grid(root.child("times"))) {
        if (root.has("detector")) model_ = detector_model(root.child("detector"), L_);
        root.touch("detector");
        if (method_ == Method::kernel && !model_) root.fail("detector", "required by the kernel method");
        if (method_ == Method::absorption) alpha_ = absorption_coefficient(root.child("absorption"), model_, d_);
        root.touch("absorption");
        if (method_ == Method::current && d_.kind() != DispersionKind::nonrelativistic) {
            root.fail("dispersion", "the probability current needs a nonrelativistic dispersion");
        }
        if ((method_ == Method::kijowski || method_ == Method::absorption) && !psi_.has_positive_support()) {
            root.fail("state", "positive-momentum support is required (fraction at p <= 0 is " +
                                   format_double(psi_.nonpositive_fraction()) + ")");
        }
        condition_ = root.flag_or("condition", false);
        refinement_ = root.count_or("refinement", 0);
        if (model_) model_->validate();
    }

    void execute(Writer& out) const override {
        const TimeGrid grid = refinement_ > 0 ? cell_refinement(times_, refinement_) : times_;
        ToADensity d = compute(grid);
        if (refinement_ > 0) d = average_cells(d, times_, refinement_);
        json& report = out.report();
        report["method"] = method_name(method_);
        report["L"] = L_;
        report["dispersion"] = to_string(d_.kind());
        report["state"] = state_json(psi_);
        report["normalization"] = d.normalization;
        report["time_integrated"] = window_checked_integral(d);
        report["argmax_t"] = times_.node(argmax(d));
        report["stationary_phase_t"] = L_ / d_.velocity(p0_);
        report["diagnostics"] = diagnostics_json(d.diagnostics);
        if (model_) {
            const DetectorDiagnostics dd = diagnose(*model_, psi_, d_);
            report["detector"] = {{"kind", to_string(model_->kind)},
                                  {"coherent_validity", dd.coherent_validity},
                                  {"diffusion_ratio", dd.diffusion_ratio},
                                  {"decoherence_time", dd.decoherence_time}};
            if (method_ == Method::kernel) report["analytic_time_integrated"] = analytic_time_integrated(psi_, *model_, d_);
        }
        if (condition_) d = condition(d);
        report["conditioned"] = condition_;
        out.density("density", d, {{"method", method_name(method_)}});
    }

private:
    ToADensity compute(const TimeGrid& grid) const {
        switch (method_) {
            case Method::kijowski: return kijowski_density(psi_, d_, L_, grid);
            case Method::absorption: return toa_density_absorption(psi_, *alpha_, d_, L_, grid);
            case Method::kernel: return toa_density_kernel(psi_, *model_, d_, grid);
            case Method::current: return probability_current(psi_, d_.mass(), L_, grid);
        }
        throw ValidationError("unknown method");
    }

    Method method_;
    WavePacket psi_;
    double p0_;
    Dispersion d_;
    double L_;
    TimeGrid times_;
    std::optional<DetectorModel> model_;
    std::optional<AbsorptionCoefficient> alpha_;
    bool condition_ = false;
    std::size_t refinement_ = 0;
};

class ClassicalComparePlan final : public Plan {
public:
    ClassicalComparePlan(const Node& root, const Context&)
        : psi_(wave_packet(root.child("state"))),
          d_(dispersion(root.child("dispersion"))),
          L_(root.number("L")),
          times_(time_grid(root.child("times"))),
          alpha_(AbsorptionCoefficient::constant(1.0)) {
        if (root.has("detector")) model_ = detector_model(root.child("detector"), L_);
        root.touch("detector");
        if (root.has("absorption")) alpha_ = absorption_coefficient(root.child("absorption"), model_, d_);
        root.touch("absorption");
        const Node w = root.child("wigner");
        x_nodes_ = uniform_nodes(w.number("x_min"), w.number("x_max"), w.count("n_x"));
        w.finish();
        refinement_ = root.count_or("refinement", 4);
        if (refinement_ < 1) root.fail("refinement", "must be >= 1");
        const std::string dep = root.text_or("deposition", "overlap");
        if (dep == "overlap") {
            deposition_ = Deposition::overlap;
        } else if (dep == "nearest") {
            deposition_ = Deposition::nearest;
        } else {
            root.fail("deposition", "expected overlap or nearest");
        }
        if (!psi_.has_positive_support()) root.fail("state", "positive-momentum support is required");
    }

    void execute(Writer& out) const override {
        const ToADensity quantum = average_cells(
            toa_density_absorption(psi_, alpha_, d_, L_, cell_refinement(times_, refinement_)), times_, refinement_);
        std::vector<double> p_nodes;
        for (std::size_t k = 0; k < psi_.size(); ++k) p_nodes.push_back(psi_.grid().node(k));
        const WignerField w = wigner(psi_, x_nodes_, p_nodes);
        const SemiclassicalResult sc = semiclassical_expansion(w, alpha_, d_, L_, times_, deposition_);

        out.density("quantum", quantum, {{"quantity", "quantum"}});
        out.density("classical", sc.classical, {{"quantity", "classical"}});
        out.density("correction", sc.correction, {{"quantity", "semiclassical_correction"}});
        out.density("semiclassical", sc.corrected, {{"quantity", "semiclassical"}});

        auto metrics = [](const ComparisonReport& r) {
            return json{{"tv_distance", r.tv_distance},
                        {"max_abs_difference", r.max_abs_difference},
                        {"argmax_shift", r.argmax_shift}};
        };
        json& report = out.report();
        report["L"] = L_;
        report["state"] = state_json(psi_);
        report["wigner_max_imag"] = w.max_imag;
        report["classical_lost_mass"] = sc.classical.diagnostics.lost_mass;
        report["correction_integral"] = sc.correction.normalization;
        report["quantum_vs_classical"] = metrics(compare(quantum, sc.classical));
        report["quantum_vs_semiclassical"] = metrics(compare(quantum, sc.corrected));
    }

private:
    WavePacket psi_;
    Dispersion d_;
    double L_;
    TimeGrid times_;
    std::optional<DetectorModel> model_;
    AbsorptionCoefficient alpha_;
    std::vector<double> x_nodes_;
    std::size_t refinement_ = 4;
    Deposition deposition_ = Deposition::overlap;
};

}  // namespace

DetectorModel detector_model(const Node& node, double L) {
    const std::string kind = node.text("kind");
    const double delta = node.positive("delta");
    const CouplingFunction u = coupling(node.child("coupling"));
    std::optional<DetectorModel> m;
    if (kind == "coherent") {
        m = DetectorModel::coherent(node.positive("mu_star"), node.number_or("E0", 0.0), delta, u, L);
    } else if (kind == "decoherent") {
        m = DetectorModel::decoherent(node.positive("mu_star"), node.positive("diffusion"), delta, u, L);
    } else if (kind == "energy") {
        m = DetectorModel::energy(density_of_states(node.child("density_of_states")), delta, u, L);
    } else {
        node.fail("kind", "expected coherent, decoherent or energy");
    }
    m->keep_phase = node.flag_or("keep_phase", true);
    m->singular_exclusion = node.number_or("singular_exclusion", 0.0);
    node.finish();
    m->validate();
    return *m;
}

AbsorptionCoefficient absorption_coefficient(const Node& node, const std::optional<DetectorModel>& model,
                                             const Dispersion& d) {
    const std::string family = node.text("family");
    std::optional<AbsorptionCoefficient> a;
    if (family == "constant") {
        a = AbsorptionCoefficient::constant(node.number("value"));
    } else if (family == "power_law") {
        a = AbsorptionCoefficient::power_law(node.number("value"), node.number("exponent"));
    } else if (family == "detector") {
        if (!model) node.fail("family", "'detector' needs a detector block");
        a = absorption(*model, d);
    } else {
        node.fail("family", "expected constant, power_law or detector");
    }
    node.finish();
    return *a;
}

json diagnostics_json(const DensityDiagnostics& d) {
    return {{"min", d.min_value},
            {"max", d.max_value},
            {"max_abs_imag", d.max_abs_imag},
            {"lost_mass", d.lost_mass},
            {"negative_excursion", d.negative_excursion}};
}

std::unique_ptr<Plan> plan_toa(const Node& root, const Context& ctx) { return std::make_unique<ToaPlan>(root, ctx); }

std::unique_ptr<Plan> plan_classical_compare(const Node& root, const Context& ctx) {
    return std::make_unique<ClassicalComparePlan>(root, ctx);
}

}  // namespace toalab::runner
