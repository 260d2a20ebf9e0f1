#include <optional>

#include "plans.hpp"
#include "toalab/error.hpp"
#include "toalab/hilbert.hpp"
#include "toalab/io.hpp"
#include "toalab/models.hpp"
#include "toalab/parallel.hpp"

namespace toalab::runner {

namespace {

TransitionSystem build_system(const Node& root, const Context& ctx) {
    if (root.has("system") == root.has("model")) {
        throw ValidationError("config: exactly one of 'system' and 'model' must be given");
    }
    if (root.has("system")) {
        TransitionSystemOptions options;
        options.tolerances = ctx.tolerances;
        root.touch("model");
        return transition_system_from_json(root.raw("system").dump(), options);
    }
    root.touch("system");
    const Node m = root.child("model");
    const std::string family = m.text("family");
    if (family == "two_level") {
        const double eps = m.number("eps");
        const double g = m.number("g");
        m.finish();
        return models::two_level(eps, g);
    }
    if (family == "random_perturbative") {
        models::RandomPerturbativeParams p;
        p.dim = static_cast<Eigen::Index>(m.count_or("dim", static_cast<std::size_t>(p.dim)));
        p.event_dim = static_cast<Eigen::Index>(m.count_or("event_dim", static_cast<std::size_t>(p.event_dim)));
        p.epsilon = m.number_or("epsilon", p.epsilon);
        p.seed = ctx.seed;
        m.finish();
        return models::random_perturbative(p);
    }
    if (family == "dephasing_band") {
        models::DephasingBandParams p;
        p.band_levels = static_cast<Eigen::Index>(m.count_or("band_levels", static_cast<std::size_t>(p.band_levels)));
        p.bandwidth = m.number_or("bandwidth", p.bandwidth);
        p.band_extent = m.number_or("band_extent", p.band_extent);
        p.coupling = m.number_or("coupling", p.coupling);
        p.level_energy = m.number_or("level_energy", p.level_energy);
        m.finish();
        return models::dephasing_band(p);
    }
    m.fail("family", "unknown model family '" + family + "'");
}

struct DensityRequest {
    TimeGrid times;
    std::optional<SmearingKernel> kernel;
    std::optional<double> window;
};

struct PovmRequest {
    TimeGrid times;
    SmearingKernel kernel;
};

struct Interval {
    double t1, t2, t3;
};

class TransitionPlan final : public Plan {
public:
    TransitionPlan(const Node& root, const Context& ctx) : system_(build_system(root, ctx)) {
        label_ = root.text("outcome");
        system_.outcome(label_);
        steps_ = root.count_or("steps", kDefaultTrotterSteps);
        points_ = root.count_or("quadrature_points", 201);
        if (steps_ < 1) root.fail("steps", "must be >= 1");
        if (points_ < 2) root.fail("quadrature_points", "must be >= 2");
        if (auto d = root.optional_child("density")) {
            TimeGrid times = time_grid(d->child("times"));
            std::optional<SmearingKernel> kernel;
            if (d->has("sigma")) kernel.emplace(d->positive("sigma"));
            std::optional<double> window;
            if (d->has("window")) window = d->positive("window");
            if (!kernel && !window) d->fail("window", "required when sigma is not set (sigma -> infinity mode)");
            if (times.t_min() < 0.0) d->fail("times", "transition densities need t >= 0");
            d->finish();
            density_ = DensityRequest{times, kernel, window};
        }
        if (auto p = root.optional_child("povm")) {
            TimeGrid times = time_grid(p->child("times"));
            SmearingKernel kernel(p->positive("sigma"));
            p->finish();
            povm_ = PovmRequest{times, kernel};
        }
        root.touch("intervals");
        if (root.has("intervals")) {
            const json& list = root.raw("intervals");
            if (!list.is_array()) root.fail("intervals", "expected a list of [t1, t2, t3]");
            for (const auto& e : list) {
                if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number()) {
                    root.fail("intervals", "expected a list of [t1, t2, t3]");
                }
                Interval iv{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
                if (!(iv.t1 < iv.t2 && iv.t2 < iv.t3)) root.fail("intervals", "need t1 < t2 < t3");
                intervals_.push_back(iv);
            }
        }
        if (root.has("propagator_times")) propagator_times_ = root.numbers("propagator_times");
        root.touch("propagator_times");
    }

    void execute(Writer& out) const override {
        json& report = out.report();
        report["system"] = {{"dimension", system_.dim()},
                            {"outcome", label_},
                            {"initial_support", to_string(system_.options().initial_support)},
                            {"initial_projection_loss", system_.initial_projection_loss()}};
        report["steps"] = steps_;
        report["quadrature_points"] = points_;

        json props = json::array();
        for (double t : propagator_times_) {
            const RestrictedPropagator s = restricted_propagator(system_, t, steps_);
            props.push_back({{"t", t}, {"convergence_estimate", s.convergence_estimate}});
        }
        report["propagator"] = props;

        if (density_) {
            const TimeGrid& g = density_->times;
            std::vector<TransitionDensity> values(g.size());
            parallel_for(g.size(), [&](std::size_t k) {
                values[k] = transition_density(system_, label_, g.node(k), density_->kernel, steps_, points_,
                                               density_->window);
            });
            std::vector<double> re;
            double imag = 0.0;
            for (const auto& v : values) {
                re.push_back(v.value);
                imag = std::max(imag, std::abs(v.imag));
            }
            ToADensity d = make_density(g, std::move(re), 0.0);
            d.diagnostics.max_abs_imag = imag;
            json meta{{"quantity", "transition_density"}, {"outcome", label_}};
            meta["sigma"] = density_->kernel ? json(density_->kernel->sigma()) : json(nullptr);
            meta["window"] = density_->window ? json(*density_->window) : json(nullptr);
            out.density("transition_density", d, meta);
            report["density"] = {{"normalization", d.normalization}, {"diagnostics", diagnostics_json(d.diagnostics)}};
        }

        if (povm_) {
            json rows = json::array();
            double worst = INFINITY;
            for (std::size_t k = 0; k < povm_->times.size(); ++k) {
                const double t = povm_->times.node(k);
                const ComplexMatrix pi = smeared_povm_element(system_, label_, t, povm_->kernel, steps_, points_);
                const double lowest = min_eigenvalue(pi);
                worst = std::min(worst, lowest);
                rows.push_back({{"t", t}, {"min_eigenvalue", lowest}, {"trace", pi.trace().real()}});
            }
            report["povm"] = {{"sigma", povm_->kernel.sigma()}, {"min_eigenvalue", worst}, {"elements", rows}};
        }

        json ivs = json::array();
        for (const Interval& iv : intervals_) {
            const double p12 = detection_probability_interval(system_, label_, iv.t1, iv.t2, steps_, points_);
            const double p23 = detection_probability_interval(system_, label_, iv.t2, iv.t3, steps_, points_);
            const double p13 = detection_probability_interval(system_, label_, iv.t1, iv.t3, steps_, points_);
            const double off = consistency_offdiagonal(system_, label_, iv.t1, iv.t2, iv.t3, steps_, points_);
            ivs.push_back({{"t1", iv.t1},
                           {"t2", iv.t2},
                           {"t3", iv.t3},
                           {"p_12", p12},
                           {"p_23", p23},
                           {"p_13", p13},
                           {"offdiagonal", off},
                           {"relative_offdiagonal", (p12 + p23) > 0.0 ? std::abs(off) / (p12 + p23) : 0.0},
                           {"additivity_defect", p13 - p12 - p23 - off}});
        }
        report["intervals"] = ivs;
    }

private:
    TransitionSystem system_;
    std::string label_;
    std::size_t steps_ = kDefaultTrotterSteps;
    std::size_t points_ = 201;
    std::optional<DensityRequest> density_;
    std::optional<PovmRequest> povm_;
    std::vector<Interval> intervals_;
    std::vector<double> propagator_times_;
};

}  // namespace

std::unique_ptr<Plan> plan_transition(const Node& root, const Context& ctx) {
    return std::make_unique<TransitionPlan>(root, ctx);
}

}  // namespace toalab::runner
