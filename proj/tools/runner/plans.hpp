#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "toalab/toa.hpp"

namespace toalab::runner {

// Collects artifacts for one run; files are written in call order.
class Writer {
public:
    explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void text(const std::string& name, const std::string& contents);
    // name.csv plus name.json sidecar
    void density(const std::string& name, const ToADensity& d, const json& metadata = json::object());
    // name.csv with columns L, P plus name.json sidecar
    void sweep(const std::string& name, const std::vector<double>& L, const std::vector<double>& P,
               const json& metadata = json::object());

    json& report() { return report_; }
    const std::vector<std::filesystem::path>& artifacts() const { return artifacts_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> artifacts_;
    json report_ = json::object();
};

struct Context {
    Tolerances tolerances;
    std::uint64_t seed = 0;
};

// A fully validated scenario; constructing one never starts the computation.
class Plan {
public:
    virtual ~Plan() = default;
    virtual void execute(Writer& out) const = 0;
};

std::unique_ptr<Plan> plan_transition(const Node& root, const Context& ctx);
std::unique_ptr<Plan> plan_toa(const Node& root, const Context& ctx);
std::unique_ptr<Plan> plan_classical_compare(const Node& root, const Context& ctx);
std::unique_ptr<Plan> plan_oscillation(const Node& root, const Context& ctx);

// Shared by the toa and classical-compare kinds.
AbsorptionCoefficient absorption_coefficient(const Node& node, const std::optional<DetectorModel>& model,
                                             const Dispersion& d);
DetectorModel detector_model(const Node& node, double L);

json diagnostics_json(const DensityDiagnostics& d);

}  // namespace toalab::runner
