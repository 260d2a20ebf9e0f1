#include "toalab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "toalab/error.hpp"

namespace toalab {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ValidationError(name + ": expected a non-empty list of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ValidationError(name + ": matrix must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ValidationError(name + ": entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
}

json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + ": invalid JSON: " + e.what());
    }
}

void check_schema(const json& j, const std::string& what) {
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
        throw ValidationError(what + ": unsupported schema_version");
    }
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::size_t columns, const std::string& what) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(what + ": empty CSV");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ValidationError(what + ": malformed number '" + cell + "'");
            }
        }
        if (row.size() != columns) throw ValidationError(what + ": expected " + std::to_string(columns) + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string to_string(InitialSupport support) {
    switch (support) {
        case InitialSupport::pre_transition: return "pre_transition";
        case InitialSupport::post_event: return "post_event";
        case InitialSupport::unconstrained: return "unconstrained";
    }
    return "unknown";
}

InitialSupport initial_support_from_string(const std::string& name) {
    if (name == "pre_transition") return InitialSupport::pre_transition;
    if (name == "post_event") return InitialSupport::post_event;
    if (name == "unconstrained") return InitialSupport::unconstrained;
    throw ValidationError("unknown initial_support '" + name + "'");
}

std::string transition_system_to_json(const TransitionSystem& system) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["hamiltonian"] = matrix_to_json(system.hamiltonian());
    j["projector_P"] = matrix_to_json(system.projector_p());
    j["rho0"] = matrix_to_json(system.rho0_input());
    json outcomes = json::array();
    for (const auto& o : system.outcomes()) outcomes.push_back({{"label", o.label}, {"operator", matrix_to_json(o.op)}});
    j["outcomes"] = std::move(outcomes);
    if (system.has_split()) {
        j["h0"] = matrix_to_json(system.split().free);
        j["h_int"] = matrix_to_json(system.split().interaction);
    }
    j["exclusive_outcomes"] = system.options().exclusive_outcomes;
    j["initial_support"] = to_string(system.options().initial_support);
    return j.dump(2);
}

TransitionSystem transition_system_from_json(const std::string& text, const TransitionSystemOptions& defaults) {
    const json j = parse(text, "transition system");
    if (!j.is_object()) throw ValidationError("transition system: expected a JSON object");
    reject_unknown(j,
                   {"schema_version", "hamiltonian", "projector_P", "outcomes", "rho0", "h0", "h_int",
                    "exclusive_outcomes", "initial_support"},
                   "transition system");
    check_schema(j, "transition system");
    for (const char* key : {"hamiltonian", "projector_P", "outcomes", "rho0"}) {
        if (!j.contains(key)) throw ValidationError(std::string("transition system: missing '") + key + "'");
    }
    TransitionSystemOptions options = defaults;
    if (j.contains("exclusive_outcomes")) options.exclusive_outcomes = j.at("exclusive_outcomes").get<bool>();
    if (j.contains("initial_support")) {
        options.initial_support = initial_support_from_string(j.at("initial_support").get<std::string>());
    }
    std::vector<Outcome> outcomes;
    if (!j.at("outcomes").is_array()) throw ValidationError("transition system: outcomes must be a list");
    for (const auto& o : j.at("outcomes")) {
        reject_unknown(o, {"label", "operator"}, "outcome");
        if (!o.contains("label") || !o.contains("operator")) throw ValidationError("outcome needs label and operator");
        outcomes.push_back({o.at("label").get<std::string>(), matrix_from_json(o.at("operator"), "outcome operator")});
    }
    std::optional<HamiltonianSplit> split;
    if (j.contains("h0") != j.contains("h_int")) throw ValidationError("transition system: h0 and h_int come together");
    if (j.contains("h0")) split = HamiltonianSplit{matrix_from_json(j.at("h0"), "h0"), matrix_from_json(j.at("h_int"), "h_int")};
    try {
        return TransitionSystem(matrix_from_json(j.at("hamiltonian"), "hamiltonian"),
                                matrix_from_json(j.at("projector_P"), "projector_P"), std::move(outcomes),
                                matrix_from_json(j.at("rho0"), "rho0"), std::move(split), options);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("transition system: ") + e.what());
    }
}

std::string wavepacket_to_csv(const WavePacket& state) {
    std::string out = "p,re,im\n";
    for (std::size_t k = 0; k < state.size(); ++k) {
        out += format_double(state.grid().node(k)) + ',' + format_double(state[k].real()) + ',' +
               format_double(state[k].imag()) + '\n';
    }
    return out;
}

WavePacket wavepacket_from_csv(const std::string& text) {
    const auto rows = parse_csv(text, 3, "wave packet CSV");
    if (rows.size() < 2) throw ValidationError("wave packet CSV: at least two rows are required");
    const double dp = (rows.back()[0] - rows.front()[0]) / static_cast<double>(rows.size() - 1);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (std::abs(rows[k][0] - rows[k - 1][0] - dp) > 1e-9 * std::abs(dp)) {
            throw ValidationError("wave packet CSV: momenta must be uniformly spaced");
        }
    }
    MomentumGrid grid(rows.front()[0], rows.back()[0] + dp, rows.size());
    std::vector<cplx> amp;
    amp.reserve(rows.size());
    for (const auto& r : rows) amp.emplace_back(r[1], r[2]);
    // Keep stored bits when the file is already normalized.
    WavePacket raw = WavePacket::unnormalized(grid, amp);
    if (std::abs(raw.norm() - 1.0) <= Tolerances{}.norm) return raw;
    return WavePacket(grid, std::move(amp));
}

std::string to_string(Sampling sampling) { return sampling == Sampling::point ? "point" : "cell_average"; }

Sampling sampling_from_string(const std::string& name) {
    if (name == "point") return Sampling::point;
    if (name == "cell_average") return Sampling::cell_average;
    throw ValidationError("unknown sampling '" + name + "'");
}

std::string density_to_csv(const ToADensity& density) {
    std::string out = "t,value\n";
    for (std::size_t k = 0; k < density.values.size(); ++k) {
        out += format_double(density.grid.node(k)) + ',' + format_double(density.values[k]) + '\n';
    }
    return out;
}

std::string density_sidecar(const ToADensity& density, const std::string& metadata_json) {
    const json metadata = parse(metadata_json, "density metadata");
    if (!metadata.is_object()) throw ValidationError("density metadata must be a JSON object");
    const auto& d = density.diagnostics;
    json j{{"schema_version", kSchemaVersion},
           {"t_min", density.grid.t_min()},
           {"t_max", density.grid.t_max()},
           {"n_points", density.grid.size()},
           {"L", density.L},
           {"sampling", to_string(density.sampling)},
           {"conditioned", density.conditioned},
           {"normalization", density.normalization},
           {"diagnostics",
            {{"min", d.min_value},
             {"max", d.max_value},
             {"max_abs_imag", d.max_abs_imag},
             {"lost_mass", d.lost_mass},
             {"negative_excursion", d.negative_excursion}}},
           {"metadata", metadata}};
    return j.dump(2);
}

ToADensity density_from_files(const std::string& csv, const std::string& sidecar) {
    const json j = parse(sidecar, "density sidecar");
    if (!j.is_object()) throw ValidationError("density sidecar: expected a JSON object");
    check_schema(j, "density sidecar");
    try {
        const TimeGrid grid(j.at("t_min").get<double>(), j.at("t_max").get<double>(), j.at("n_points").get<std::size_t>());
        const auto rows = parse_csv(csv, 2, "density CSV");
        if (rows.size() != grid.size()) throw ValidationError("density CSV: row count does not match the sidecar grid");
        std::vector<double> values;
        values.reserve(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (std::abs(rows[k][0] - grid.node(k)) > 1e-9 * std::max(1.0, std::abs(grid.node(k)))) {
                throw ValidationError("density CSV: time column does not match the sidecar grid");
            }
            values.push_back(rows[k][1]);
        }
        ToADensity d = make_density(grid, std::move(values), j.value("L", 0.0),
                                    sampling_from_string(j.value("sampling", std::string("point"))));
        d.conditioned = j.value("conditioned", false);
        return d;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("density sidecar: ") + e.what());
    }
}

}  // namespace toalab
