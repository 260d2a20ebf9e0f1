#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <system_error>

#include "plans.hpp"
#include "toalab/error.hpp"
#include "toalab/io.hpp"

namespace toalab::runner {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + ": invalid JSON: " + e.what());
    }
}

struct Loaded {
    json document;
    std::string kind;
    std::string description;
    std::unique_ptr<Plan> plan;
};

Loaded load(const fs::path& config, const RunOptions& options) {
    Loaded l;
    l.document = parse_json(read_text_file(config), config.filename().string());
    const Node root(l.document, "config");
    const json& version = root.raw("schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        root.fail("schema_version", "unsupported schema version (expected 1)");
    }
    l.kind = root.text("kind");
    l.description = root.text_or("description", "");
    Context ctx;
    ctx.seed = root.count_or("seed", 20240611);
    ctx.tolerances = tolerances(root.optional_child("tolerances"), options.tolerance_scale);
    try {
        if (l.kind == "transition") {
            l.plan = plan_transition(root, ctx);
        } else if (l.kind == "toa") {
            l.plan = plan_toa(root, ctx);
        } else if (l.kind == "classical-compare") {
            l.plan = plan_classical_compare(root, ctx);
        } else if (l.kind == "oscillation") {
            l.plan = plan_oscillation(root, ctx);
        } else {
            root.fail("kind", "expected transition, toa, classical-compare or oscillation");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    root.finish();
    return l;
}

struct Series {
    std::string axis;
    ToADensity density;
};

// Sweeps over L are compared with the same metrics as densities over t; the axis is carried by
// the sidecar and a mismatch is an error.
Series load_series(const fs::path& csv) {
    fs::path sidecar = csv;
    sidecar.replace_extension(".json");
    const std::string side_text = read_text_file(sidecar);
    const std::string csv_text = read_text_file(csv);
    const json side = parse_json(side_text, sidecar.filename().string());
    if (side.value("axis", std::string("t")) == "L") {
        try {
            const TimeGrid grid(side.at("L_min").get<double>(), side.at("L_max").get<double>(),
                                side.at("n_points").get<std::size_t>());
            json shaped{{"t_min", grid.t_min()}, {"t_max", grid.t_max()}, {"n_points", grid.size()}, {"sampling", "point"}};
            return {"L", density_from_files(csv_text, shaped.dump())};
        } catch (const json::exception& e) {
            throw ValidationError(sidecar.filename().string() + ": " + e.what());
        }
    }
    return {"t", density_from_files(csv_text, side_text)};
}

}  // namespace

void Writer::text(const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    write_text_file(path, contents);
    artifacts_.push_back(path);
}

void Writer::density(const std::string& name, const ToADensity& d, const json& metadata) {
    text(name + ".csv", density_to_csv(d));
    text(name + ".json", density_sidecar(d, metadata.dump()));
}

void Writer::sweep(const std::string& name, const std::vector<double>& L, const std::vector<double>& P,
                   const json& metadata) {
    std::string csv = "L,P\n";
    for (std::size_t k = 0; k < L.size(); ++k) csv += format_double(L[k]) + ',' + format_double(P[k]) + '\n';
    text(name + ".csv", csv);
    const json side{{"schema_version", kSchemaVersion},
                    {"axis", "L"},
                    {"L_min", L.front()},
                    {"L_max", L.back()},
                    {"n_points", L.size()},
                    {"metadata", metadata}};
    text(name + ".json", side.dump(2));
}

std::string validate_scenario(const fs::path& config, const RunOptions& options) {
    return load(config, options).kind;
}

RunResult run_scenario(const fs::path& config, const RunOptions& options) {
    Loaded l = load(config, options);
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec || !fs::is_directory(options.out_dir)) {
        throw IoError("cannot create output directory '" + options.out_dir.string() + "'");
    }
    Writer out(options.out_dir);
    l.plan->execute(out);
    json report{{"schema_version", kSchemaVersion},
                {"scenario", config.filename().string()},
                {"kind", l.kind},
                {"description", l.description},
                {"tolerance_scale", options.tolerance_scale}};
    for (auto& [key, value] : out.report().items()) report[key] = value;
    json files = json::array();
    for (const auto& a : out.artifacts()) files.push_back(a.filename().string());
    report["artifacts"] = files;
    const std::string text = report.dump(2) + "\n";
    out.text("report.json", text);
    return {l.kind, out.artifacts(), text};
}

std::string compare_artifacts(const fs::path& a, const fs::path& b) {
    const Series sa = load_series(a);
    const Series sb = load_series(b);
    if (sa.axis != sb.axis) throw ValidationError("compare: artifacts have different axes (" + sa.axis + " vs " + sb.axis + ")");
    if (!(sa.density.grid == sb.density.grid)) throw ValidationError("compare: grid mismatch between artifacts");
    if (sa.density.sampling != sb.density.sampling) throw ValidationError("compare: sampling conventions differ");
    const ComparisonReport r = compare(sa.density, sb.density);
    const json out{{"a", a.filename().string()},
                   {"b", b.filename().string()},
                   {"axis", sa.axis},
                   {"tv_distance", r.tv_distance},
                   {"max_abs_difference", r.max_abs_difference},
                   {"argmax_shift", r.argmax_shift}};
    return out.dump(2) + "\n";
}

std::vector<ScenarioInfo> list_scenarios(const fs::path& directory) {
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) throw IoError("scenario directory '" + directory.string() + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ScenarioInfo> out;
    for (const auto& f : files) {
        ScenarioInfo info{f.filename().string(), "?", ""};
        try {
            const json j = json::parse(read_text_file(f));
            info.kind = j.value("kind", std::string("?"));
            info.description = j.value("description", std::string());
        } catch (const json::exception&) {
            info.kind = "invalid";
        }
        out.push_back(info);
    }
    return out;
}

}  // namespace toalab::runner
