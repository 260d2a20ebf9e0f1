// End-to-end checks of the toalab-cli executable.
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "toalab/io.hpp"
#include "toalab/quadrature.hpp"
#include "toalab/toa.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string("\"") + TOALAB_CLI + "\" " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const std::string& name) { return (fs::path(TOALAB_SCENARIO_DIR) / name).string(); }

// Fresh, empty scratch directory per use.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "toalab_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string arg(const fs::path& p) { return "\"" + p.string() + "\""; }

json report(const fs::path& dir) { return json::parse(toalab::read_text_file(dir / "report.json")); }

toalab::ToADensity density(const fs::path& dir, const std::string& stem) {
    return toalab::density_from_files(toalab::read_text_file(dir / (stem + ".csv")),
                                      toalab::read_text_file(dir / (stem + ".json")));
}

}  // namespace

TEST_CASE("Kijowski scenario: unit integral and peak at m L / p0") {
    const fs::path out = scratch("kijowski");
    const Result r = cli("--out " + arg(out) + " run " + arg(scenario("kijowski_gaussian.json")));
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const toalab::ToADensity d = density(out, "density");
    const auto w = toalab::simpson_weights(d.grid.size(), d.grid.spacing());
    double total = 0.0;
    std::size_t peak = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        total += w[k] * d.values[k];
        if (d.values[k] > d.values[peak]) peak = k;
    }
    CHECK(std::abs(total - 1.0) <= 1e-6);
    CHECK(std::abs(d.grid.node(peak) - 10.0) <= d.grid.spacing());
    CHECK(report(out)["kind"] == "toa");
}

TEST_CASE("invalid outcome operators are rejected with exit code 2") {
    const fs::path out = scratch("empty");
    const Result r = cli("--out " + arg(out) + " run " + arg(scenario("empty_outcomes.json")));
    CHECK(r.code == 2);
    CHECK(r.output.find("sum_lambda P_lambda = P") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "report.json"));
    CHECK(cli("validate " + arg(scenario("empty_outcomes.json"))).code == 2);
    CHECK(cli("validate " + arg(scenario("kijowski_gaussian.json"))).code == 0);
}

TEST_CASE("delta and constant kernels: fitted wavenumbers differ by a factor two") {
    const fs::path a = scratch("delta");
    const fs::path b = scratch("constant");
    REQUIRE(cli("--out " + arg(a) + " run " + arg(scenario("oscillation_two_flavor_delta.json"))).code == 0);
    REQUIRE(cli("--out " + arg(b) + " run " + arg(scenario("oscillation_two_flavor_constant.json"))).code == 0);
    const double ka = report(a)["fit"]["wavenumber"].get<double>();
    const double kb = report(b)["fit"]["wavenumber"].get<double>();
    CHECK(kb / ka == doctest::Approx(2.0).epsilon(0.02));
    const double k_std = report(a)["pairs"][0]["standard"]["equal_momentum"].get<double>();
    CHECK(std::abs(ka) == doctest::Approx(std::abs(k_std)).epsilon(0.01));
}

TEST_CASE("compare: identical inputs, Kijowski versus constant alpha, grid mismatch") {
    const fs::path k = scratch("cmp_kijowski");
    REQUIRE(cli("--out " + arg(k) + " run " + arg(scenario("kijowski_gaussian.json"))).code == 0);

    const Result same = cli("compare " + arg(k / "density.csv") + " " + arg(k / "density.csv"));
    REQUIRE_MESSAGE(same.code == 0, same.output);
    const json s = json::parse(same.output);
    CHECK(s["tv_distance"] == 0.0);
    CHECK(s["max_abs_difference"] == 0.0);
    CHECK(s["argmax_shift"] == 0.0);

    // The absorption scenario on the Kijowski time grid.
    json cfg = json::parse(toalab::read_text_file(scenario("absorption_constant_nonrelativistic.json")));
    cfg["times"] = json::parse(toalab::read_text_file(scenario("kijowski_gaussian.json")))["times"];
    const fs::path a = scratch("cmp_absorption");
    toalab::write_text_file(a / "absorption.json", cfg.dump());
    REQUIRE(cli("--out " + arg(a) + " run " + arg(a / "absorption.json")).code == 0);
    const Result diff = cli("--out " + arg(a) + " compare " + arg(k / "density.csv") + " " + arg(a / "density.csv"));
    REQUIRE_MESSAGE(diff.code == 0, diff.output);
    CHECK(json::parse(diff.output)["tv_distance"].get<double>() <= 1e-10);
    CHECK(fs::exists(a / "compare.json"));

    const fs::path wide = scratch("cmp_wide");
    REQUIRE(cli("--out " + arg(wide) + " run " + arg(scenario("absorption_constant_nonrelativistic.json"))).code == 0);
    const Result mismatch = cli("compare " + arg(k / "density.csv") + " " + arg(wide / "density.csv"));
    CHECK(mismatch.code == 2);
    CHECK(mismatch.output.find("grid mismatch") != std::string::npos);
}

TEST_CASE("quantum and classical densities of a narrow packet are close") {
    const fs::path out = scratch("classical");
    REQUIRE(cli("--out " + arg(out) + " run " + arg(scenario("classical_compare_narrow.json"))).code == 0);
    const Result r = cli("compare " + arg(out / "quantum.csv") + " " + arg(out / "classical.csv"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.output)["tv_distance"].get<double>() <= 0.05);
}

TEST_CASE("runs are bit-identical across repetitions and thread counts") {
    for (const char* name : {"kernel_decoherent.json", "oscillation_gaussian_kernel.json", "transition_two_level.json"}) {
        const fs::path a = scratch("det_a");
        const fs::path b = scratch("det_b");
        REQUIRE(cli("--threads 1 --out " + arg(a) + " run " + arg(scenario(name))).code == 0);
        REQUIRE(cli("--threads 2 --out " + arg(b) + " run " + arg(scenario(name))).code == 0);
        for (const auto& entry : fs::directory_iterator(a)) {
            CAPTURE(entry.path().filename().string());
            CHECK(toalab::read_text_file(entry.path()) == toalab::read_text_file(b / entry.path().filename()));
        }
    }
}

TEST_CASE("configuration errors") {
    const fs::path dir = scratch("config");
    json cfg = json::parse(toalab::read_text_file(scenario("kijowski_gaussian.json")));
    cfg["state"]["packets"][0]["momentum"] = 5.0;
    toalab::write_text_file(dir / "typo.json", cfg.dump());
    const Result typo = cli("validate " + arg(dir / "typo.json"));
    CHECK(typo.code == 2);
    CHECK(typo.output.find("momentum") != std::string::npos);

    cfg = json::parse(toalab::read_text_file(scenario("kijowski_gaussian.json")));
    cfg["schema_version"] = 7;
    toalab::write_text_file(dir / "schema.json", cfg.dump());
    CHECK(cli("validate " + arg(dir / "schema.json")).code == 2);

    toalab::write_text_file(dir / "broken.json", "{\"schema_version\": 1,");
    CHECK(cli("validate " + arg(dir / "broken.json")).code == 2);

    CHECK(cli("run " + arg(dir / "does_not_exist.json")).code == 4);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("list-scenarios") {
    const Result r = cli("list-scenarios");
    REQUIRE(r.code == 0);
    for (const char* name : {"kijowski_gaussian.json", "empty_outcomes.json", "oscillation_two_flavor_delta.json"}) {
        CHECK(r.output.find(name) != std::string::npos);
    }
}
