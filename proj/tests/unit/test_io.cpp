#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "json.hpp"
#include "toalab/error.hpp"
#include "toalab/io.hpp"
#include "toalab/models.hpp"

using namespace toalab;

TEST_CASE("doubles round-trip through text") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("transition system JSON round-trip") {
    const TransitionSystem sys = models::random_perturbative({});
    const std::string text = transition_system_to_json(sys);
    const TransitionSystem back = transition_system_from_json(text);
    CHECK(back.hamiltonian() == sys.hamiltonian());
    CHECK(back.projector_p() == sys.projector_p());
    CHECK(back.rho0() == sys.rho0());
    REQUIRE(back.outcomes().size() == sys.outcomes().size());
    for (std::size_t k = 0; k < sys.outcomes().size(); ++k) {
        CHECK(back.outcomes()[k].label == sys.outcomes()[k].label);
        CHECK(back.outcomes()[k].op == sys.outcomes()[k].op);
    }
    CHECK(back.has_split());
    CHECK(transition_system_to_json(back) == text);
}

TEST_CASE("transition system JSON validation") {
    const char* base = R"({"schema_version": 1, "hamiltonian": [[0, 1], [1, 0]], "projector_P": [[0, 0], [0, 1]],
                           "rho0": [[1, 0], [0, 0]], "outcomes": [{"label": "up", "operator": [[0, 0], [0, 1]]}]})";
    const TransitionSystem sys = transition_system_from_json(base);
    CHECK(sys.dim() == 2);
    CHECK(sys.outcome("up")(1, 1) == cplx(1.0));

    auto j = nlohmann::json::parse(base);
    j["typo"] = 1;
    CHECK_THROWS_WITH_AS(transition_system_from_json(j.dump()), doctest::Contains("unknown key 'typo'"), ValidationError);
    j = nlohmann::json::parse(base);
    j["outcomes"] = nlohmann::json::array();
    CHECK_THROWS_WITH_AS(transition_system_from_json(j.dump()), doctest::Contains("sum_lambda P_lambda = P"), ValidationError);
    j = nlohmann::json::parse(base);
    j["schema_version"] = 2;
    CHECK_THROWS_AS(transition_system_from_json(j.dump()), ValidationError);
    j = nlohmann::json::parse(base);
    j["hamiltonian"] = {{0, {1, 0.5}}, {{1, 0.5}, 0}};
    CHECK_THROWS_WITH_AS(transition_system_from_json(j.dump()), doctest::Contains("hermitian"), ValidationError);
    CHECK_THROWS_AS(transition_system_from_json("{not json"), ValidationError);
    CHECK(initial_support_from_string(to_string(InitialSupport::post_event)) == InitialSupport::post_event);
}

TEST_CASE("wave packet CSV round-trip") {
    const WavePacket psi = gaussian_packet(MomentumGrid(2.0, 8.0, 256), 5.0, 0.4, 1.3);
    const WavePacket back = wavepacket_from_csv(wavepacket_to_csv(psi));
    CHECK(back.grid() == psi.grid());
    CHECK(back.amplitudes() == psi.amplitudes());
    CHECK(wavepacket_to_csv(psi).rfind("p,re,im\n", 0) == 0);
    // an unnormalized file is normalized on load
    const WavePacket loud = WavePacket::unnormalized(psi.grid(), std::vector<cplx>(psi.size(), 3.0));
    CHECK(std::abs(wavepacket_from_csv(wavepacket_to_csv(loud)).norm() - 1.0) <= 1e-12);
}

TEST_CASE("density CSV and sidecar round-trip") {
    const TimeGrid grid(0.5, 3.0, 6);
    const ToADensity d = make_density(grid, {0.0, 0.25, 1.0 / 3.0, 0.5, 0.1, -1e-12}, 42.0, Sampling::cell_average);
    const std::string csv = density_to_csv(d);
    const std::string side = density_sidecar(d, R"({"scenario": "unit"})");
    CHECK(csv.rfind("t,value\n", 0) == 0);
    const auto meta = nlohmann::json::parse(side);
    CHECK(meta["metadata"]["scenario"] == "unit");
    CHECK(meta["L"] == 42.0);
    const ToADensity back = density_from_files(csv, side);
    CHECK(back.grid == grid);
    CHECK(back.values == d.values);
    CHECK(back.sampling == Sampling::cell_average);
    CHECK(back.L == 42.0);
    CHECK(density_to_csv(back) == csv);

    const ToADensity other = make_density(TimeGrid(0.5, 3.5, 6), d.values, 42.0);
    CHECK_THROWS_AS(density_from_files(density_to_csv(other), side), ValidationError);
    CHECK_THROWS_AS(density_sidecar(d, "[1, 2]"), ValidationError);
}

TEST_CASE("file helpers") {
    const auto dir = std::filesystem::temp_directory_path() / "toalab_io_test";
    std::filesystem::create_directories(dir);
    write_text_file(dir / "a.txt", "hello\n");
    CHECK(read_text_file(dir / "a.txt") == "hello\n");
    CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), IoError);
    CHECK_THROWS_AS(write_text_file(dir / "no" / "such" / "dir.txt", "x"), IoError);
    std::filesystem::remove_all(dir);
}
