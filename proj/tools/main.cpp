#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "runner.hpp"
#include "toalab/error.hpp"
#include "toalab/parallel.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

#ifndef TOALAB_SCENARIO_DIR
#define TOALAB_SCENARIO_DIR "scenarios"
#endif

}  // namespace

int main(int argc, char** argv) {
    using namespace toalab;
    CLI::App app{"toalab: time-of-arrival and transition-time distributions"};
    app.require_subcommand(1);
    app.fallthrough();

    runner::RunOptions options;
    std::string out_dir = ".";
    unsigned threads = 1;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    app.add_option("--tolerance-scale", options.tolerance_scale, "Multiply every validation tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    std::string config;
    auto* run = app.add_subcommand("run", "Validate and run a scenario");
    run->add_option("config", config, "Scenario JSON")->required();

    auto* validate = app.add_subcommand("validate", "Validate a scenario without running it");
    validate->add_option("config", config, "Scenario JSON")->required();

    std::string a, b;
    auto* compare = app.add_subcommand("compare", "Compare two CSV artifacts with sidecars");
    compare->add_option("a", a, "First CSV")->required();
    compare->add_option("b", b, "Second CSV")->required();

    std::string scenario_dir = TOALAB_SCENARIO_DIR;
    auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");
    list->add_option("--dir", scenario_dir, "Scenario directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    options.out_dir = out_dir;

    try {
        set_thread_count(threads);
        if (*run) {
            const auto result = runner::run_scenario(config, options);
            for (const auto& f : result.artifacts) std::cout << f.string() << '\n';
        } else if (*validate) {
            const std::string kind = runner::validate_scenario(config, options);
            std::cout << "valid " << kind << " scenario\n";
        } else if (*compare) {
            const std::string report = runner::compare_artifacts(a, b);
            std::cout << report;
            if (app.get_option("--out")->count() > 0) {
                std::filesystem::create_directories(out_dir);
                std::FILE* f = std::fopen((std::filesystem::path(out_dir) / "compare.json").c_str(), "w");
                if (!f) throw IoError("cannot write compare.json");
                std::fputs(report.c_str(), f);
                std::fclose(f);
            }
        } else if (*list) {
            for (const auto& s : runner::list_scenarios(scenario_dir)) {
                std::printf("%-40s %-18s %s\n", s.file.c_str(), s.kind.c_str(), s.description.c_str());
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error in " << e.module() << "::" << e.operation() << ": " << e.detail() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
