// Command-line front end: run a scenario, render a map, or check a file.
//
//   cpcl_sim run <scenario.json> [--out DIR] [--seed N]
//   cpcl_sim heatmap <map> <out.pgm> [--floor-db F]
//   cpcl_sim validate <scenario.json>
//
// Exit status: 0 success, 1 runtime failure, 2 usage or scenario error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cpcl/artifacts.hpp"
#include "cpcl/error.hpp"
#include "cpcl/pipeline.hpp"
#include "cpcl/scenario.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int run(const std::string& path, const std::optional<std::string>& out,
        const std::optional<std::uint64_t>& seed) {
    cpcl::Scenario scenario = cpcl::load_scenario(path);
    if (seed) scenario.seed = *seed;
    if (out) scenario.output_dir = *out;
    const cpcl::SimulationResult result = cpcl::simulate(scenario);
    cpcl::write_artifacts(scenario, result, scenario.output_dir);
    for (const auto& pair : result.pairs)
        std::cout << pair.pair_id << ": " << pair.detections.size() << " detection(s)\n";
    for (const auto& row : result.positions)
        std::cout << "position " << row.target_hint << ": " << row.estimate.position.x << ", "
                  << row.estimate.position.y << " m\n";
    std::cout << "artifacts in " << scenario.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multistatic OFDM passive radar simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write artifacts");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run_cmd->add_option("--seed", seed, "base seed (overrides seed)");

    std::string map_path;
    std::string image_path;
    double floor_db = 40.0;
    auto* heat_cmd = app.add_subcommand("heatmap", "render a map file as a PGM image");
    heat_cmd->add_option("map", map_path, "map file written by run")->required();
    heat_cmd->add_option("image", image_path, "output .pgm path")->required();
    heat_cmd->add_option("--floor-db", floor_db, "dynamic range below the peak, dB")
        ->capture_default_str();

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "check a scenario file without running it");
    val_cmd->add_option("scenario", validate_path, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return run(scenario_path, out_dir, seed);
        if (*heat_cmd) {
            cpcl::export_heatmap(map_path, image_path, floor_db);
            return 0;
        }
        if (*val_cmd) {
            const cpcl::Scenario s = cpcl::load_scenario(validate_path);
            std::cout << validate_path << ": ok (" << s.pairs.size() << " pair(s), "
                      << s.nodes.size() << " node(s))\n";
            return 0;
        }
    } catch (const cpcl::Error& e) {
        if (e.code() == cpcl::ErrorCode::ConfigError) {
            // Compiler-style "file:line:col: message".
            std::string msg = e.what();
            const std::string prefix = std::string(cpcl::to_string(e.code())) + ": ";
            if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
            std::cerr << msg << "\n";
            return kExitConfig;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
