#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpcl/artifacts.hpp"
#include "cpcl/detection.hpp"
#include "cpcl/receiver_dsp.hpp"
#include "cpcl/scenario.hpp"
#include "cpcl/scene_geometry.hpp"

namespace cpcl {

struct PairResult {
    std::string pair_id;
    BistaticPair pair;
    std::vector<Path> paths;  // as seen by the LoS-locked receiver
    Matrix<cdouble> cir;
    ScatteringMap map;        // before the zero-Doppler notch
    ScatteringMap notched;
    std::vector<double> delay_profile;
    std::vector<Detection> detections;
};

struct SimulationResult {
    std::vector<PairResult> pairs;
    std::vector<PositionRow> positions;
    std::uint64_t seed = 0;
};

/// Independent, reproducible sub-seed for stream `stream` of a run.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Search region implied by the scenario's delay and Doppler limits.
SearchRegion search_region(const Scenario& scenario, const ScatteringMap& map);

/// Runs every pair of the scenario: grid, channel, estimation, map, notch,
/// CFAR, then one fix from the strongest detection of each pair.
SimulationResult simulate(const Scenario& scenario);

/// Writes <pair>.map (before the notch), <pair>_detections.csv and
/// <pair>_pdp.csv per pair, positions.csv (two or more pairs with
/// localization on) and manifest.json.
void write_artifacts(const Scenario& scenario, const SimulationResult& result,
                     const std::filesystem::path& out_dir);

}  // namespace cpcl
