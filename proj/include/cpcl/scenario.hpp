#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cpcl/detection.hpp"
#include "cpcl/ofdm_grid.hpp"
#include "cpcl/receiver_dsp.hpp"
#include "cpcl/scene_geometry.hpp"

namespace cpcl {

struct AllocationSpec {
    enum class Pattern { Full, Tiles, Random };
    Pattern pattern = Pattern::Full;
    int user = 0;                // Full
    std::vector<PrbTile> tiles;  // Tiles
    double density = 1.0;        // Random
    int users = 1;               // Random
    std::uint64_t seed = 0;      // Random
};

struct PairSpec {
    std::string id;
    std::string tx;
    std::string rx;
};

/// Everything one simulation run needs. Field names in the JSON form carry
/// their SI unit (position_m, speed_mps, ...); see README for the schema.
struct Scenario {
    std::string name;
    Numerology numerology;
    PrbShape prb;
    std::vector<Node> nodes;
    std::vector<PairSpec> pairs;
    AllocationSpec allocation;

    // channel
    std::optional<double> snr_db;  // nullopt: noiseless
    double los_excess_db = 30.0;
    double reference_range_m = 100.0;
    double timing_offset_s = 0.0;
    double frequency_offset_hz = 0.0;

    // processing
    std::size_t first_symbol = 0;
    std::size_t doppler_symbols = 0;
    WindowKind delay_window = WindowKind::Rectangular;
    WindowKind doppler_window = WindowKind::Rectangular;
    std::optional<int> process_user;
    std::size_t notch_half_width = 1;
    std::optional<double> max_excess_delay_s;
    std::optional<double> max_doppler_hz;

    CfarConfig cfar;
    bool localization = true;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
};

/// Parses and validates a scenario document. `source` names the document in
/// diagnostics. Throws Error(ConfigError) whose message starts with
/// "<source>:<line>:<column>: ".
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");

/// Reads `path`; a run manifest is accepted too (its "scenario" member is used).
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON form; parse_scenario(to_json(s).dump()) reproduces `s`.
nlohmann::json to_json(const Scenario& scenario);

/// Line/column (1-based) of the value addressed by `pointer`, or of its
/// deepest existing ancestor. nullopt if `text` is not navigable.
struct TextPosition {
    std::size_t line = 1;
    std::size_t column = 1;
};
std::optional<TextPosition> locate_json_pointer(std::string_view text, std::string_view pointer);

}  // namespace cpcl
