#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpcl/detection.hpp"
#include "cpcl/localization.hpp"
#include "cpcl/receiver_dsp.hpp"

namespace cpcl {

// Map file: 64-byte header ("CPCLMAP1", then M, D, delay_bin_s and
// doppler_bin_hz as little-endian float64, zero padded) followed by M*D
// little-endian float32 powers, delay-major.
inline constexpr std::size_t kMapHeaderBytes = 64;

std::string encode_map(const ScatteringMap& map);
ScatteringMap decode_map(std::string_view bytes);

void write_map(const std::filesystem::path& path, const ScatteringMap& map);
/// Throws Error(UnreadableMap) for a missing, truncated or foreign file.
ScatteringMap read_map(const std::filesystem::path& path);

/// Header: pair_id,delay_bin,doppler_bin,refined_delay_s,refined_doppler_hz,peak_power,snr_db
std::string detections_csv(std::string_view pair_id, std::span<const Detection> detections);

struct PositionRow {
    std::string target_hint;
    PositionEstimate estimate;
};

/// Header: target_hint,x_m,y_m,residual_rms_m,n_pairs
std::string positions_csv(std::span<const PositionRow> rows);

/// Header: delay_bin,delay_s,power
std::string delay_profile_csv(std::span<const double> profile, double delay_bin_width_s);

/// Binary PGM, delay on x, Doppler on y with positive Doppler at the top.
/// Grey level 255 * (1 + dB / floor_db) where dB is relative to the peak;
/// floor_db = 0 leaves only the peak lit.
std::string render_heatmap(const ScatteringMap& map, double floor_db);

void export_heatmap(const std::filesystem::path& map_path, const std::filesystem::path& image_path,
                    double floor_db);

/// Writes `bytes` to `path`, throwing Error(IoError) on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace cpcl
