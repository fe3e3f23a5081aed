#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cpcl/receiver_dsp.hpp"

namespace cpcl {

struct Detection {
    std::size_t delay_bin = 0;
    long doppler_bin = 0;  // signed, zero Doppler = 0
    double refined_delay_s = 0.0;
    double refined_doppler_hz = 0.0;
    double peak_power = 0.0;
    double snr_db = 0.0;
};

/// Cross-shaped CA-CFAR window: `train_*` cells on each side of the cell
/// under test along each axis, beyond `guard_*` guard cells.
struct CfarConfig {
    std::size_t train_delay = 8;
    std::size_t train_doppler = 8;
    std::size_t guard_delay = 2;
    std::size_t guard_doppler = 2;
    double pfa = 1e-4;

    void validate() const;
    std::size_t training_cells() const { return 2 * (train_delay + train_doppler); }
};

/// Cells eligible as detections. Training cells may lie outside.
struct SearchRegion {
    std::size_t first_delay_bin = 0;
    std::optional<std::size_t> delay_bin_count;     // default: to the end
    std::optional<std::size_t> max_abs_doppler_bin;  // default: all
};

/// Scale factor alpha = T (pfa^(-1/T) - 1) for exponential noise, applied to
/// the mean of T training cells.
double ca_cfar_threshold_factor(std::size_t training_cells, double pfa);

/// Zeroes Doppler columns |k| <= notch_half_width. Throws NotchTooWide when
/// that would remove more than half of the columns.
ScatteringMap suppress_clutter(const ScatteringMap& map, std::size_t notch_half_width);

/// CA-CFAR over the map with circular indexing on both axes (both are DFT
/// outputs). Notched columns are neither tested nor used for training.
/// A detection must exceed its threshold and be the strict local maximum of
/// its 3x3 neighbourhood; equal powers favour the lower delay bin, then the
/// lower Doppler column. Sub-bin values come from a 3-point parabola per
/// axis fitted to log power. Sorted by descending peak power.
std::vector<Detection> cfar_detect(const ScatteringMap& map, const CfarConfig& cfg,
                                   const SearchRegion& region = {});

}  // namespace cpcl
