#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpcl/channel_sim.hpp"
#include "cpcl/matrix.hpp"
#include "cpcl/ofdm_grid.hpp"

namespace cpcl {

enum class WindowKind { Rectangular, Hann };

std::string_view to_string(WindowKind kind);
std::optional<WindowKind> parse_window(std::string_view name);

/// Periodic (DFT-even) window coefficients of length n.
std::vector<double> window_coefficients(WindowKind kind, std::size_t n);

/// Per-symbol channel frequency response, defined where the reference is
/// non-zero. Rows are carriers, columns symbols.
struct ChannelEstimate {
    Matrix<cdouble> H;
    Matrix<std::uint8_t> valid;
    Numerology numerology;

    std::size_t valid_count() const;
};

/// Spreading function S(delay, Doppler). Column c holds Doppler index
/// c - D/2, i.e. zero Doppler sits at column D/2.
struct SpreadingFunction {
    Matrix<cdouble> S;
    double delay_bin_width_s = 0.0;
    double doppler_bin_width_hz = 0.0;
    WindowKind delay_window = WindowKind::Rectangular;
    WindowKind doppler_window = WindowKind::Rectangular;
};

/// Magnitude-squared spreading function, same layout and bin metadata.
struct ScatteringMap {
    Matrix<double> power;
    double delay_bin_width_s = 0.0;
    double doppler_bin_width_hz = 0.0;
    WindowKind delay_window = WindowKind::Rectangular;
    WindowKind doppler_window = WindowKind::Rectangular;
    /// Half width of the zero-Doppler notch applied to this map, if any.
    std::optional<std::size_t> notch_half_width;

    std::size_t delay_bins() const { return power.rows(); }
    std::size_t doppler_bins() const { return power.cols(); }
    std::size_t zero_doppler_col() const { return power.cols() / 2; }
    long doppler_index(std::size_t col) const {
        return static_cast<long>(col) - static_cast<long>(zero_doppler_col());
    }
    bool is_suppressed(std::size_t col) const;
};

/// Inverse filtering H = Y / X on the reference's non-zero elements. With
/// `user_id` the reference is first restricted to that user's PRBs.
ChannelEstimate estimate_channel(const SymbolFrame& rx, const ResourceGrid& reference,
                                 std::optional<int> user_id = std::nullopt);

/// Symbols [first, first + count) of an estimate, for a shorter Doppler window.
ChannelEstimate select_symbols(const ChannelEstimate& est, std::size_t first, std::size_t count);

/// Windowed, zero-filled unitary IDFT over carriers for every symbol.
/// Result row k is delay bin k (k * delay_bin_width), column d is symbol d.
Matrix<cdouble> delay_transform(const ChannelEstimate& est,
                                WindowKind window = WindowKind::Rectangular);

/// Windowed unitary DFT along slow time for every delay bin, fft-shifted so
/// zero Doppler lands on column D/2.
SpreadingFunction doppler_transform(const Matrix<cdouble>& cir, const Numerology& numerology,
                                    WindowKind window = WindowKind::Rectangular);

ScatteringMap scattering_map(const SpreadingFunction& sf);

/// Slow-time average of |CIR|^2 per delay bin.
std::vector<double> mean_delay_profile(const Matrix<cdouble>& cir);

/// Longest coherent window before a target closing on both legs at
/// `target_speed_mps` migrates by one delay bin: c * bin / (2 * speed).
double max_integration_time(double target_speed_mps, double delay_bin_width_s);

/// Convenience chain: estimate -> delay transform -> Doppler transform -> |.|^2.
struct ProcessingOptions {
    std::optional<int> user_id;
    std::size_t first_symbol = 0;
    std::optional<std::size_t> doppler_symbols;  // default: whole frame
    WindowKind delay_window = WindowKind::Rectangular;
    WindowKind doppler_window = WindowKind::Rectangular;
};

struct ProcessingResult {
    Matrix<cdouble> cir;
    ScatteringMap map;
};

ProcessingResult process_frame(const SymbolFrame& rx, const ResourceGrid& reference,
                               const ProcessingOptions& options = {});

}  // namespace cpcl
