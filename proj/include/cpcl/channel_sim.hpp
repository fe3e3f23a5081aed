#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cpcl/matrix.hpp"
#include "cpcl/ofdm_grid.hpp"
#include "cpcl/scene_geometry.hpp"

namespace cpcl {

/// Received frequency-domain symbols after sync, CP removal and FFT.
struct SymbolFrame {
    Matrix<cdouble> symbols;
    Numerology numerology;
    double frame_start_time_s = 0.0;
};

struct ChannelOptions {
    /// Noise power is set relative to the mean noiseless power over the
    /// allocated elements. nullopt means noiseless.
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;
    double frame_start_time_s = 0.0;
    // Residual synchronisation errors, added to every path.
    double timing_offset_s = 0.0;
    double frequency_offset_hz = 0.0;
};

/// Y[m,d] = X[m,d] * sum_p g_p exp(-j2pi f_m tau_p) exp(j2pi alpha_p t_d) + N[m,d]
/// with f_m the baseband carrier offset and t_d = start + d * T_s.
///
/// Throws DelayExceedsCp when a path (after the timing offset) falls outside
/// [0, CP), where the cyclic model no longer holds.
SymbolFrame apply_channel(const ResourceGrid& grid, std::span<const Path> paths,
                          const ChannelOptions& options = {});

/// Noiseless per-element transfer function of `paths` on the grid's numerology.
Matrix<cdouble> channel_response(const Numerology& numerology, std::span<const Path> paths,
                                 double frame_start_time_s = 0.0);

/// Paths as seen by a receiver locked to the direct signal: the LoS delay and
/// Doppler are subtracted from every path. Requires a LoS path.
std::vector<Path> synchronize_to_los(std::span<const Path> paths);

/// Throws NarrowbandViolation if any |alpha| * T_s reaches `limit`, where the
/// per-symbol constant-phase Doppler model breaks down.
void check_narrowband(std::span<const Path> paths, const Numerology& numerology,
                      double limit = 0.05);

}  // namespace cpcl
