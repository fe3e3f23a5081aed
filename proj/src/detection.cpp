#include "cpcl/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "cpcl/error.hpp"

namespace cpcl {

void CfarConfig::validate() const {
    if (train_delay < 1 || train_doppler < 1)
        throw Error(ErrorCode::InvalidArgument, "CFAR needs at least one training cell per axis");
    if (!(pfa > 0.0 && pfa < 0.5))
        throw Error(ErrorCode::InvalidArgument, "CFAR pfa must lie in (0, 0.5)");
}

double ca_cfar_threshold_factor(std::size_t training_cells, double pfa) {
    const double T = static_cast<double>(training_cells);
    return T * (std::pow(pfa, -1.0 / T) - 1.0);
}

ScatteringMap suppress_clutter(const ScatteringMap& map, std::size_t notch_half_width) {
    const std::size_t D = map.doppler_bins();
    if (2 * notch_half_width + 1 > D / 2)
        throw Error(ErrorCode::NotchTooWide, "notch of +/-" + std::to_string(notch_half_width) +
                                                 " bins would remove more than half of " +
                                                 std::to_string(D) + " Doppler bins");
    ScatteringMap out = map;
    out.notch_half_width = notch_half_width;
    for (std::size_t c = 0; c < D; ++c) {
        if (!out.is_suppressed(c)) continue;
        for (std::size_t k = 0; k < out.delay_bins(); ++k) out.power(k, c) = 0.0;
    }
    return out;
}

namespace {

// Vertex offset of the parabola through (-1, a), (0, b), (1, c) in log power,
// clamped to half a bin. Falls back to linear power next to exact zeros.
double parabolic_offset(double a, double b, double c) {
    if (a > 0.0 && b > 0.0 && c > 0.0) {
        a = std::log(a);
        c = std::log(c);
        b = std::log(b);
    }
    const double denom = a - 2.0 * b + c;
    if (!(denom < 0.0)) return 0.0;
    return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

std::vector<Detection> cfar_detect(const ScatteringMap& map, const CfarConfig& cfg,
                                   const SearchRegion& region) {
    cfg.validate();
    const std::size_t M = map.delay_bins();
    const std::size_t D = map.doppler_bins();
    if (M < 2 * (cfg.guard_delay + cfg.train_delay) + 1 ||
        D < 2 * (cfg.guard_doppler + cfg.train_doppler) + 1)
        throw Error(ErrorCode::MapTooSmall,
                    std::to_string(M) + "x" + std::to_string(D) +
                        " map is smaller than the CFAR window");

    const std::size_t k_begin = std::min(region.first_delay_bin, M);
    const std::size_t k_end =
        region.delay_bin_count ? std::min(M, k_begin + *region.delay_bin_count) : M;

    const auto& P = map.power;
    const auto wrap = [](std::size_t i, long off, std::size_t n) {
        const long v = (static_cast<long>(i) + off) % static_cast<long>(n);
        return static_cast<std::size_t>(v < 0 ? v + static_cast<long>(n) : v);
    };

    std::unordered_map<std::size_t, double> alpha_cache;
    const auto alpha_for = [&](std::size_t T) {
        auto it = alpha_cache.find(T);
        if (it == alpha_cache.end())
            it = alpha_cache.emplace(T, ca_cfar_threshold_factor(T, cfg.pfa)).first;
        return it->second;
    };

    std::vector<Detection> out;
    for (std::size_t k = k_begin; k < k_end; ++k) {
        for (std::size_t c = 0; c < D; ++c) {
            if (map.is_suppressed(c)) continue;
            if (region.max_abs_doppler_bin &&
                static_cast<std::size_t>(std::abs(map.doppler_index(c))) >
                    *region.max_abs_doppler_bin)
                continue;
            const double cut = P(k, c);

            double sum = 0.0;
            std::size_t T = 0;
            for (std::size_t i = cfg.guard_delay + 1; i <= cfg.guard_delay + cfg.train_delay; ++i) {
                const long off = static_cast<long>(i);
                sum += P(wrap(k, off, M), c) + P(wrap(k, -off, M), c);
                T += 2;
            }
            for (std::size_t i = cfg.guard_doppler + 1; i <= cfg.guard_doppler + cfg.train_doppler;
                 ++i) {
                const long off = static_cast<long>(i);
                for (const std::size_t cc : {wrap(c, off, D), wrap(c, -off, D)}) {
                    if (map.is_suppressed(cc)) continue;
                    sum += P(k, cc);
                    ++T;
                }
            }
            const double noise = sum / static_cast<double>(T);
            if (!(cut > alpha_for(T) * noise)) continue;

            bool is_peak = true;
            for (long dk = -1; dk <= 1 && is_peak; ++dk) {
                for (long dc = -1; dc <= 1; ++dc) {
                    if (dk == 0 && dc == 0) continue;
                    const std::size_t kk = wrap(k, dk, M);
                    const std::size_t cc = wrap(c, dc, D);
                    const double v = P(kk, cc);
                    if (v > cut || (v == cut && std::pair{kk, cc} < std::pair{k, c})) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (!is_peak) continue;

            const double dk = parabolic_offset(P(wrap(k, -1, M), c), cut, P(wrap(k, 1, M), c));
            const double dc = parabolic_offset(P(k, wrap(c, -1, D)), cut, P(k, wrap(c, 1, D)));
            Detection det;
            det.delay_bin = k;
            det.doppler_bin = map.doppler_index(c);
            det.refined_delay_s = (static_cast<double>(k) + dk) * map.delay_bin_width_s;
            det.refined_doppler_hz =
                (static_cast<double>(det.doppler_bin) + dc) * map.doppler_bin_width_hz;
            det.peak_power = cut;
            det.snr_db = noise > 0.0 ? 10.0 * std::log10(cut / noise)
                                     : std::numeric_limits<double>::infinity();
            out.push_back(det);
        }
    }

    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        if (a.peak_power != b.peak_power) return a.peak_power > b.peak_power;
        if (a.delay_bin != b.delay_bin) return a.delay_bin < b.delay_bin;
        return a.doppler_bin < b.doppler_bin;
    });
    return out;
}

}  // namespace cpcl
