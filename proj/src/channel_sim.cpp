#include "cpcl/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cpcl/error.hpp"

namespace cpcl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_cyclic(std::span<const Path> paths, const Numerology& nu, double timing_offset_s) {
    const double cp = nu.cp_duration();
    for (const auto& p : paths) {
        const double tau = p.delay_s + timing_offset_s;
        // A zero-length CP still admits a path at exactly zero delay.
        if (tau == 0.0 || (tau > 0.0 && tau < cp)) continue;
        throw Error(ErrorCode::DelayExceedsCp,
                    "path delay " + std::to_string(tau * 1e9) + " ns outside [0, CP = " +
                        std::to_string(cp * 1e9) + " ns)");
    }
}

}  // namespace

Matrix<cdouble> channel_response(const Numerology& nu, std::span<const Path> paths,
                                 double frame_start_time_s) {
    const std::size_t M = nu.num_carriers;
    const std::size_t D = nu.num_symbols;
    const double Ts = nu.symbol_duration();

    // Separable model: H[m,d] = sum_p g_p a_p[m] b_p[d].
    Matrix<cdouble> H(M, D, cdouble{});
    std::vector<cdouble> freq(M);
    std::vector<cdouble> slow(D);
    for (const auto& p : paths) {
        for (std::size_t m = 0; m < M; ++m)
            freq[m] = p.gain * std::polar(1.0, -kTwoPi * nu.carrier_offset_hz(m) * p.delay_s);
        for (std::size_t d = 0; d < D; ++d) {
            const double t = frame_start_time_s + static_cast<double>(d) * Ts;
            slow[d] = std::polar(1.0, kTwoPi * p.doppler_hz * t);
        }
        for (std::size_t m = 0; m < M; ++m) {
            auto row = H.row(m);
            for (std::size_t d = 0; d < D; ++d) row[d] += freq[m] * slow[d];
        }
    }
    return H;
}

SymbolFrame apply_channel(const ResourceGrid& grid, std::span<const Path> paths,
                          const ChannelOptions& options) {
    const Numerology& nu = grid.numerology;
    check_cyclic(paths, nu, options.timing_offset_s);

    std::vector<Path> shifted(paths.begin(), paths.end());
    for (auto& p : shifted) {
        p.delay_s += options.timing_offset_s;
        p.doppler_hz += options.frequency_offset_hz;
    }

    SymbolFrame frame;
    frame.numerology = nu;
    frame.frame_start_time_s = options.frame_start_time_s;
    frame.symbols = channel_response(nu, shifted, options.frame_start_time_s);
    auto& Y = frame.symbols.values();
    const auto& X = grid.symbols.values();
    for (std::size_t i = 0; i < Y.size(); ++i) Y[i] *= X[i];

    if (options.snr_db) {
        const auto occupied = grid.occupied();
        double signal_power = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < Y.size(); ++i) {
            if (!occupied.values()[i]) continue;
            signal_power += std::norm(Y[i]);
            ++count;
        }
        if (count > 0) signal_power /= static_cast<double>(count);
        const double noise_power = signal_power * std::pow(10.0, -*options.snr_db / 10.0);
        // Complex circular: each quadrature carries half the power.
        if (!(noise_power > 0.0)) return frame;
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
        std::mt19937_64 rng(options.noise_seed);
        for (auto& y : Y) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            y += cdouble{re, im};
        }
    }
    return frame;
}

std::vector<Path> synchronize_to_los(std::span<const Path> paths) {
    const auto los = std::find_if(paths.begin(), paths.end(), [](const Path& p) {
        return p.kind == PathKind::LineOfSight;
    });
    if (los == paths.end())
        throw Error(ErrorCode::InvalidArgument, "cannot synchronise without a LoS path");
    std::vector<Path> out(paths.begin(), paths.end());
    const double tau0 = los->delay_s;
    const double alpha0 = los->doppler_hz;
    for (auto& p : out) {
        p.delay_s -= tau0;
        p.doppler_hz -= alpha0;
        // Rounding can leave a scatter path on the baseline a hair below zero.
        if (p.delay_s < 0.0 && p.delay_s > -1e-15) p.delay_s = 0.0;
    }
    return out;
}

void check_narrowband(std::span<const Path> paths, const Numerology& nu, double limit) {
    const double Ts = nu.symbol_duration();
    for (const auto& p : paths) {
        if (std::abs(p.doppler_hz) * Ts >= limit)
            throw Error(ErrorCode::NarrowbandViolation,
                        "Doppler " + std::to_string(p.doppler_hz) + " Hz gives alpha*Ts = " +
                            std::to_string(std::abs(p.doppler_hz) * Ts) + " >= " +
                            std::to_string(limit));
    }
}

}  // namespace cpcl
