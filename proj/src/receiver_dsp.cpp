#include "cpcl/receiver_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cpcl/error.hpp"
#include "fft.hpp"

namespace cpcl {

std::string_view to_string(WindowKind kind) {
    switch (kind) {
        case WindowKind::Rectangular: return "rect";
        case WindowKind::Hann: return "hann";
    }
    return "unknown";
}

std::optional<WindowKind> parse_window(std::string_view name) {
    if (name == "rect" || name == "rectangular") return WindowKind::Rectangular;
    if (name == "hann") return WindowKind::Hann;
    return std::nullopt;
}

std::vector<double> window_coefficients(WindowKind kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == WindowKind::Hann) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(n));
    }
    return w;
}

std::size_t ChannelEstimate::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.values().begin(), valid.values().end(), 1));
}

bool ScatteringMap::is_suppressed(std::size_t col) const {
    if (!notch_half_width) return false;
    const long k = doppler_index(col);
    return static_cast<std::size_t>(std::abs(k)) <= *notch_half_width;
}

ChannelEstimate estimate_channel(const SymbolFrame& rx, const ResourceGrid& reference,
                                 std::optional<int> user_id) {
    if (!rx.symbols.same_shape(reference.symbols) || rx.numerology != reference.numerology)
        throw Error(ErrorCode::DimensionMismatch,
                    "received frame is " + std::to_string(rx.symbols.rows()) + "x" +
                        std::to_string(rx.symbols.cols()) + ", reference is " +
                        std::to_string(reference.symbols.rows()) + "x" +
                        std::to_string(reference.symbols.cols()));

    const ResourceGrid* ref = &reference;
    ResourceGrid restricted;
    if (user_id) {
        if (!reference.has_user(*user_id))
            throw Error(ErrorCode::EmptyReference,
                        "user " + std::to_string(*user_id) + " owns no resource elements");
        restricted = user_subgrid(reference, *user_id);
        ref = &restricted;
    }

    ChannelEstimate est;
    est.numerology = rx.numerology;
    est.H = Matrix<cdouble>(rx.symbols.rows(), rx.symbols.cols(), cdouble{});
    est.valid = Matrix<std::uint8_t>(rx.symbols.rows(), rx.symbols.cols(), 0);
    const auto& X = ref->symbols.values();
    const auto& Y = rx.symbols.values();
    std::size_t used = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] == cdouble{}) continue;
        est.H.values()[i] = Y[i] / X[i];
        est.valid.values()[i] = 1;
        ++used;
    }
    if (used == 0) throw Error(ErrorCode::EmptyReference, "reference grid is all zero");
    return est;
}

ChannelEstimate select_symbols(const ChannelEstimate& est, std::size_t first, std::size_t count) {
    if (count == 0 || first + count > est.H.cols())
        throw Error(ErrorCode::OutOfBounds, "symbol window " + std::to_string(first) + "+" +
                                                std::to_string(count) + " exceeds " +
                                                std::to_string(est.H.cols()) + " symbols");
    ChannelEstimate out;
    out.numerology = est.numerology;
    out.numerology.num_symbols = count;
    out.H = Matrix<cdouble>(est.H.rows(), count);
    out.valid = Matrix<std::uint8_t>(est.H.rows(), count);
    for (std::size_t m = 0; m < est.H.rows(); ++m) {
        for (std::size_t d = 0; d < count; ++d) {
            out.H(m, d) = est.H(m, first + d);
            out.valid(m, d) = est.valid(m, first + d);
        }
    }
    return out;
}

Matrix<cdouble> delay_transform(const ChannelEstimate& est, WindowKind window) {
    if (est.H.empty()) throw Error(ErrorCode::EmptyReference, "empty channel estimate");
    const std::size_t M = est.H.rows();
    const std::size_t D = est.H.cols();
    const auto w = window_coefficients(window, M);

    Matrix<cdouble> cir(M, D);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t d = 0; d < D; ++d)
            cir(m, d) = est.valid(m, d) ? est.H(m, d) * w[m] : cdouble{};
    detail::unitary_dft(cir, detail::FftAxis::Cols, detail::FftDirection::Inverse);
    return cir;
}

SpreadingFunction doppler_transform(const Matrix<cdouble>& cir, const Numerology& numerology,
                                    WindowKind window) {
    const std::size_t M = cir.rows();
    const std::size_t D = cir.cols();
    if (D < 2) throw Error(ErrorCode::InvalidArgument, "Doppler processing needs D >= 2");

    const auto w = window_coefficients(window, D);
    Matrix<cdouble> work(M, D);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t d = 0; d < D; ++d) work(m, d) = cir(m, d) * w[d];
    detail::unitary_dft(work, detail::FftAxis::Rows, detail::FftDirection::Forward);

    SpreadingFunction sf;
    sf.S = Matrix<cdouble>(M, D);
    const std::size_t half = D / 2;
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t c = 0; c < D; ++c) sf.S(m, c) = work(m, (c + D - half) % D);
    sf.delay_bin_width_s =
        1.0 / (static_cast<double>(M) * numerology.subcarrier_spacing_hz);
    sf.doppler_bin_width_hz = 1.0 / (static_cast<double>(D) * numerology.symbol_duration());
    sf.doppler_window = window;
    return sf;
}

ScatteringMap scattering_map(const SpreadingFunction& sf) {
    ScatteringMap map;
    map.power = Matrix<double>(sf.S.rows(), sf.S.cols());
    for (std::size_t i = 0; i < sf.S.size(); ++i) map.power.values()[i] = std::norm(sf.S.values()[i]);
    map.delay_bin_width_s = sf.delay_bin_width_s;
    map.doppler_bin_width_hz = sf.doppler_bin_width_hz;
    map.delay_window = sf.delay_window;
    map.doppler_window = sf.doppler_window;
    return map;
}

std::vector<double> mean_delay_profile(const Matrix<cdouble>& cir) {
    std::vector<double> pdp(cir.rows(), 0.0);
    if (cir.cols() == 0) return pdp;
    for (std::size_t k = 0; k < cir.rows(); ++k) {
        double acc = 0.0;
        for (const auto& v : cir.row(k)) acc += std::norm(v);
        pdp[k] = acc / static_cast<double>(cir.cols());
    }
    return pdp;
}

double max_integration_time(double target_speed_mps, double delay_bin_width_s) {
    if (!(target_speed_mps > 0.0))
        throw Error(ErrorCode::InvalidArgument, "target speed must be positive");
    if (std::isinf(target_speed_mps)) return 0.0;
    return kSpeedOfLight * delay_bin_width_s / (2.0 * target_speed_mps);
}

ProcessingResult process_frame(const SymbolFrame& rx, const ResourceGrid& reference,
                               const ProcessingOptions& options) {
    ChannelEstimate est = estimate_channel(rx, reference, options.user_id);
    const std::size_t count =
        options.doppler_symbols.value_or(est.H.cols() - std::min(options.first_symbol, est.H.cols()));
    if (options.first_symbol != 0 || count != est.H.cols())
        est = select_symbols(est, options.first_symbol, count);

    ProcessingResult out;
    out.cir = delay_transform(est, options.delay_window);
    auto sf = doppler_transform(out.cir, est.numerology, options.doppler_window);
    sf.delay_window = options.delay_window;
    out.map = scattering_map(sf);
    return out;
}

}  // namespace cpcl
