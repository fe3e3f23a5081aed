#include "cpcl/artifacts.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cpcl/error.hpp"

namespace cpcl {

namespace {

constexpr char kMagic[8] = {'C', 'P', 'C', 'L', 'M', 'A', 'P', '1'};

template <typename U>
void put_le(std::string& out, U bits) {
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

template <typename U>
U get_le(std::string_view in, std::size_t offset) {
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        bits |= static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    return bits;
}

double get_f64(std::string_view in, std::size_t offset) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in, offset));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t header_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw Error(ErrorCode::UnreadableMap, std::string("bad ") + what + " in header");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string encode_map(const ScatteringMap& map) {
    std::string out;
    out.reserve(kMapHeaderBytes + 4 * map.power.size());
    out.append(kMagic, sizeof kMagic);
    put_le(out, std::bit_cast<std::uint64_t>(static_cast<double>(map.delay_bins())));
    put_le(out, std::bit_cast<std::uint64_t>(static_cast<double>(map.doppler_bins())));
    put_le(out, std::bit_cast<std::uint64_t>(map.delay_bin_width_s));
    put_le(out, std::bit_cast<std::uint64_t>(map.doppler_bin_width_hz));
    out.resize(kMapHeaderBytes, '\0');
    for (double p : map.power.values()) put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
    return out;
}

ScatteringMap decode_map(std::string_view bytes) {
    if (bytes.size() < kMapHeaderBytes)
        throw Error(ErrorCode::UnreadableMap, "file shorter than the 64-byte header");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw Error(ErrorCode::UnreadableMap, "missing CPCLMAP1 magic");
    const std::size_t m = header_count(get_f64(bytes, 8), "delay bin count");
    const std::size_t d = header_count(get_f64(bytes, 16), "Doppler bin count");
    if (bytes.size() != kMapHeaderBytes + 4 * m * d)
        throw Error(ErrorCode::UnreadableMap, "payload size does not match " + std::to_string(m) +
                                                  "x" + std::to_string(d) + " header");
    ScatteringMap map;
    map.delay_bin_width_s = get_f64(bytes, 24);
    map.doppler_bin_width_hz = get_f64(bytes, 32);
    map.power = Matrix<double>(m, d);
    std::size_t offset = kMapHeaderBytes;
    for (double& p : map.power.values()) {
        p = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
        offset += 4;
    }
    return map;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void write_map(const std::filesystem::path& path, const ScatteringMap& map) {
    write_file(path, encode_map(map));
}

ScatteringMap read_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnreadableMap, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return decode_map(ss.str());
    } catch (const Error& e) {
        throw Error(ErrorCode::UnreadableMap, path.string() + ": " + e.what());
    }
}

std::string detections_csv(std::string_view pair_id, std::span<const Detection> detections) {
    std::string out = "pair_id,delay_bin,doppler_bin,refined_delay_s,refined_doppler_hz,peak_power,snr_db\n";
    for (const auto& d : detections) {
        out += std::string(pair_id) + "," + std::to_string(d.delay_bin) + "," +
               std::to_string(d.doppler_bin) + "," + fmt(d.refined_delay_s) + "," +
               fmt(d.refined_doppler_hz) + "," + fmt(d.peak_power) + "," + fmt(d.snr_db) + "\n";
    }
    return out;
}

std::string positions_csv(std::span<const PositionRow> rows) {
    std::string out = "target_hint,x_m,y_m,residual_rms_m,n_pairs\n";
    for (const auto& r : rows) {
        out += r.target_hint + "," + fmt(r.estimate.position.x) + "," + fmt(r.estimate.position.y) +
               "," + fmt(r.estimate.residual_rms_m) + "," + std::to_string(r.estimate.pairs_used) +
               "\n";
    }
    return out;
}

std::string delay_profile_csv(std::span<const double> profile, double delay_bin_width_s) {
    std::string out = "delay_bin,delay_s,power\n";
    for (std::size_t k = 0; k < profile.size(); ++k)
        out += std::to_string(k) + "," + fmt(static_cast<double>(k) * delay_bin_width_s) + "," +
               fmt(profile[k]) + "\n";
    return out;
}

std::string render_heatmap(const ScatteringMap& map, double floor_db) {
    const std::size_t width = map.delay_bins();
    const std::size_t height = map.doppler_bins();
    const auto& values = map.power.values();
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    const double floor_mag = std::abs(floor_db);

    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t col = height - 1 - y;
        for (std::size_t x = 0; x < width; ++x) {
            const double p = map.power(x, col);
            double level = 0.0;
            if (peak > 0.0 && p > 0.0) {
                if (floor_mag == 0.0) {
                    level = p >= peak ? 255.0 : 0.0;
                } else {
                    const double db = 10.0 * std::log10(p / peak);
                    level = std::clamp(255.0 * (1.0 + db / floor_mag), 0.0, 255.0);
                }
            }
            out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(level))));
        }
    }
    return out;
}

void export_heatmap(const std::filesystem::path& map_path, const std::filesystem::path& image_path,
                    double floor_db) {
    write_file(image_path, render_heatmap(read_map(map_path), floor_db));
}

}  // namespace cpcl
