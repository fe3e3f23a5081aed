#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

#include "cpcl/artifacts.hpp"
#include "cpcl/error.hpp"

using namespace cpcl;

namespace {

ScatteringMap ramp_map(std::size_t M, std::size_t D) {
    ScatteringMap map;
    map.power = Matrix<double>(M, D);
    map.delay_bin_width_s = 3.2e-9;
    map.doppler_bin_width_hz = 125.0;
    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t c = 0; c < D; ++c) map.power(k, c) = 0.5 + static_cast<double>(k * D + c);
    return map;
}

struct Pgm {
    std::size_t width = 0, height = 0, maxval = 0;
    std::string pixels;
    unsigned char at(std::size_t x, std::size_t y) const {
        return static_cast<unsigned char>(pixels[y * width + x]);
    }
};

Pgm parse_pgm(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string magic;
    Pgm p;
    in >> magic >> p.width >> p.height >> p.maxval;
    EXPECT_EQ(magic, "P5");
    in.get();
    p.pixels.assign(std::istreambuf_iterator<char>(in), {});
    EXPECT_EQ(p.pixels.size(), p.width * p.height);
    return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(MapFile, RoundTripAndHeaderLayout) {
    const auto map = ramp_map(6, 4);
    const std::string bytes = encode_map(map);
    ASSERT_EQ(bytes.size(), kMapHeaderBytes + 6 * 4 * 4);
    EXPECT_EQ(bytes.substr(0, 8), "CPCLMAP1");
    double header[4];
    std::memcpy(header, bytes.data() + 8, sizeof header);
    EXPECT_EQ(header[0], 6.0);
    EXPECT_EQ(header[1], 4.0);
    EXPECT_EQ(header[2], 3.2e-9);
    EXPECT_EQ(header[3], 125.0);
    float first;
    std::memcpy(&first, bytes.data() + kMapHeaderBytes + 4 * 5, 4);
    EXPECT_EQ(first, 5.5f);  // row 1, column 1 of a 4-column map

    const auto back = decode_map(bytes);
    ASSERT_EQ(back.delay_bins(), 6u);
    ASSERT_EQ(back.doppler_bins(), 4u);
    EXPECT_EQ(back.delay_bin_width_s, 3.2e-9);
    EXPECT_EQ(back.doppler_bin_width_hz, 125.0);
    for (std::size_t i = 0; i < map.power.size(); ++i)
        EXPECT_EQ(back.power.values()[i], static_cast<double>(static_cast<float>(map.power.values()[i])));
}

TEST(MapFile, RejectsForeignOrTruncatedBytes) {
    const std::string bytes = encode_map(ramp_map(6, 4));
    for (const std::string& bad : {std::string("not a map"), bytes.substr(0, bytes.size() - 1),
                                   "XPCLMAP1" + bytes.substr(8), bytes + "x"}) {
        try {
            decode_map(bad);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnreadableMap);
        }
    }
    EXPECT_THROW(read_map("/nonexistent/file.map"), Error);
}

TEST(MapFile, WriteAndReadFile) {
    const auto dir = std::filesystem::temp_directory_path() / "cpcl_artifacts_test";
    std::filesystem::create_directories(dir);
    const auto map = ramp_map(3, 8);
    write_map(dir / "a.map", map);
    EXPECT_EQ(encode_map(read_map(dir / "a.map")), encode_map(map));
    std::filesystem::remove_all(dir);
}

TEST(Csv, HeadersAndRows) {
    Detection d;
    d.delay_bin = 19;
    d.doppler_bin = -4;
    d.refined_delay_s = 0.125;
    d.refined_doppler_hz = -441.5;
    d.peak_power = 2.0;
    d.snr_db = 21.5;
    const std::vector<Detection> dets{d};
    const std::string csv = detections_csv("rx1", dets);
    EXPECT_EQ(first_line(csv), "pair_id,delay_bin,doppler_bin,refined_delay_s,refined_doppler_hz,peak_power,snr_db");
    EXPECT_NE(csv.find("\nrx1,19,-4,0.125,-441.5,2,21.5\n"), std::string::npos) << csv;
    EXPECT_EQ(detections_csv("rx1", {}), first_line(csv) + "\n");

    PositionRow row;
    row.target_hint = "strongest";
    row.estimate.position = {74.5, -3.0};
    row.estimate.residual_rms_m = 0.25;
    row.estimate.pairs_used = 2;
    const std::vector<PositionRow> rows{row};
    EXPECT_EQ(positions_csv(rows), "target_hint,x_m,y_m,residual_rms_m,n_pairs\nstrongest,74.5,-3,0.25,2\n");

    const std::vector<double> pdp{1.0, 0.5};
    EXPECT_EQ(delay_profile_csv(pdp, 2e-9), "delay_bin,delay_s,power\n0,0,1\n1,2.0000000000000001e-09,0.5\n");
}

TEST(Heatmap, DimensionsAndOrientation) {
    ScatteringMap map;
    map.power = Matrix<double>(10, 8, 1e-6);
    map.power(3, 6) = 1.0;  // Doppler index +2
    const Pgm img = parse_pgm(render_heatmap(map, 40.0));
    EXPECT_EQ(img.width, 10u);
    EXPECT_EQ(img.height, 8u);
    EXPECT_EQ(img.maxval, 255u);
    // Row y shows Doppler column D-1-y, so +2 (column 6) is image row 1.
    EXPECT_EQ(img.at(3, 1), 255);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 10; ++x)
            if (x != 3 || y != 1) {
                EXPECT_EQ(img.at(x, y), 0);
            }
}

TEST(Heatmap, GreyLevelsFollowDecibelScale) {
    ScatteringMap map;
    map.power = Matrix<double>(4, 2, 1.0);
    map.power(0, 0) = 100.0;  // peak
    map.power(1, 0) = 10.0;   // -10 dB
    map.power(2, 0) = 1e-3;   // -50 dB, below the floor
    const Pgm img = parse_pgm(render_heatmap(map, 40.0));
    EXPECT_EQ(img.at(0, 1), 255);
    EXPECT_NEAR(img.at(1, 1), 255.0 * 0.75, 1.0);
    EXPECT_NEAR(img.at(3, 1), 255.0 * 0.5, 1.0);
    EXPECT_EQ(img.at(2, 1), 0);
    EXPECT_EQ(render_heatmap(map, 40.0), render_heatmap(map, -40.0));
}

TEST(Heatmap, ConstantMapIsUniformAndZeroFloorIsBinary) {
    ScatteringMap map;
    map.power = Matrix<double>(5, 4, 3.0);
    const Pgm uniform = parse_pgm(render_heatmap(map, 30.0));
    for (char c : uniform.pixels) EXPECT_EQ(static_cast<unsigned char>(c), 255);

    map.power(2, 2) = 3.5;
    const Pgm binary = parse_pgm(render_heatmap(map, 0.0));
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 5; ++x) EXPECT_EQ(binary.at(x, y), (x == 2 && y == 1) ? 255 : 0);

    map.power = Matrix<double>(5, 4, 0.0);
    for (char c : parse_pgm(render_heatmap(map, 30.0)).pixels) EXPECT_EQ(c, 0);
}
