#include "cpcl/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <map>

#include "cpcl/channel_sim.hpp"
#include "cpcl/error.hpp"
#include "cpcl/localization.hpp"
#include "cpcl/ofdm_grid.hpp"

#ifndef CPCL_VERSION
#define CPCL_VERSION "0.0.0"
#endif

namespace cpcl {

namespace {

constexpr std::uint64_t kGridStream = 1;
constexpr std::uint64_t kPhaseStream = 2;
constexpr std::uint64_t kNoiseStream = 1000;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<PrbTile> allocation_tiles(const Scenario& s) {
    const auto& a = s.allocation;
    switch (a.pattern) {
        case AllocationSpec::Pattern::Full:
            return full_allocation(s.numerology, a.user, s.prb);
        case AllocationSpec::Pattern::Tiles:
            return a.tiles;
        case AllocationSpec::Pattern::Random:
            return random_allocation(s.numerology, a.density, a.users, a.seed, s.prb);
    }
    return {};
}

PairGeometry geometry_of(const Scene& scene, const PairResult& r) {
    return {r.pair_id, scene.node(r.pair.tx_id).position, scene.node(r.pair.rx_id).position};
}

std::vector<PositionRow> localize(const Scene& scene, const std::vector<PairResult>& pairs) {
    std::vector<BistaticMeasurement> ms;
    for (const auto& r : pairs) {
        if (r.detections.empty() || !(r.detections.front().refined_delay_s > 0.0)) continue;
        // A zero-excess return lies on the baseline and carries no ellipse.
        ms.push_back(measurement_from_detection(r.detections.front(), geometry_of(scene, r),
                                                r.notched.delay_bin_width_s));
    }
    if (ms.size() < 2) return {};
    try {
        return {{"strongest", fuse_position(ms)}};
    } catch (const AmbiguousFixError& e) {
        std::vector<PositionRow> rows;
        for (std::size_t i = 0; i < e.candidates().size(); ++i)
            rows.push_back({"strongest/" + std::to_string(i + 1), e.candidates()[i]});
        return rows;
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finaliser over the combined value
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SearchRegion search_region(const Scenario& s, const ScatteringMap& map) {
    SearchRegion region;
    if (s.max_excess_delay_s) {
        const double bins = *s.max_excess_delay_s / map.delay_bin_width_s;
        region.delay_bin_count = static_cast<std::size_t>(std::floor(bins + 1e-9)) + 1;
    }
    if (s.max_doppler_hz)
        region.max_abs_doppler_bin =
            static_cast<std::size_t>(std::floor(*s.max_doppler_hz / map.doppler_bin_width_hz + 1e-9));
    return region;
}

SimulationResult simulate(const Scenario& s) {
    SimulationResult result;
    result.seed = s.seed;

    Scene scene(s.numerology.carrier_frequency_hz,
                GainModel{s.reference_range_m, s.los_excess_db, derive_seed(s.seed, kPhaseStream)});
    for (const auto& n : s.nodes) scene.add_node(n);

    const std::vector<PrbTile> tiles = allocation_tiles(s);
    // One waveform per illuminator, shared by every pair it serves.
    std::map<std::string, ResourceGrid> grids;

    ProcessingOptions proc;
    proc.user_id = s.process_user;
    proc.first_symbol = s.first_symbol;
    proc.doppler_symbols = s.doppler_symbols;
    proc.delay_window = s.delay_window;
    proc.doppler_window = s.doppler_window;

    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
        const PairSpec& spec = s.pairs[i];
        auto grid_it = grids.find(spec.tx);
        if (grid_it == grids.end()) {
            const std::uint64_t seed = derive_seed(derive_seed(s.seed, kGridStream), fnv1a(spec.tx));
            grid_it = grids.emplace(spec.tx, build_grid(s.numerology, tiles, seed, s.prb)).first;
        }
        const ResourceGrid& grid = grid_it->second;
        if (s.process_user && !grid.has_user(*s.process_user))
            throw Error(ErrorCode::UnknownUser, "user " + std::to_string(*s.process_user) +
                                                    " received no PRBs");

        PairResult r;
        r.pair_id = spec.id;
        r.pair = scene.make_pair(spec.tx, spec.rx);
        r.paths = synchronize_to_los(enumerate_paths(scene, r.pair));
        check_narrowband(r.paths, s.numerology);

        ChannelOptions ch;
        ch.snr_db = s.snr_db;
        ch.noise_seed = derive_seed(s.seed, kNoiseStream + i);
        ch.timing_offset_s = s.timing_offset_s;
        ch.frequency_offset_hz = s.frequency_offset_hz;
        const SymbolFrame rx = apply_channel(grid, r.paths, ch);

        ProcessingResult pr = process_frame(rx, grid, proc);
        r.cir = std::move(pr.cir);
        r.map = std::move(pr.map);
        r.notched = suppress_clutter(r.map, s.notch_half_width);
        r.delay_profile = mean_delay_profile(r.cir);
        r.detections = cfar_detect(r.notched, s.cfar, search_region(s, r.notched));
        result.pairs.push_back(std::move(r));
    }

    if (s.localization && s.pairs.size() >= 2) result.positions = localize(scene, result.pairs);
    return result;
}

void write_artifacts(const Scenario& s, const SimulationResult& result,
                     const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

    nlohmann::json files = nlohmann::json::array();
    for (const auto& r : result.pairs) {
        write_map(out_dir / (r.pair_id + ".map"), r.map);
        write_file(out_dir / (r.pair_id + "_detections.csv"), detections_csv(r.pair_id, r.detections));
        write_file(out_dir / (r.pair_id + "_pdp.csv"),
                   delay_profile_csv(r.delay_profile, r.map.delay_bin_width_s));
        files.push_back(r.pair_id + ".map");
        files.push_back(r.pair_id + "_detections.csv");
        files.push_back(r.pair_id + "_pdp.csv");
    }
    if (s.localization && s.pairs.size() >= 2) {
        write_file(out_dir / "positions.csv", positions_csv(result.positions));
        files.push_back("positions.csv");
    }

    nlohmann::json seeds = {{"base", s.seed},
                            {"grid", derive_seed(s.seed, kGridStream)},
                            {"scene_phase", derive_seed(s.seed, kPhaseStream)}};
    nlohmann::json noise = nlohmann::json::object();
    for (std::size_t i = 0; i < s.pairs.size(); ++i)
        noise[s.pairs[i].id] = derive_seed(s.seed, kNoiseStream + i);
    seeds["noise"] = noise;

    nlohmann::json manifest = {{"tool", "cpcl_sim"},
                               {"version", CPCL_VERSION},
                               {"generated_utc", utc_timestamp()},
                               {"seeds", seeds},
                               {"files", files},
                               {"scenario", to_json(s)}};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace cpcl
