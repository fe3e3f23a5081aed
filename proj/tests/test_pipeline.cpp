#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "cpcl/artifacts.hpp"
#include "cpcl/pipeline.hpp"
#include "cpcl/scenario.hpp"

using namespace cpcl;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CPCL_SCENARIO_DIR;

struct Outcome {
    int status = -1;
    std::string output;
};

Outcome cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "cpcl_cli_output.txt";
    const std::string cmd = std::string("\"") + CPCL_SIM_EXE + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    o.output = ss.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cpcl_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

// Small, fast variant of the bundled sparse scenario.
std::string sparse() { return quoted(kScenarios / "three_user_sparse.json"); }

}  // namespace

TEST(Cli, ValidateAcceptsBundledScenarios) {
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".json") continue;
        const auto o = cli("validate " + quoted(entry.path()));
        EXPECT_EQ(o.status, 0) << entry.path() << "\n" << o.output;
    }
}

TEST(Cli, SchemaErrorExitsTwoWithAnchoredDiagnostic) {
    const fs::path dir = scratch("schema");
    const fs::path bad = dir / "bad.json";
    std::string text = slurp(kScenarios / "three_user_sparse.json");
    text.replace(text.find("\"seed\""), 6, "\"sead\"");
    std::ofstream(bad) << text;
    for (const std::string verb : {"validate ", "run "}) {
        const auto o = cli(verb + quoted(bad));
        EXPECT_EQ(o.status, 2) << o.output;
        EXPECT_EQ(o.output.rfind(bad.string() + ":", 0), 0u) << o.output;
        EXPECT_NE(o.output.find("unknown field 'sead'"), std::string::npos) << o.output;
    }

    std::ofstream(dir / "broken.json") << "{\n  \"name\": \"x\",\n  oops\n}\n";
    const auto o = cli("validate " + quoted(dir / "broken.json"));
    EXPECT_EQ(o.status, 2);
    EXPECT_EQ(o.output.rfind((dir / "broken.json").string() + ":3:", 0), 0u) << o.output;
}

TEST(Cli, UsageErrorsExitTwoAndRuntimeErrorsExitOne) {
    EXPECT_EQ(cli("").status, 2);
    EXPECT_EQ(cli("frobnicate").status, 2);
    EXPECT_EQ(cli("run").status, 2);
    EXPECT_EQ(cli("--help").status, 0);

    const fs::path dir = scratch("runtime");
    std::ofstream(dir / "junk.map") << "definitely not a map";
    const auto o = cli("heatmap " + quoted(dir / "junk.map") + " " + quoted(dir / "x.pgm"));
    EXPECT_EQ(o.status, 1);
    EXPECT_EQ(o.output.rfind("error: ", 0), 0u) << o.output;
}

TEST(Cli, RunWritesArtifactsAndHeatmap) {
    const fs::path out = scratch("run");
    const auto o = cli("run " + sparse() + " --out " + quoted(out));
    ASSERT_EQ(o.status, 0) << o.output;
    for (const char* name : {"rx1.map", "rx2.map", "rx1_detections.csv", "rx2_detections.csv", "rx1_pdp.csv",
                             "manifest.json", "positions.csv"})
        EXPECT_TRUE(fs::exists(out / name)) << name;

    const auto map = read_map(out / "rx1.map");
    EXPECT_EQ(map.delay_bins(), 72u);
    EXPECT_EQ(map.doppler_bins(), 140u);

    const auto h = cli("heatmap " + quoted(out / "rx1.map") + " " + quoted(out / "rx1.pgm") + " --floor-db 30");
    ASSERT_EQ(h.status, 0) << h.output;
    EXPECT_EQ(slurp(out / "rx1.pgm"), render_heatmap(map, 30.0));

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["tool"], "cpcl_sim");
    EXPECT_EQ(manifest["seeds"]["base"], 3);
    EXPECT_TRUE(manifest["seeds"]["noise"].contains("rx2"));
}

TEST(Cli, RunsAreReproducibleAndManifestReplays) {
    const fs::path a = scratch("rep_a");
    const fs::path b = scratch("rep_b");
    const fs::path c = scratch("rep_c");
    ASSERT_EQ(cli("run " + sparse() + " --out " + quoted(a)).status, 0);
    ASSERT_EQ(cli("run " + sparse() + " --out " + quoted(b)).status, 0);
    ASSERT_EQ(cli("run " + quoted(a / "manifest.json") + " --out " + quoted(c)).status, 0);
    for (const char* name : {"rx1.map", "rx2.map", "rx1_detections.csv", "rx2_detections.csv", "positions.csv"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(c / name)) << name;
    }

    const fs::path d = scratch("rep_d");
    ASSERT_EQ(cli("run " + sparse() + " --seed 99 --out " + quoted(d)).status, 0);
    EXPECT_NE(slurp(a / "rx1.map"), slurp(d / "rx1.map"));
    EXPECT_EQ(nlohmann::json::parse(slurp(d / "manifest.json"))["seeds"]["base"], 99);
}

TEST(Pipeline, NoTargetsGivesHeaderOnlyCsvs) {
    Scenario s = load_scenario(kScenarios / "no_targets.json");
    s.numerology.num_symbols = 200;
    s.doppler_symbols = 200;
    const auto result = simulate(s);
    ASSERT_EQ(result.pairs.size(), 2u);
    for (const auto& p : result.pairs) EXPECT_TRUE(p.detections.empty()) << p.pair_id;
    EXPECT_TRUE(result.positions.empty());

    const fs::path out = scratch("empty");
    write_artifacts(s, result, out);
    EXPECT_EQ(slurp(out / "rx1_detections.csv"),
              "pair_id,delay_bin,doppler_bin,refined_delay_s,refined_doppler_hz,peak_power,snr_db\n");
    EXPECT_EQ(slurp(out / "positions.csv"), "target_hint,x_m,y_m,residual_rms_m,n_pairs\n");
}

TEST(Pipeline, DerivedSeedsAreDistinctAndStable) {
    EXPECT_EQ(derive_seed(7, 1), derive_seed(7, 1));
    EXPECT_NE(derive_seed(7, 1), derive_seed(7, 2));
    EXPECT_NE(derive_seed(7, 1), derive_seed(8, 1));
}

TEST(Pipeline, SearchRegionFollowsLimits) {
    Scenario s = load_scenario(kScenarios / "three_user_sparse.json");
    ScatteringMap map;
    map.power = Matrix<double>(72, 140);
    map.delay_bin_width_s = 1.0 / (72 * 15e3);
    map.doppler_bin_width_hz = 100.0;
    s.max_excess_delay_s = 10 * map.delay_bin_width_s;
    s.max_doppler_hz = 450.0;
    const auto r = search_region(s, map);
    EXPECT_EQ(r.delay_bin_count, 11u);
    EXPECT_EQ(r.max_abs_doppler_bin, 4u);
    s.max_excess_delay_s.reset();
    s.max_doppler_hz.reset();
    const auto all = search_region(s, map);
    EXPECT_FALSE(all.delay_bin_count.has_value());
    EXPECT_FALSE(all.max_abs_doppler_bin.has_value());
}
