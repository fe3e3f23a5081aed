#include "cpcl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "cpcl/error.hpp"

namespace cpcl {

using nlohmann::json;

namespace {

struct SchemaIssue {
    std::string pointer;
    std::string message;
};

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
    throw SchemaIssue{pointer, message};
}

std::string join(const std::string& base, std::string_view key) {
    return base + "/" + std::string(key);
}

void require_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) fail(ptr, "expected an object");
}

void reject_unknown(const json& obj, const std::string& ptr,
                    std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(join(ptr, key), "unknown field '" + key + "'");
    }
}

const json* find(const json& obj, std::string_view key) {
    const auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& ptr, std::string_view key) {
    const json* v = find(obj, key);
    if (!v) fail(ptr, "missing required field '" + std::string(key) + "'");
    return *v;
}

double as_number(const json& v, const std::string& ptr) {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "expected a finite number");
    return d;
}

std::uint64_t as_count(const json& v, const std::string& ptr) {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
        fail(ptr, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

int as_int(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& ptr) {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& ptr) {
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
}

Vec2 as_vec2(const json& v, const std::string& ptr) {
    if (!v.is_array() || v.size() != 2) fail(ptr, "expected a two-element array [x, y]");
    return {as_number(v[0], ptr + "/0"), as_number(v[1], ptr + "/1")};
}

double number_or(const json& obj, const std::string& ptr, std::string_view key, double fallback) {
    const json* v = find(obj, key);
    return v ? as_number(*v, join(ptr, key)) : fallback;
}

std::uint64_t count_or(const json& obj, const std::string& ptr, std::string_view key,
                       std::uint64_t fallback) {
    const json* v = find(obj, key);
    return v ? as_count(*v, join(ptr, key)) : fallback;
}

WindowKind window_or(const json& obj, const std::string& ptr, std::string_view key,
                     WindowKind fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    const auto w = parse_window(as_string(*v, join(ptr, key)));
    if (!w) fail(join(ptr, key), "unknown window (use \"rect\" or \"hann\")");
    return *w;
}

void parse_numerology(const json& j, const std::string& ptr, Scenario& s) {
    require_object(j, ptr);
    reject_unknown(j, ptr,
                   {"subcarrier_spacing_hz", "num_carriers", "num_symbols", "cp_fraction",
                    "carrier_frequency_hz", "prb_carriers", "prb_symbols"});
    auto& nu = s.numerology;
    nu.subcarrier_spacing_hz = as_number(need(j, ptr, "subcarrier_spacing_hz"),
                                         join(ptr, "subcarrier_spacing_hz"));
    nu.num_carriers = as_count(need(j, ptr, "num_carriers"), join(ptr, "num_carriers"));
    nu.num_symbols = as_count(need(j, ptr, "num_symbols"), join(ptr, "num_symbols"));
    nu.cp_fraction = number_or(j, ptr, "cp_fraction", 1.0 / 14.0);
    nu.carrier_frequency_hz =
        as_number(need(j, ptr, "carrier_frequency_hz"), join(ptr, "carrier_frequency_hz"));
    s.prb.carriers = count_or(j, ptr, "prb_carriers", 12);
    s.prb.symbols = count_or(j, ptr, "prb_symbols", 7);
    try {
        nu.validate();
    } catch (const Error& e) {
        fail(ptr, e.what());
    }
    if (s.prb.carriers == 0 || s.prb.symbols == 0) fail(ptr, "PRB shape must be non-empty");
}

void parse_nodes(const json& j, const std::string& ptr, Scenario& s) {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of nodes");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = ptr + "/" + std::to_string(i);
        const json& n = j[i];
        require_object(n, p);
        reject_unknown(n, p, {"id", "kind", "position_m", "velocity_mps", "reflectivity"});
        Node node;
        node.id = as_string(need(n, p, "id"), join(p, "id"));
        if (node.id.empty()) fail(join(p, "id"), "node id must not be empty");
        if (!ids.insert(node.id).second) fail(join(p, "id"), "duplicate node id '" + node.id + "'");
        const auto kind = parse_node_kind(as_string(need(n, p, "kind"), join(p, "kind")));
        if (!kind)
            fail(join(p, "kind"), "kind must be illuminator, sensor, target or clutter");
        node.kind = *kind;
        node.position = as_vec2(need(n, p, "position_m"), join(p, "position_m"));
        if (const json* v = find(n, "velocity_mps")) node.velocity = as_vec2(*v, join(p, "velocity_mps"));
        node.reflectivity = number_or(n, p, "reflectivity", 1.0);
        if (node.reflectivity < 0.0) fail(join(p, "reflectivity"), "must be non-negative");
        if (node.kind == NodeKind::Clutter && (node.velocity.x != 0.0 || node.velocity.y != 0.0))
            fail(join(p, "velocity_mps"), "clutter nodes must be static");
        s.nodes.push_back(std::move(node));
    }
}

const Node* node_by_id(const Scenario& s, const std::string& id) {
    for (const auto& n : s.nodes)
        if (n.id == id) return &n;
    return nullptr;
}

void parse_pairs(const json& j, const std::string& ptr, Scenario& s) {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of pairs");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = ptr + "/" + std::to_string(i);
        const json& e = j[i];
        require_object(e, p);
        reject_unknown(e, p, {"id", "tx", "rx"});
        PairSpec pair;
        pair.tx = as_string(need(e, p, "tx"), join(p, "tx"));
        pair.rx = as_string(need(e, p, "rx"), join(p, "rx"));
        pair.id = find(e, "id") ? as_string(e["id"], join(p, "id")) : pair.tx + "-" + pair.rx;
        if (pair.id.empty() ||
            pair.id.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
                                      "0123456789_.-") != std::string::npos ||
            pair.id.front() == '.')
            fail(join(p, "id"), "pair id '" + pair.id + "' is not usable as a file name");
        if (!ids.insert(pair.id).second) fail(join(p, "id"), "duplicate pair id '" + pair.id + "'");
        const Node* tx = node_by_id(s, pair.tx);
        const Node* rx = node_by_id(s, pair.rx);
        if (!tx) fail(join(p, "tx"), "unknown node '" + pair.tx + "'");
        if (!rx) fail(join(p, "rx"), "unknown node '" + pair.rx + "'");
        if (tx->kind != NodeKind::Illuminator)
            fail(join(p, "tx"), "node '" + pair.tx + "' is not an illuminator");
        if (rx->kind != NodeKind::Sensor)
            fail(join(p, "rx"), "node '" + pair.rx + "' is not a sensor");
        if (tx->position == rx->position)
            fail(p, "tx and rx share a position (zero baseline)");
        s.pairs.push_back(std::move(pair));
    }
}

PrbTile parse_tile(const json& t, const std::string& p) {
    PrbTile tile;
    if (t.is_array()) {
        if (t.size() != 4) fail(p, "tile array must be [user, prb_row, prb_col_start, prb_col_end]");
        tile.user_id = as_int(t[0], p + "/0");
        tile.prb_row = as_count(t[1], p + "/1");
        tile.first_col = as_count(t[2], p + "/2");
        tile.last_col = as_count(t[3], p + "/3");
    } else {
        require_object(t, p);
        reject_unknown(t, p, {"user", "prb_row", "prb_col_start", "prb_col_end"});
        tile.user_id = as_int(need(t, p, "user"), join(p, "user"));
        tile.prb_row = as_count(need(t, p, "prb_row"), join(p, "prb_row"));
        tile.first_col = as_count(need(t, p, "prb_col_start"), join(p, "prb_col_start"));
        tile.last_col = as_count(need(t, p, "prb_col_end"), join(p, "prb_col_end"));
    }
    if (tile.user_id < 0) fail(p, "user ids must be non-negative");
    if (tile.first_col > tile.last_col) fail(p, "prb_col_start exceeds prb_col_end");
    return tile;
}

void parse_allocation(const json& j, const std::string& ptr, Scenario& s) {
    require_object(j, ptr);
    const std::string pattern = as_string(need(j, ptr, "pattern"), join(ptr, "pattern"));
    auto& a = s.allocation;
    if (pattern == "full") {
        reject_unknown(j, ptr, {"pattern", "user"});
        a.pattern = AllocationSpec::Pattern::Full;
        a.user = find(j, "user") ? as_int(j["user"], join(ptr, "user")) : 0;
        if (a.user < 0) fail(join(ptr, "user"), "user ids must be non-negative");
    } else if (pattern == "tiles") {
        reject_unknown(j, ptr, {"pattern", "tiles"});
        a.pattern = AllocationSpec::Pattern::Tiles;
        const json& tiles = need(j, ptr, "tiles");
        const std::string tp = join(ptr, "tiles");
        if (!tiles.is_array() || tiles.empty()) fail(tp, "expected a non-empty array of tiles");
        for (std::size_t i = 0; i < tiles.size(); ++i)
            a.tiles.push_back(parse_tile(tiles[i], tp + "/" + std::to_string(i)));
        // Bounds and overlaps are checked again when the grid is built; doing
        // it here lets the diagnostic point at the offending tile.
        const std::size_t rows = prb_rows(s.numerology, s.prb);
        const std::size_t cols = prb_cols(s.numerology, s.prb);
        for (std::size_t i = 0; i < a.tiles.size(); ++i)
            if (a.tiles[i].prb_row >= rows || a.tiles[i].last_col >= cols)
                fail(tp + "/" + std::to_string(i), "tile lies outside the " +
                                                       std::to_string(rows) + "x" +
                                                       std::to_string(cols) + " PRB grid");
    } else if (pattern == "random") {
        reject_unknown(j, ptr, {"pattern", "density", "users", "seed"});
        a.pattern = AllocationSpec::Pattern::Random;
        a.density = as_number(need(j, ptr, "density"), join(ptr, "density"));
        if (a.density < 0.0 || a.density > 1.0) fail(join(ptr, "density"), "must lie in [0, 1]");
        a.users = find(j, "users") ? as_int(j["users"], join(ptr, "users")) : 1;
        if (a.users < 1) fail(join(ptr, "users"), "need at least one user");
        a.seed = count_or(j, ptr, "seed", 0);
    } else {
        fail(join(ptr, "pattern"), "pattern must be full, tiles or random");
    }
}

void parse_channel(const json& j, const std::string& ptr, Scenario& s) {
    require_object(j, ptr);
    reject_unknown(j, ptr, {"snr_db", "los_excess_db", "reference_range_m", "timing_offset_s",
                            "frequency_offset_hz"});
    if (const json* v = find(j, "snr_db"); v && !v->is_null())
        s.snr_db = as_number(*v, join(ptr, "snr_db"));
    s.los_excess_db = number_or(j, ptr, "los_excess_db", 30.0);
    s.reference_range_m = number_or(j, ptr, "reference_range_m", 100.0);
    if (!(s.reference_range_m > 0.0)) fail(join(ptr, "reference_range_m"), "must be positive");
    s.timing_offset_s = number_or(j, ptr, "timing_offset_s", 0.0);
    s.frequency_offset_hz = number_or(j, ptr, "frequency_offset_hz", 0.0);
}

void parse_processing(const json& j, const std::string& ptr, Scenario& s) {
    require_object(j, ptr);
    reject_unknown(j, ptr, {"first_symbol", "doppler_symbols", "delay_window", "doppler_window",
                            "user", "notch_half_width_bins", "max_excess_delay_s",
                            "max_doppler_hz"});
    const std::size_t total = s.numerology.num_symbols;
    s.first_symbol = count_or(j, ptr, "first_symbol", 0);
    if (s.first_symbol >= total) fail(join(ptr, "first_symbol"), "beyond the last symbol");
    s.doppler_symbols = count_or(j, ptr, "doppler_symbols", total - s.first_symbol);
    if (s.doppler_symbols < 2) fail(join(ptr, "doppler_symbols"), "Doppler window needs D >= 2");
    if (s.first_symbol + s.doppler_symbols > total)
        fail(join(ptr, "doppler_symbols"), "window of " + std::to_string(s.doppler_symbols) +
                                               " symbols exceeds the " + std::to_string(total) +
                                               "-symbol frame");
    s.delay_window = window_or(j, ptr, "delay_window", WindowKind::Rectangular);
    s.doppler_window = window_or(j, ptr, "doppler_window", WindowKind::Rectangular);
    if (const json* v = find(j, "user"); v && !v->is_null()) {
        s.process_user = as_int(*v, join(ptr, "user"));
        const auto& a = s.allocation;
        bool known = true;
        if (a.pattern == AllocationSpec::Pattern::Full) known = a.user == *s.process_user;
        if (a.pattern == AllocationSpec::Pattern::Tiles) {
            known = false;
            for (const auto& t : a.tiles) known = known || t.user_id == *s.process_user;
        }
        if (a.pattern == AllocationSpec::Pattern::Random)
            known = *s.process_user >= 0 && *s.process_user < a.users;
        if (!known) fail(join(ptr, "user"), "user " + std::to_string(*s.process_user) +
                                                " has no allocation");
    }
    s.notch_half_width = count_or(j, ptr, "notch_half_width_bins", 1);
    if (2 * s.notch_half_width + 1 > s.doppler_symbols / 2)
        fail(join(ptr, "notch_half_width_bins"), "notch would remove more than half the Doppler bins");
    if (const json* v = find(j, "max_excess_delay_s"); v && !v->is_null()) {
        s.max_excess_delay_s = as_number(*v, join(ptr, "max_excess_delay_s"));
        if (*s.max_excess_delay_s < 0.0) fail(join(ptr, "max_excess_delay_s"), "must be >= 0");
    }
    if (const json* v = find(j, "max_doppler_hz"); v && !v->is_null()) {
        s.max_doppler_hz = as_number(*v, join(ptr, "max_doppler_hz"));
        if (*s.max_doppler_hz < 0.0) fail(join(ptr, "max_doppler_hz"), "must be >= 0");
    }
}

void parse_cfar(const json& j, const std::string& ptr, Scenario& s) {
    require_object(j, ptr);
    reject_unknown(j, ptr, {"train_delay_bins", "train_doppler_bins", "guard_delay_bins",
                            "guard_doppler_bins", "pfa"});
    auto& c = s.cfar;
    c.train_delay = count_or(j, ptr, "train_delay_bins", c.train_delay);
    c.train_doppler = count_or(j, ptr, "train_doppler_bins", c.train_doppler);
    c.guard_delay = count_or(j, ptr, "guard_delay_bins", c.guard_delay);
    c.guard_doppler = count_or(j, ptr, "guard_doppler_bins", c.guard_doppler);
    c.pfa = number_or(j, ptr, "pfa", c.pfa);
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ptr, e.what());
    }
    if (s.numerology.num_carriers < 2 * (c.guard_delay + c.train_delay) + 1 ||
        s.doppler_symbols < 2 * (c.guard_doppler + c.train_doppler) + 1)
        fail(ptr, "CFAR window does not fit the delay-Doppler map");
}

Scenario parse_document(const json& root) {
    Scenario s;
    const std::string ptr;
    require_object(root, ptr);
    reject_unknown(root, ptr, {"name", "seed", "numerology", "nodes", "pairs", "allocation",
                               "channel", "processing", "cfar", "localization", "output_dir"});
    s.name = find(root, "name") ? as_string(root["name"], "/name") : "scenario";
    s.seed = count_or(root, ptr, "seed", 1);
    parse_numerology(need(root, ptr, "numerology"), "/numerology", s);
    parse_nodes(need(root, ptr, "nodes"), "/nodes", s);
    parse_pairs(need(root, ptr, "pairs"), "/pairs", s);
    if (const json* a = find(root, "allocation"))
        parse_allocation(*a, "/allocation", s);
    if (const json* c = find(root, "channel")) parse_channel(*c, "/channel", s);
    parse_processing(find(root, "processing") ? root["processing"] : json::object(), "/processing",
                     s);
    parse_cfar(find(root, "cfar") ? root["cfar"] : json::object(), "/cfar", s);
    if (const json* l = find(root, "localization")) {
        require_object(*l, "/localization");
        reject_unknown(*l, "/localization", {"enabled"});
        if (const json* e = find(*l, "enabled")) s.localization = as_bool(*e, "/localization/enabled");
    }
    if (const json* o = find(root, "output_dir")) s.output_dir = as_string(*o, "/output_dir");
    return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte offset -> line/column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::ConfigError, std::string(source) + ":" + std::to_string(line) +
                                                ":" + std::to_string(col) +
                                                ": malformed JSON (" + e.what() + ")");
    }
    if (root.is_object() && root.contains("scenario") && root.contains("tool"))
        return parse_scenario(root["scenario"].dump(2), source);
    try {
        return parse_document(root);
    } catch (const SchemaIssue& issue) {
        const auto pos = locate_json_pointer(text, issue.pointer);
        const std::string where = pos ? std::to_string(pos->line) + ":" + std::to_string(pos->column)
                                      : std::string("1:1");
        const std::string field = issue.pointer.empty() ? "/" : issue.pointer;
        throw Error(ErrorCode::ConfigError,
                    std::string(source) + ":" + where + ": " + field + ": " + issue.message);
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, path.string() + ":1:1: cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["numerology"] = {{"subcarrier_spacing_hz", s.numerology.subcarrier_spacing_hz},
                       {"num_carriers", s.numerology.num_carriers},
                       {"num_symbols", s.numerology.num_symbols},
                       {"cp_fraction", s.numerology.cp_fraction},
                       {"carrier_frequency_hz", s.numerology.carrier_frequency_hz},
                       {"prb_carriers", s.prb.carriers},
                       {"prb_symbols", s.prb.symbols}};
    j["nodes"] = json::array();
    for (const auto& n : s.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"kind", std::string(to_string(n.kind))},
                              {"position_m", {n.position.x, n.position.y}},
                              {"velocity_mps", {n.velocity.x, n.velocity.y}},
                              {"reflectivity", n.reflectivity}});
    j["pairs"] = json::array();
    for (const auto& p : s.pairs) j["pairs"].push_back({{"id", p.id}, {"tx", p.tx}, {"rx", p.rx}});
    const auto& a = s.allocation;
    switch (a.pattern) {
        case AllocationSpec::Pattern::Full:
            j["allocation"] = {{"pattern", "full"}, {"user", a.user}};
            break;
        case AllocationSpec::Pattern::Tiles: {
            json tiles = json::array();
            for (const auto& t : a.tiles)
                tiles.push_back({{"user", t.user_id},
                                 {"prb_row", t.prb_row},
                                 {"prb_col_start", t.first_col},
                                 {"prb_col_end", t.last_col}});
            j["allocation"] = {{"pattern", "tiles"}, {"tiles", tiles}};
            break;
        }
        case AllocationSpec::Pattern::Random:
            j["allocation"] = {{"pattern", "random"},
                               {"density", a.density},
                               {"users", a.users},
                               {"seed", a.seed}};
            break;
    }
    j["channel"] = {{"snr_db", s.snr_db ? json(*s.snr_db) : json(nullptr)},
                    {"los_excess_db", s.los_excess_db},
                    {"reference_range_m", s.reference_range_m},
                    {"timing_offset_s", s.timing_offset_s},
                    {"frequency_offset_hz", s.frequency_offset_hz}};
    j["processing"] = {
        {"first_symbol", s.first_symbol},
        {"doppler_symbols", s.doppler_symbols},
        {"delay_window", std::string(to_string(s.delay_window))},
        {"doppler_window", std::string(to_string(s.doppler_window))},
        {"user", s.process_user ? json(*s.process_user) : json(nullptr)},
        {"notch_half_width_bins", s.notch_half_width},
        {"max_excess_delay_s", s.max_excess_delay_s ? json(*s.max_excess_delay_s) : json(nullptr)},
        {"max_doppler_hz", s.max_doppler_hz ? json(*s.max_doppler_hz) : json(nullptr)}};
    j["cfar"] = {{"train_delay_bins", s.cfar.train_delay},
                 {"train_doppler_bins", s.cfar.train_doppler},
                 {"guard_delay_bins", s.cfar.guard_delay},
                 {"guard_doppler_bins", s.cfar.guard_doppler},
                 {"pfa", s.cfar.pfa}};
    j["localization"] = {{"enabled", s.localization}};
    j["output_dir"] = s.output_dir;
    return j;
}

}  // namespace cpcl
