#include "cpcl/scene_geometry.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "cpcl/error.hpp"

namespace cpcl {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Illuminator: return "illuminator";
        case NodeKind::Sensor: return "sensor";
        case NodeKind::Target: return "target";
        case NodeKind::Clutter: return "clutter";
    }
    return "unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) {
    if (name == "illuminator") return NodeKind::Illuminator;
    if (name == "sensor") return NodeKind::Sensor;
    if (name == "target") return NodeKind::Target;
    if (name == "clutter") return NodeKind::Clutter;
    return std::nullopt;
}

Scene::Scene(double carrier_frequency_hz, GainModel gains)
    : carrier_frequency_hz_(carrier_frequency_hz), gains_(gains) {
    if (!(carrier_frequency_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "carrier frequency must be positive");
    if (!(gains.reference_range_m > 0.0))
        throw Error(ErrorCode::InvalidArgument, "reference range must be positive");
}

void Scene::add_node(Node node) {
    if (node.id.empty()) throw Error(ErrorCode::InvalidArgument, "node id must not be empty");
    for (const auto& n : nodes_)
        if (n.id == node.id)
            throw Error(ErrorCode::InvalidArgument, "duplicate node id '" + node.id + "'");
    if (node.kind == NodeKind::Clutter && (node.velocity.x != 0.0 || node.velocity.y != 0.0))
        throw Error(ErrorCode::InvalidArgument, "clutter node '" + node.id + "' must be static");
    if (!(node.reflectivity >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "reflectivity must be non-negative");
    nodes_.push_back(std::move(node));
}

const Node& Scene::node(std::string_view id) const {
    for (const auto& n : nodes_)
        if (n.id == id) return n;
    throw Error(ErrorCode::UnknownNode, "no node named '" + std::string(id) + "'");
}

BistaticPair Scene::make_pair(std::string_view tx_id, std::string_view rx_id) const {
    const Node& tx = node(tx_id);
    const Node& rx = node(rx_id);
    const double baseline = distance(tx.position, rx.position);
    if (!(baseline > 0.0))
        throw Error(ErrorCode::CoincidentNodes, "tx '" + tx.id + "' and rx '" + rx.id +
                                                    "' share a position");
    return {tx.id, rx.id, baseline};
}

double range_rate(Vec2 pos_a, Vec2 vel_a, Vec2 pos_b, Vec2 vel_b) {
    const Vec2 d = pos_a - pos_b;
    return dot(d, vel_a - vel_b) / norm(d);
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    // separator so ("ab","c") and ("a","bc") differ
    h ^= 0xff;
    h *= 0x100000001b3ULL;
    return h;
}

double path_phase(std::uint64_t seed, const Node& tx, const Node& rx, const Node& via) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    h = fnv1a(h, tx.id);
    h = fnv1a(h, rx.id);
    h = fnv1a(h, via.id);
    std::mt19937_64 rng(h);
    return std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
}

}  // namespace

Path bistatic_path(const Node& tx, const Node& rx, const Node& scatterer,
                   double carrier_frequency_hz, double reference_range_m,
                   std::uint64_t phase_seed) {
    if (!(carrier_frequency_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "carrier frequency must be positive");
    const double r1 = distance(scatterer.position, tx.position);
    const double r2 = distance(rx.position, scatterer.position);
    if (!(r1 > 0.0) || !(r2 > 0.0))
        throw Error(ErrorCode::CoincidentNodes,
                    "scatterer '" + scatterer.id + "' coincides with tx or rx");

    const double rate = range_rate(scatterer.position, scatterer.velocity, tx.position,
                                   tx.velocity) +
                        range_rate(rx.position, rx.velocity, scatterer.position,
                                   scatterer.velocity);
    const double lambda = kSpeedOfLight / carrier_frequency_hz;

    Path p;
    p.delay_s = (r1 + r2) / kSpeedOfLight;
    p.doppler_hz = -rate / lambda;
    const double magnitude =
        scatterer.reflectivity * reference_range_m * reference_range_m / (r1 * r2);
    p.gain = std::polar(magnitude, path_phase(phase_seed, tx, rx, scatterer));
    p.kind = scatterer.kind == NodeKind::Clutter ? PathKind::Clutter : PathKind::Target;
    p.via_node = scatterer.id;
    return p;
}

Path los_path(const Node& tx, const Node& rx, double carrier_frequency_hz) {
    if (!(carrier_frequency_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "carrier frequency must be positive");
    const double baseline = distance(rx.position, tx.position);
    if (!(baseline > 0.0))
        throw Error(ErrorCode::CoincidentNodes, "tx '" + tx.id + "' and rx '" + rx.id +
                                                    "' share a position");
    const double lambda = kSpeedOfLight / carrier_frequency_hz;
    Path p;
    p.delay_s = baseline / kSpeedOfLight;
    p.doppler_hz = -range_rate(rx.position, rx.velocity, tx.position, tx.velocity) / lambda;
    p.gain = {1.0 / baseline, 0.0};
    p.kind = PathKind::LineOfSight;
    return p;
}

std::vector<Path> enumerate_paths(const Scene& scene, const BistaticPair& pair) {
    const Node& tx = scene.node(pair.tx_id);
    const Node& rx = scene.node(pair.rx_id);
    const double fc = scene.carrier_frequency_hz();
    const GainModel& gm = scene.gains();

    std::vector<const Node*> targets;
    std::vector<const Node*> clutter;
    for (const auto& n : scene.nodes()) {
        if (n.id == tx.id || n.id == rx.id) continue;
        if (n.kind == NodeKind::Target) targets.push_back(&n);
        if (n.kind == NodeKind::Clutter) clutter.push_back(&n);
    }
    const auto by_id = [](const Node* a, const Node* b) { return a->id < b->id; };
    std::sort(targets.begin(), targets.end(), by_id);
    std::sort(clutter.begin(), clutter.end(), by_id);

    std::vector<Path> paths;
    paths.reserve(1 + targets.size() + clutter.size());
    paths.push_back(los_path(tx, rx, fc));
    double strongest_target = 0.0;
    double strongest_clutter = 0.0;
    for (const Node* n : targets) {
        paths.push_back(bistatic_path(tx, rx, *n, fc, gm.reference_range_m, gm.phase_seed));
        strongest_target = std::max(strongest_target, std::abs(paths.back().gain));
    }
    for (const Node* n : clutter) {
        paths.push_back(bistatic_path(tx, rx, *n, fc, gm.reference_range_m, gm.phase_seed));
        strongest_clutter = std::max(strongest_clutter, std::abs(paths.back().gain));
    }
    // Scenes without targets reference the clutter instead.
    const double strongest = strongest_target > 0.0 ? strongest_target : strongest_clutter;
    const double los_magnitude =
        strongest > 0.0 ? strongest * std::pow(10.0, gm.los_excess_db / 20.0) : 1.0;
    paths.front().gain = {los_magnitude, 0.0};
    return paths;
}

}  // namespace cpcl
