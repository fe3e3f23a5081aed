#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpcl {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

enum class NodeKind { Illuminator, Sensor, Target, Clutter };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view name);

struct Node {
    std::string id;
    Vec2 position;         // m
    Vec2 velocity;         // m/s
    NodeKind kind = NodeKind::Target;
    double reflectivity = 1.0;  // linear amplitude factor for scatterers
};

enum class PathKind { LineOfSight, Target, Clutter };

struct Path {
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    std::complex<double> gain{1.0, 0.0};
    PathKind kind = PathKind::LineOfSight;
    std::optional<std::string> via_node;
};

struct BistaticPair {
    std::string tx_id;
    std::string rx_id;
    double baseline_m = 0.0;
};

struct GainModel {
    double reference_range_m = 100.0;
    double los_excess_db = 30.0;
    std::uint64_t phase_seed = 0;
};

/// Immutable-after-build 2D scene. Node ids are unique; clutter is static.
class Scene {
public:
    Scene() = default;
    Scene(double carrier_frequency_hz, GainModel gains);

    void add_node(Node node);

    const Node& node(std::string_view id) const;
    const std::vector<Node>& nodes() const { return nodes_; }
    double carrier_frequency_hz() const { return carrier_frequency_hz_; }
    const GainModel& gains() const { return gains_; }

    /// Resolves the ids and computes the baseline.
    BistaticPair make_pair(std::string_view tx_id, std::string_view rx_id) const;

private:
    double carrier_frequency_hz_ = 1.0e9;
    GainModel gains_;
    std::vector<Node> nodes_;
};

/// Rate of change of |a - b| given the two velocities.
double range_rate(Vec2 pos_a, Vec2 vel_a, Vec2 pos_b, Vec2 vel_b);

/// Single-bounce path tx -> scatterer -> rx.
///
/// Delay is the total path length over c; Doppler is -(1/lambda) times the
/// rate of change of that length. The amplitude follows
/// reflectivity * R0^2 / (r1 * r2), so a unit scatterer at R0 from both ends
/// has unit gain. The phase is uniform and reproducible from `phase_seed` and
/// the three node ids.
Path bistatic_path(const Node& tx, const Node& rx, const Node& scatterer,
                   double carrier_frequency_hz, double reference_range_m,
                   std::uint64_t phase_seed = 0);

/// Direct path. Gain is 1/baseline with zero phase; enumerate_paths rescales
/// it against the scatter paths of the same pair.
Path los_path(const Node& tx, const Node& rx, double carrier_frequency_hz);

/// LoS first, then targets and clutter each sorted by node id. The LoS
/// amplitude is set los_excess_db above the strongest target path, or above
/// the strongest clutter path when the scene has no targets.
std::vector<Path> enumerate_paths(const Scene& scene, const BistaticPair& pair);

}  // namespace cpcl
