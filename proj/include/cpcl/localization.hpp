#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpcl/detection.hpp"
#include "cpcl/error.hpp"
#include "cpcl/scene_geometry.hpp"

namespace cpcl {

struct PairGeometry {
    std::string id;
    Vec2 tx;
    Vec2 rx;

    double baseline() const { return distance(tx, rx); }
};

/// One bistatic ellipse: foci at tx/rx, focal sum `total_range_m`.
struct BistaticMeasurement {
    PairGeometry pair;
    double total_range_m = 0.0;
    double doppler_hz = 0.0;  // carried along, not used by the solver
    double variance_m2 = 1.0;
};

struct PositionEstimate {
    Vec2 position;
    double residual_rms_m = 0.0;  // sqrt(sum w r^2 / sum w)
    std::size_t pairs_used = 0;
    std::array<double, 4> covariance{};  // row-major 2x2, m^2
};

/// Thrown when two distinct intersection basins fit equally well. Candidates
/// are ordered by residual, lowest first.
class AmbiguousFixError : public Error {
public:
    explicit AmbiguousFixError(std::vector<PositionEstimate> candidates);
    const std::vector<PositionEstimate>& candidates() const { return candidates_; }

private:
    std::vector<PositionEstimate> candidates_;
};

/// rho = baseline + c * refined excess delay; variance (c * bin)^2 / 12.
BistaticMeasurement measurement_from_detection(const Detection& det, const PairGeometry& pair,
                                               double delay_bin_width_s);

/// `n` points on the ellipse, starting at the major-axis vertex nearest the
/// transmitter and proceeding counter-clockwise in the ellipse frame.
std::vector<Vec2> ellipse_points(const BistaticMeasurement& meas, std::size_t n);

struct FuseOptions {
    std::size_t max_iterations = 500;
    /// Grid spacing is the search-box diagonal over this.
    std::size_t grid_divisions = 50;
    /// Second basin within this factor of the best residual => ambiguous.
    double ambiguity_ratio = 1.1;
};

/// Weighted least-squares intersection of bistatic ellipses.
///
/// Minimises sum_i (|p - tx_i| + |p - rx_i| - rho_i)^2 / var_i with damped
/// Gauss-Newton. Without `init` every local minimum of a coarse grid over the
/// common bounding box of the ellipses is refined and the best basin returned;
/// AmbiguousFixError is thrown if another basin is as good. Covariance is
/// (J^T W J)^-1 at the solution.
PositionEstimate fuse_position(std::span<const BistaticMeasurement> measurements,
                               std::optional<Vec2> init = std::nullopt,
                               const FuseOptions& options = {});

}  // namespace cpcl
