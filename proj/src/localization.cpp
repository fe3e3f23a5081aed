#include "cpcl/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cpcl {

AmbiguousFixError::AmbiguousFixError(std::vector<PositionEstimate> candidates)
    : Error(ErrorCode::AmbiguousFix,
            std::to_string(candidates.size()) + " ellipse intersections fit equally well"),
      candidates_(std::move(candidates)) {}

BistaticMeasurement measurement_from_detection(const Detection& det, const PairGeometry& pair,
                                               double delay_bin_width_s) {
    if (det.refined_delay_s < 0.0)
        throw Error(ErrorCode::NegativeExcess,
                    "excess delay " + std::to_string(det.refined_delay_s) + " s is negative");
    const double bin_m = kSpeedOfLight * delay_bin_width_s;
    BistaticMeasurement m;
    m.pair = pair;
    m.total_range_m = pair.baseline() + kSpeedOfLight * det.refined_delay_s;
    m.doppler_hz = det.refined_doppler_hz;
    m.variance_m2 = bin_m * bin_m / 12.0;
    return m;
}

std::vector<Vec2> ellipse_points(const BistaticMeasurement& meas, std::size_t n) {
    const double baseline = meas.pair.baseline();
    if (!(meas.total_range_m > baseline))
        throw Error(ErrorCode::DegenerateEllipse,
                    "focal sum " + std::to_string(meas.total_range_m) +
                        " m does not exceed the baseline " + std::to_string(baseline) + " m");
    const double a = meas.total_range_m / 2.0;
    const double f = baseline / 2.0;
    const double b = std::sqrt((a - f) * (a + f));
    const Vec2 center = 0.5 * (meas.pair.tx + meas.pair.rx);
    const Vec2 u = (1.0 / baseline) * (meas.pair.tx - meas.pair.rx);
    const Vec2 v{-u.y, u.x};

    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back(center + (a * std::cos(t)) * u + (b * std::sin(t)) * v);
    }
    return pts;
}

namespace {

struct Normal {
    double cost = 0.0;  // sum w r^2
    double a00 = 0.0, a01 = 0.0, a11 = 0.0;
    double g0 = 0.0, g1 = 0.0;
};

Vec2 unit_or_zero(Vec2 d) {
    const double n = norm(d);
    return n > 0.0 ? (1.0 / n) * d : Vec2{};
}

double cost_at(std::span<const BistaticMeasurement> ms, Vec2 p) {
    double c = 0.0;
    for (const auto& m : ms) {
        const double r = distance(p, m.pair.tx) + distance(p, m.pair.rx) - m.total_range_m;
        c += r * r / m.variance_m2;
    }
    return c;
}

Normal normal_equations(std::span<const BistaticMeasurement> ms, Vec2 p) {
    Normal n;
    for (const auto& m : ms) {
        const double w = 1.0 / m.variance_m2;
        const double r = distance(p, m.pair.tx) + distance(p, m.pair.rx) - m.total_range_m;
        const Vec2 j = unit_or_zero(p - m.pair.tx) + unit_or_zero(p - m.pair.rx);
        n.cost += w * r * r;
        n.a00 += w * j.x * j.x;
        n.a01 += w * j.x * j.y;
        n.a11 += w * j.y * j.y;
        n.g0 += w * j.x * r;
        n.g1 += w * j.y * r;
    }
    return n;
}

double weight_sum(std::span<const BistaticMeasurement> ms) {
    double s = 0.0;
    for (const auto& m : ms) s += 1.0 / m.variance_m2;
    return s;
}

PositionEstimate finish(std::span<const BistaticMeasurement> ms, Vec2 p) {
    const Normal n = normal_equations(ms, p);
    PositionEstimate est;
    est.position = p;
    est.residual_rms_m = std::sqrt(n.cost / weight_sum(ms));
    est.pairs_used = ms.size();
    const double det = n.a00 * n.a11 - n.a01 * n.a01;
    const double scale = n.a00 * n.a00 + n.a11 * n.a11 + 2.0 * n.a01 * n.a01;
    if (det > 1e-14 * scale && det > 0.0) {
        est.covariance = {n.a11 / det, -n.a01 / det, -n.a01 / det, n.a00 / det};
    } else {
        const double inf = std::numeric_limits<double>::infinity();
        est.covariance = {inf, inf, inf, inf};
    }
    return est;
}

// Levenberg-damped Gauss-Newton; every accepted step lowers the cost.
Vec2 refine(std::span<const BistaticMeasurement> ms, Vec2 p, std::size_t max_iterations) {
    double lambda = 1e-3;
    Normal n = normal_equations(ms, p);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        if (n.cost == 0.0) return p;
        const double damp = lambda * 0.5 * (n.a00 + n.a11);
        const double b00 = n.a00 + damp;
        const double b11 = n.a11 + damp;
        const double det = b00 * b11 - n.a01 * n.a01;
        if (!(det > 0.0)) return p;
        const Vec2 step{-(b11 * n.g0 - n.a01 * n.g1) / det, -(b00 * n.g1 - n.a01 * n.g0) / det};
        const Vec2 trial = p + step;
        const Normal nt = normal_equations(ms, trial);
        if (nt.cost < n.cost) {
            const double moved = norm(step);
            p = trial;
            n = nt;
            lambda = std::max(lambda * 0.1, 1e-12);
            if (moved <= 1e-13 * (1.0 + norm(p))) return p;
        } else {
            lambda *= 10.0;
            // No representable step lowers the cost any more.
            if (lambda > 1e16) return p;
        }
    }
    throw Error(ErrorCode::NoConvergence, "position solver did not settle within " +
                                              std::to_string(max_iterations) + " iterations");
}

struct Box {
    double x0, x1, y0, y1;
};

Box search_box(std::span<const BistaticMeasurement> ms) {
    const double inf = std::numeric_limits<double>::infinity();
    Box inter{-inf, inf, -inf, inf};
    Box uni{inf, -inf, inf, -inf};
    for (const auto& m : ms) {
        const Vec2 c = 0.5 * (m.pair.tx + m.pair.rx);
        const double a = std::max(m.total_range_m, m.pair.baseline()) / 2.0;
        inter = {std::max(inter.x0, c.x - a), std::min(inter.x1, c.x + a),
                 std::max(inter.y0, c.y - a), std::min(inter.y1, c.y + a)};
        uni = {std::min(uni.x0, c.x - a), std::max(uni.x1, c.x + a),
               std::min(uni.y0, c.y - a), std::max(uni.y1, c.y + a)};
    }
    Box b = (inter.x0 < inter.x1 && inter.y0 < inter.y1) ? inter : uni;
    const double margin = 0.05 * std::hypot(b.x1 - b.x0, b.y1 - b.y0);
    return {b.x0 - margin, b.x1 + margin, b.y0 - margin, b.y1 + margin};
}

}  // namespace

PositionEstimate fuse_position(std::span<const BistaticMeasurement> ms, std::optional<Vec2> init,
                               const FuseOptions& options) {
    if (ms.size() < 2)
        throw Error(ErrorCode::InsufficientMeasurements,
                    "a point fix needs at least two bistatic pairs, got " +
                        std::to_string(ms.size()));
    for (const auto& m : ms) {
        if (!(m.variance_m2 > 0.0))
            throw Error(ErrorCode::InvalidArgument, "measurement variance must be positive");
        if (!(m.pair.baseline() > 0.0))
            throw Error(ErrorCode::CoincidentNodes, "pair '" + m.pair.id + "' has zero baseline");
    }

    if (init) return finish(ms, refine(ms, *init, options.max_iterations));

    // Grid centred on the box so symmetric geometries put a node on the axis
    // of symmetry.
    const Box box = search_box(ms);
    const double diag = std::hypot(box.x1 - box.x0, box.y1 - box.y0);
    const double step = diag / static_cast<double>(std::max<std::size_t>(options.grid_divisions, 2));
    const Vec2 center{0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1)};
    const long hx = static_cast<long>(std::ceil(0.5 * (box.x1 - box.x0) / step));
    const long hy = static_cast<long>(std::ceil(0.5 * (box.y1 - box.y0) / step));
    const long nx = 2 * hx + 1;
    const long ny = 2 * hy + 1;
    const auto node = [&](long i, long j) {
        return Vec2{center.x + static_cast<double>(i - hx) * step,
                    center.y + static_cast<double>(j - hy) * step};
    };
    std::vector<double> cost(static_cast<std::size_t>(nx * ny));
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) cost[static_cast<std::size_t>(j * nx + i)] = cost_at(ms, node(i, j));

    struct Seed {
        double cost;
        Vec2 p;
    };
    std::vector<Seed> seeds;
    for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j * nx + i);
            bool is_min = true;
            for (long dj = -1; dj <= 1 && is_min; ++dj) {
                for (long di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const long ii = i + di;
                    const long jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                    const std::size_t n = static_cast<std::size_t>(jj * nx + ii);
                    if (cost[n] < cost[idx] || (cost[n] == cost[idx] && n < idx)) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) seeds.push_back({cost[idx], node(i, j)});
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.cost < b.cost; });
    if (seeds.size() > 16) seeds.resize(16);

    std::vector<PositionEstimate> candidates;
    for (const auto& s : seeds) {
        PositionEstimate est = finish(ms, refine(ms, s.p, options.max_iterations));
        const auto same = std::find_if(candidates.begin(), candidates.end(), [&](const auto& c) {
            return distance(c.position, est.position) < 0.01 * step;
        });
        if (same == candidates.end())
            candidates.push_back(est);
        else if (est.residual_rms_m < same->residual_rms_m)
            *same = est;
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.residual_rms_m < b.residual_rms_m; });

    double mean_range = 0.0;
    for (const auto& m : ms) mean_range += m.total_range_m;
    mean_range /= static_cast<double>(ms.size());
    // Exact data leaves residuals at rounding level; compare with an absolute floor.
    const double floor = 1e-9 * mean_range;
    std::vector<PositionEstimate> tied{candidates.front()};
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].residual_rms_m <=
            options.ambiguity_ratio * candidates.front().residual_rms_m + floor)
            tied.push_back(candidates[i]);
    if (tied.size() > 1) throw AmbiguousFixError(std::move(tied));
    return candidates.front();
}

}  // namespace cpcl
