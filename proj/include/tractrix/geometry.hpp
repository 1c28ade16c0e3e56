#pragma once

// Planar primitives shared by the whole library: points, poses, angle
// normalization, leading-curve evaluators and trace containers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tractrix {

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double inf = std::numeric_limits<double>::infinity();

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

[[nodiscard]] constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
[[nodiscard]] constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
[[nodiscard]] constexpr Point2 operator*(double k, Point2 p) { return {k * p.x, k * p.y}; }
[[nodiscard]] constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
[[nodiscard]] constexpr Point2 perp(Point2 p) { return {-p.y, p.x}; }
[[nodiscard]] inline Point2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
[[nodiscard]] inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Reduce an angle to (-pi, pi].
[[nodiscard]] inline double normalize_angle(double a) {
    double r = std::remainder(a, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

/// Continuation of `raw` that stays within pi of `anchor`; used to keep
/// unwrapped angle accumulators continuous across atan2 branch cuts.
[[nodiscard]] inline double unwrap_near(double anchor, double raw) {
    return anchor + normalize_angle(raw - anchor);
}

/// Position plus tangent direction. tangent_angle is kept in (-pi, pi].
struct Pose {
    Point2 position;
    double tangent_angle = 0.0;
};

/// Rotation followed by translation.
struct RigidMotion {
    double cos_r = 1.0;
    double sin_r = 0.0;
    Point2 shift;

    [[nodiscard]] static RigidMotion rotation(double angle, Point2 shift = {}) {
        return {std::cos(angle), std::sin(angle), shift};
    }
    [[nodiscard]] Point2 apply(Point2 p) const {
        return {cos_r * p.x - sin_r * p.y + shift.x, sin_r * p.x + cos_r * p.y + shift.y};
    }
    [[nodiscard]] double apply_angle(double a) const { return a + std::atan2(sin_r, cos_r); }
};

/// Sample of a leading curve at arc length l: position, unwrapped tangent
/// direction and signed curvature.
struct CurvePoint {
    Point2 position;
    double theta = 0.0;
    double curvature = 0.0;
};

/// Tangent-direction jump of the leading curve at arc length l. turn == 0
/// marks a smooth join where only the curvature is discontinuous; the
/// integrator still lands a step exactly there.
struct Corner {
    double l = 0.0;
    double turn = 0.0;
};

/// Arc-length parametrized leading curve. eval must satisfy |d position/dl| = 1
/// and d theta/dl = curvature wherever the curvature is continuous; corners
/// carry the tangent jumps. theta is unwrapped (continuous between corners).
struct LeadingCurve {
    std::function<CurvePoint(double)> eval;
    std::vector<Corner> corners;            // sorted by l, within (0, total_length]
    double total_length = inf;              // inf for unbounded curves
    std::optional<double> period;           // set for closed curves
    double max_abs_curvature = 0.0;         // 0 means straight (used for step sizing)

    [[nodiscard]] CurvePoint at(double l) const { return eval(l); }
};

enum class Termination { ReachedLength, Stopped, Closed };

enum class ModeSwitchKind { StopSlack, CuspReversal };

/// Record of a leash-regime event at leading arc l.
struct ModeSwitch {
    double l = 0.0;
    ModeSwitchKind kind = ModeSwitchKind::CuspReversal;
    std::size_t sample_index = 0;
};

/// One trace sample. l is leading-curve arc, s is trace arc (monotone),
/// nu is the leash deviation angle in [-pi/2, pi/2], curvature is signed and
/// becomes +-inf exactly at cusps.
struct TraceSample {
    double l = 0.0;
    double s = 0.0;
    double nu = 0.0;
    Pose pose;
    double curvature = 0.0;
};

struct Trace {
    std::vector<TraceSample> samples;
    std::vector<ModeSwitch> mode_switches;
    Termination termination = Termination::ReachedLength;
};

namespace detail {

inline void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace detail

/// Polyline leading curve: straight segments joined by corner impulses.
/// A closing vertex equal to the first makes the curve periodic, with the
/// closing corner reported at l = total length. Throws on fewer than two
/// distinct points, duplicate consecutive points, or a reversal corner
/// (|turn| >= pi).
[[nodiscard]] inline LeadingCurve resample_polyline(std::span<const Point2> points,
                                                    std::vector<double>* corner_angles = nullptr) {
    detail::require(points.size() >= 2, "polyline needs at least two points");
    const bool closed = points.size() >= 3 &&
                        points.front().x == points.back().x &&
                        points.front().y == points.back().y;

    struct Segment {
        Point2 start;
        double theta;
        double length;
        double l0;
    };
    auto segments = std::make_shared<std::vector<Segment>>();
    double l_acc = 0.0;
    const std::size_t n_seg = points.size() - 1;
    for (std::size_t i = 0; i < n_seg; ++i) {
        const Point2 d = points[i + 1] - points[i];
        const double len = norm(d);
        detail::require(len > 0.0, "polyline has a zero-length segment");
        segments->push_back({points[i], std::atan2(d.y, d.x), len, l_acc});
        l_acc += len;
    }

    LeadingCurve curve;
    curve.total_length = l_acc;
    if (closed) curve.period = l_acc;

    const std::size_t interior = n_seg - 1;
    for (std::size_t i = 0; i < interior; ++i) {
        const double turn = normalize_angle((*segments)[i + 1].theta - (*segments)[i].theta);
        detail::require(std::abs(turn) < pi, "polyline reverses direction at a corner");
        if (turn != 0.0) curve.corners.push_back({(*segments)[i + 1].l0, turn});
        if (corner_angles && turn != 0.0) corner_angles->push_back(turn);
    }
    if (closed) {
        const double turn = normalize_angle(segments->front().theta - segments->back().theta);
        detail::require(std::abs(turn) < pi, "polyline reverses direction at a corner");
        if (turn != 0.0) curve.corners.push_back({l_acc, turn});
        if (corner_angles && turn != 0.0) corner_angles->push_back(turn);
    }

    // Each segment keeps an unwrapped tangent accumulated from the corner
    // turns, so theta is continuous within a segment and jumps exactly at the
    // recorded corners (including full-lap winding on closed polylines).
    auto theta_unwrapped = std::make_shared<std::vector<double>>();
    theta_unwrapped->push_back(segments->front().theta);
    for (std::size_t i = 1; i < segments->size(); ++i)
        theta_unwrapped->push_back(theta_unwrapped->back() +
                                   normalize_angle((*segments)[i].theta - (*segments)[i - 1].theta));
    double lap_turn = 0.0;
    if (closed)
        lap_turn = theta_unwrapped->back() - theta_unwrapped->front() +
                   normalize_angle(segments->front().theta - segments->back().theta);

    const double total = l_acc;
    curve.eval = [segments, theta_unwrapped, closed, total, lap_turn](double l) -> CurvePoint {
        double lp = l;
        double wind = 0.0;
        if (closed) {
            const double laps = std::floor(l / total);
            lp = l - laps * total;
            wind = laps * lap_turn;
        } else {
            detail::require(l >= -1e-12 && l <= total + 1e-12, "arc length outside polyline");
            lp = std::clamp(l, 0.0, total);
        }
        std::size_t i = 0;
        while (i + 1 < segments->size() && (*segments)[i + 1].l0 <= lp) ++i;
        const Segment& seg = (*segments)[i];
        const double along = lp - seg.l0;
        return {seg.start + along * unit_vector(seg.theta), (*theta_unwrapped)[i] + wind, 0.0};
    };
    return curve;
}

/// Distance from a point to a sampled curve, refined by a local quadratic fit
/// through the three samples nearest the best vertex. Falls back to plain
/// segment distance at the ends.
[[nodiscard]] inline double distance_to_samples(Point2 p, std::span<const Point2> samples) {
    detail::require(samples.size() >= 2, "need at least two samples");
    std::size_t best = 0;
    double best_d2 = inf;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Point2 d = samples[i] - p;
        const double d2 = dot(d, d);
        if (d2 < best_d2) { best_d2 = d2; best = i; }
    }
    const auto segment_distance = [&](std::size_t i) {
        const Point2 a = samples[i];
        const Point2 b = samples[i + 1];
        const Point2 ab = b - a;
        const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
        return distance(p, a + t * ab);
    };
    if (best == 0) return segment_distance(0);
    if (best + 1 == samples.size()) return segment_distance(best - 1);

    // Quadratic through the three nearest samples, parametrized by chord length.
    const Point2 q0 = samples[best - 1];
    const Point2 q1 = samples[best];
    const Point2 q2 = samples[best + 1];
    const double u1 = distance(q0, q1);
    const double u2 = u1 + distance(q1, q2);
    const auto lagrange = [&](double u) -> Point2 {
        const double c0 = (u - u1) * (u - u2) / (u1 * u2);
        const double c1 = u * (u - u2) / (u1 * (u1 - u2));
        const double c2 = u * (u - u1) / (u2 * (u2 - u1));
        return c0 * q0 + c1 * q1 + c2 * q2;
    };
    double lo = 0.0;
    double hi = u2;
    for (int iter = 0; iter < 80; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (distance(p, lagrange(m1)) < distance(p, lagrange(m2))) hi = m2;
        else lo = m1;
    }
    return distance(p, lagrange(0.5 * (lo + hi)));
}

} // namespace tractrix
