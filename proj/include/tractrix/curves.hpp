#pragma once

// Leading-curve factories: canonical circle and line in closed form, plus an
// arc-length reparametrization adapter for analytic curves given in an
// arbitrary regular parameter (ellipse, sinusoid, lemniscate, spiral, simple
// composites).

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "tractrix/geometry.hpp"

namespace tractrix {

/// Circle of curvature K through the origin, tangent +y at l = 0.
/// Center sits at (-1/K, 0); K > 0 turns left, K < 0 turns right.
[[nodiscard]] inline LeadingCurve circle_curve(double K) {
    detail::require(K != 0.0 && std::isfinite(K), "circle curvature must be nonzero");
    LeadingCurve curve;
    curve.total_length = inf;
    curve.period = 2.0 * pi / std::abs(K);
    curve.max_abs_curvature = std::abs(K);
    curve.eval = [K](double l) -> CurvePoint {
        const double h = 0.5 * K * l;
        const double x = -2.0 * std::sin(h) * std::sin(h) / K;
        const double y = std::sin(K * l) / K;
        return {{x, y}, pi / 2.0 + K * l, K};
    };
    return curve;
}

/// Straight line through the origin along +y.
[[nodiscard]] inline LeadingCurve line_curve() {
    LeadingCurve curve;
    curve.total_length = inf;
    curve.eval = [](double l) -> CurvePoint { return {{0.0, l}, pi / 2.0, 0.0}; };
    return curve;
}

/// One piece of a parametric curve; point, first and second derivative over
/// [u0, u1]. The parametrization must be regular (|d1| > 0).
struct ParametricPiece {
    std::function<Point2(double)> point;
    std::function<Point2(double)> d1;
    std::function<Point2(double)> d2;
    double u0 = 0.0;
    double u1 = 1.0;
};

namespace detail {

struct ArcNode {
    std::size_t piece = 0;
    double u = 0.0;
    double l = 0.0;
    double theta = 0.0;     // unwrapped
    double theta_raw = 0.0; // atan2 value at the node
};

inline double speed(const ParametricPiece& piece, double u) { return norm(piece.d1(u)); }

/// 5-point Gauss-Legendre integral of |d1| over [a, b].
inline double arc_increment(const ParametricPiece& piece, double a, double b) {
    static constexpr std::array<double, 5> x{0.0, 0.5384693101056831, -0.5384693101056831,
                                             0.9061798459386640, -0.9061798459386640};
    static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665,
                                             0.4786286704993665, 0.2369268850561891,
                                             0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * speed(piece, mid + half * x[i]);
    return half * acc;
}

inline double curvature_of(const ParametricPiece& piece, double u) {
    const Point2 v = piece.d1(u);
    const Point2 a = piece.d2(u);
    const double sp = norm(v);
    return cross(v, a) / (sp * sp * sp);
}

} // namespace detail

/// Arc-length form of a piecewise parametric curve. Piece junctions become
/// corners when the tangent jumps, or zero-turn breakpoints when only the
/// curvature does. With `periodic` set, the curve repeats with the rigid step
/// A(l + L) = A(l) + shift (full-turn rotations only; the per-period turning
/// must be a multiple of 2 pi, which covers closed curves and wave-like ones).
[[nodiscard]] inline LeadingCurve arclength_curve(std::vector<ParametricPiece> pieces,
                                                  bool periodic = false,
                                                  std::size_t grid_per_piece = 1024) {
    detail::require(!pieces.empty(), "need at least one parametric piece");
    auto shared_pieces = std::make_shared<std::vector<ParametricPiece>>(std::move(pieces));
    auto nodes = std::make_shared<std::vector<detail::ArcNode>>();

    LeadingCurve curve;
    double l_acc = 0.0;
    double theta_acc = 0.0;
    double max_q = 0.0;
    bool first_node = true;
    for (std::size_t pi_idx = 0; pi_idx < shared_pieces->size(); ++pi_idx) {
        const ParametricPiece& piece = (*shared_pieces)[pi_idx];
        detail::require(piece.u1 > piece.u0, "parametric piece has an empty range");
        const double du = (piece.u1 - piece.u0) / static_cast<double>(grid_per_piece);
        const Point2 t0 = piece.d1(piece.u0);
        const double raw0 = std::atan2(t0.y, t0.x);
        if (first_node) {
            theta_acc = raw0;
            first_node = false;
        } else {
            // Tangent jump relative to the previous piece end.
            const double jump = normalize_angle(raw0 - nodes->back().theta_raw);
            detail::require(std::abs(jump) < pi, "pieces reverse direction at a junction");
            curve.corners.push_back({l_acc, jump});
            theta_acc = nodes->back().theta + jump;
        }
        nodes->push_back({pi_idx, piece.u0, l_acc, theta_acc, raw0});
        for (std::size_t g = 1; g <= grid_per_piece; ++g) {
            const double ua = piece.u0 + static_cast<double>(g - 1) * du;
            const double ub = (g == grid_per_piece) ? piece.u1 : piece.u0 + static_cast<double>(g) * du;
            l_acc += detail::arc_increment(piece, ua, ub);
            const Point2 t = piece.d1(ub);
            const double raw = std::atan2(t.y, t.x);
            theta_acc = unwrap_near(theta_acc, raw);
            nodes->push_back({pi_idx, ub, l_acc, theta_acc, raw});
            max_q = std::max(max_q, std::abs(detail::curvature_of(piece, ub)));
        }
        max_q = std::max(max_q, std::abs(detail::curvature_of(piece, piece.u0)));
    }
    // Keep only nonzero-turn junction corners, but preserve every junction as a
    // step-alignment breakpoint.
    for (Corner& c : curve.corners)
        if (std::abs(c.turn) < 1e-14) c.turn = 0.0;

    curve.total_length = l_acc;
    curve.max_abs_curvature = max_q;

    Point2 period_shift{};
    double period_turn = 0.0;
    if (periodic) {
        period_shift = shared_pieces->back().point(shared_pieces->back().u1) -
                       shared_pieces->front().point(shared_pieces->front().u0);
        period_turn = nodes->back().theta - nodes->front().theta;
        const double frac = normalize_angle(period_turn);
        detail::require(std::abs(frac) < 1e-9, "per-period turning must be a multiple of 2 pi");
        curve.period = l_acc;
    }

    const double total = l_acc;
    curve.eval = [shared_pieces, nodes, periodic, total, period_shift,
                  period_turn](double l) -> CurvePoint {
        double lp = l;
        double laps = 0.0;
        if (periodic) {
            laps = std::floor(l / total);
            lp = l - laps * total;
        } else {
            detail::require(l >= -1e-9 && l <= total + 1e-9, "arc length outside curve domain");
            lp = std::clamp(l, 0.0, total);
        }
        // Bracket, then Newton on the Gauss increment from the node.
        std::size_t lo = 0;
        std::size_t hi = nodes->size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if ((*nodes)[mid].l <= lp) lo = mid;
            else hi = mid;
        }
        const detail::ArcNode& node = (*nodes)[lo];
        const detail::ArcNode& node_hi = (*nodes)[hi];
        const ParametricPiece& piece = (*shared_pieces)[node.piece];
        const double u_min = node.u;
        const double u_max = (node_hi.piece == node.piece) ? node_hi.u : piece.u1;
        double u = u_min;
        if (node_hi.l > node.l)
            u = u_min + (u_max - u_min) * (lp - node.l) / (node_hi.l - node.l);
        for (int iter = 0; iter < 6; ++iter) {
            const double f = node.l + detail::arc_increment(piece, node.u, u) - lp;
            const double sp = detail::speed(piece, u);
            u = std::clamp(u - f / sp, u_min, u_max);
        }
        const Point2 t = piece.d1(u);
        const double theta = node.theta + normalize_angle(std::atan2(t.y, t.x) - node.theta_raw) +
                             laps * period_turn;
        return {piece.point(u) + laps * period_shift, theta, detail::curvature_of(piece, u)};
    };
    return curve;
}

/// Ellipse (a cos u, b sin u), counterclockwise, starting at (a, 0).
[[nodiscard]] inline LeadingCurve ellipse_curve(double a, double b) {
    detail::require(a > 0.0 && b > 0.0, "ellipse semi-axes must be positive");
    ParametricPiece piece{
        [a, b](double u) -> Point2 { return {a * std::cos(u), b * std::sin(u)}; },
        [a, b](double u) -> Point2 { return {-a * std::sin(u), b * std::cos(u)}; },
        [a, b](double u) -> Point2 { return {-a * std::cos(u), -b * std::sin(u)}; },
        0.0, 2.0 * pi};
    return arclength_curve({std::move(piece)}, true);
}

/// Sinusoid (u, amplitude * sin(2 pi u / wavelength)), one wavelength per period.
[[nodiscard]] inline LeadingCurve sinusoid_curve(double amplitude, double wavelength) {
    detail::require(wavelength > 0.0, "wavelength must be positive");
    const double om = 2.0 * pi / wavelength;
    ParametricPiece piece{
        [amplitude, om](double u) -> Point2 { return {u, amplitude * std::sin(om * u)}; },
        [amplitude, om](double u) -> Point2 { return {1.0, amplitude * om * std::cos(om * u)}; },
        [amplitude, om](double u) -> Point2 {
            return {0.0, -amplitude * om * om * std::sin(om * u)};
        },
        0.0, wavelength};
    return arclength_curve({std::move(piece)}, true);
}

/// Bernoulli lemniscate with half-width a, traversed as a figure eight.
[[nodiscard]] inline LeadingCurve lemniscate_curve(double a) {
    detail::require(a > 0.0, "lemniscate size must be positive");
    const auto den = [](double t) { return 1.0 + std::sin(t) * std::sin(t); };
    ParametricPiece piece{
        [a, den](double t) -> Point2 {
            const double d = den(t);
            return {a * std::cos(t) / d, a * std::sin(t) * std::cos(t) / d};
        },
        [a, den](double t) -> Point2 {
            const double d = den(t);
            const double s2 = std::sin(2.0 * t);
            const double n1 = -std::sin(t) * d - std::cos(t) * s2;
            const double n2 = 2.0 * std::cos(2.0 * t) * d - s2 * s2;
            return {a * n1 / (d * d), 0.5 * a * n2 / (d * d)};
        },
        [a, den](double t) -> Point2 {
            const double d = den(t);
            const double s2 = std::sin(2.0 * t);
            const double c2 = std::cos(2.0 * t);
            const double n1 = -std::sin(t) * d - std::cos(t) * s2;
            const double n1p = -std::cos(t) * (d + 2.0 * c2);
            const double n2 = 2.0 * c2 * d - s2 * s2;
            const double n2p = -2.0 * s2 * (2.0 * d + c2);
            const double x2 = a * (n1p * d - 2.0 * n1 * s2) / (d * d * d);
            const double y2 = 0.5 * a * (n2p * d - 2.0 * n2 * s2) / (d * d * d);
            return {x2, y2};
        },
        0.0, 2.0 * pi};
    return arclength_curve({std::move(piece)}, true);
}

/// Archimedean spiral with pitch R: A(t) = R t (sin t, -cos t). Both signs of
/// t lie on the same doubled spiral; the curve passes the pole at t = 0.
[[nodiscard]] inline LeadingCurve archimedean_spiral_curve(double R, double t_begin, double t_end) {
    detail::require(R > 0.0, "spiral pitch must be positive");
    detail::require(t_end > t_begin, "empty spiral range");
    ParametricPiece piece{
        [R](double t) -> Point2 { return {R * t * std::sin(t), -R * t * std::cos(t)}; },
        [R](double t) -> Point2 {
            return {R * (std::sin(t) + t * std::cos(t)), R * (-std::cos(t) + t * std::sin(t))};
        },
        [R](double t) -> Point2 {
            return {R * (2.0 * std::cos(t) - t * std::sin(t)),
                    R * (2.0 * std::sin(t) + t * std::cos(t))};
        },
        t_begin, t_end};
    return arclength_curve({std::move(piece)}, false, 2048);
}

/// Parabola arc joined tangent-continuously to a straight ray. The curvature
/// jumps at the junction, which the adapter records as a zero-turn breakpoint.
[[nodiscard]] inline LeadingCurve parabola_line_curve(double approach = 2.0, double run = 4.0) {
    detail::require(approach > 0.0 && run > 0.0, "composite extents must be positive");
    ParametricPiece parabola{
        [](double u) -> Point2 { return {u, 0.5 * u * u}; },
        [](double u) -> Point2 { return {1.0, u}; },
        [](double) -> Point2 { return {0.0, 1.0}; },
        -approach, 0.0};
    ParametricPiece ray{
        [](double u) -> Point2 { return {u, 0.0}; },
        [](double) -> Point2 { return {1.0, 0.0}; },
        [](double) -> Point2 { return {0.0, 0.0}; },
        0.0, run};
    return arclength_curve({std::move(parabola), std::move(ray)});
}

/// Orientation-reversed view of `curve` truncated at l_end: the reversed curve
/// starts at the far end and runs back, with the tangent flipped and the
/// signed curvature negated.
[[nodiscard]] inline LeadingCurve reverse_of(const LeadingCurve& curve, double l_end) {
    detail::require(l_end > 0.0 && l_end <= curve.total_length, "reverse range outside curve");
    LeadingCurve rev;
    rev.total_length = l_end;
    rev.max_abs_curvature = curve.max_abs_curvature;
    auto base = std::make_shared<LeadingCurve>(curve);
    rev.eval = [base, l_end](double lam) -> CurvePoint {
        const CurvePoint p = base->at(l_end - lam);
        return {p.position, p.theta + pi, -p.curvature};
    };
    for (auto it = curve.corners.rbegin(); it != curve.corners.rend(); ++it)
        if (it->l < l_end) rev.corners.push_back({l_end - it->l, -it->turn});
    return rev;
}

} // namespace tractrix
