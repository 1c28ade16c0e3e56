#pragma once

// =============================================================================
// Closed forms for tractrices whose leading curve is a circle or a line.
// Everything here is parametrized by the shape number w (leading curvature
// times leash length) and the signed leash length T. The trace arc length s
// measures along the tractrix itself, starting at the canonical cusp.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "tractrix/curves.hpp"
#include "tractrix/geometry.hpp"

namespace tractrix {

/// Shape of a circle/line tractrix. w = K * T where K is the signed curvature
/// of the leading circle (0 for a line). T < 0 selects the reverse family,
/// which is only consistent for w < -1.
struct ShapeParams {
    double w = 0.0;
    double T = 1.0;

    [[nodiscard]] static ShapeParams from_w(double w, double T) {
        detail::require(std::isfinite(w) && std::isfinite(T) && T != 0.0,
                        "shape parameters must be finite with a nonzero leash");
        if (T > 0.0)
            detail::require(w > -1.0, "forward family requires w > -1");
        else
            detail::require(w < -1.0, "reverse family requires w < -1");
        return {w, T};
    }

    [[nodiscard]] static ShapeParams from_curvature(double K, double T) {
        return from_w(K * T, T);
    }

    /// Curvature of the leading circle (zero for the line case).
    [[nodiscard]] double leading_curvature() const { return w / T; }
};

enum class TractrixClass { T1, T2, T3, T4, T5, Reverse };

[[nodiscard]] inline TractrixClass classify(ShapeParams p) {
    if (p.T < 0.0) return TractrixClass::Reverse;
    if (p.w > 1.0) return TractrixClass::T1;
    if (p.w == 1.0) return TractrixClass::T2;
    if (p.w > 0.0) return TractrixClass::T3;
    if (p.w == 0.0) return TractrixClass::T4;
    return TractrixClass::T5;
}

[[nodiscard]] inline std::string_view class_label(TractrixClass c) {
    switch (c) {
        case TractrixClass::T1: return "T1 (external, long leash)";
        case TractrixClass::T2: return "T2 (polar/spiral)";
        case TractrixClass::T3: return "T3 (external, short leash)";
        case TractrixClass::T4: return "T4 (tractrix of a line)";
        case TractrixClass::T5: return "T5 (internal)";
        case TractrixClass::Reverse: return "Reverse";
    }
    return "?";
}

/// Trace arc length at which the tractrix stops in a cusp; infinite for the
/// classes that run forever.
[[nodiscard]] inline double stop_arc(ShapeParams p) {
    if (std::abs(p.w) <= 1.0) return inf;
    return p.T * std::log((p.w + 1.0) / (p.w - 1.0));
}

/// Trace arc length of the single inflection point, present only when the
/// trace starts curving against the leading circle (w > 0).
[[nodiscard]] inline std::optional<double> inflection_arc(ShapeParams p) {
    if (p.w <= 0.0) return std::nullopt;
    return p.T * std::log((p.w + 1.0) / p.w);
}

/// Sine of the pull angle at trace arc s. Runs from -1 at the start cusp
/// toward w (unbounded classes) or +1 (stopping classes).
[[nodiscard]] inline double pull_sine(ShapeParams p, double s) {
    const double b = p.w - (1.0 + p.w) * std::exp(-s / p.T);
    return std::clamp(b, -1.0, 1.0);
}

/// Signed curvature of the trace at arc s. The magnitude uses the absolute
/// leash length so that the reverse family reports the curvature of the curve
/// it retraces; sign +1 selects the principal branch, -1 its mirror image.
[[nodiscard]] inline double natural_curvature(ShapeParams p, double s, double branch = 1.0) {
    const double b = pull_sine(p, s);
    const double root = std::sqrt((1.0 - b) * (1.0 + b));
    return branch * b / (std::abs(p.T) * root);
}

/// Half-angle tangent t = tan(xi / 2) where xi = nu + pi/2 is the leash
/// direction measured from the outward radial. Infinite exactly at the stop.
[[nodiscard]] inline double half_tangent(ShapeParams p, double s) {
    const double E = std::exp(-s / p.T);
    const double num = 1.0 - E;
    const double den = (1.0 - p.w) / (1.0 + p.w) + E;
    // Both factors are positive on the forward family and negative on the
    // reverse one; a sign mismatch means s fell off an end of the domain.
    const double ratio = num / den;
    if (!(ratio >= 0.0)) return ((num > 0.0) == (p.T > 0.0)) ? inf : 0.0;
    return std::sqrt(ratio);
}

namespace detail {

/// Leading arc swept while the half-angle tangent grows from 0 to t.
[[nodiscard]] inline double leading_arc_from_half_tangent(double w, double T, double t) {
    if (w == 1.0) return T * t;
    if (std::abs(w) > 1.0) {
        const double root = std::sqrt((w - 1.0) * (w + 1.0));
        return (2.0 * T / root) * std::atan(std::sqrt((w - 1.0) / (w + 1.0)) * t);
    }
    const double root = std::sqrt((1.0 - w) * (1.0 + w));
    const double arg = std::sqrt((1.0 - w) / (1.0 + w)) * t;
    if (arg >= 1.0) return T > 0.0 ? inf : -inf;
    return (2.0 * T / root) * std::atanh(arg);
}

} // namespace detail

/// Leading-curve arc length l(s) consumed up to trace arc s.
[[nodiscard]] inline double leading_arc(ShapeParams p, double s) {
    return detail::leading_arc_from_half_tangent(p.w, p.T, half_tangent(p, s));
}

/// Turn angle of the leading radius, psi = (w / T) * l.
[[nodiscard]] inline double leading_turn(ShapeParams p, double s) {
    return (p.w / p.T) * leading_arc(p, s);
}

namespace detail {

[[nodiscard]] inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace detail

/// Closed-form trace sample at trace arc s, in the canonical pose: the leading
/// point starts at the origin heading +y, the trace point at (T, 0). Branch -1
/// mirrors the trace across the x axis.
[[nodiscard]] inline TraceSample trace_point(ShapeParams p, double s, double branch = 1.0) {
    detail::require(branch == 1.0 || branch == -1.0, "branch must be +1 or -1");
    const double S1 = stop_arc(p);
    detail::require(s >= -1e-12 && s <= S1 * (1.0 + 1e-12) + 1e-12,
                    "trace arc outside the tractrix domain");
    if (p.T < 0.0) {
        // The reverse trace runs its forward twin backwards from the stop
        // cusp. Turning that picture about the shared pole by the full sweep
        // angle puts the leading point back at the origin; the start cusp
        // then lands at (T, 0) on the inner side of the pole.
        const ShapeParams twin{-p.w, -p.T};
        const TraceSample f = trace_point(twin, std::clamp(S1 - s, 0.0, S1), 1.0);
        const double root = std::sqrt((twin.w - 1.0) * (twin.w + 1.0));
        const double psi_max = pi * twin.w / root;
        const Point2 c{-p.T / p.w, 0.0};
        const RigidMotion turn =
            RigidMotion::rotation(-psi_max, c - RigidMotion::rotation(-psi_max).apply(c));
        TraceSample out;
        out.l = f.l - pi * twin.T / root;
        out.s = s;
        out.nu = branch * -f.nu;
        const Point2 pos = turn.apply(f.pose.position);
        const double tau = normalize_angle(turn.apply_angle(f.pose.tangent_angle) + pi);
        out.pose = {{pos.x, branch * pos.y}, branch > 0 ? tau : normalize_angle(-tau)};
        out.curvature = natural_curvature(p, s, branch);
        return out;
    }
    const double t = half_tangent(p, s);
    const double xi = 2.0 * std::atan(t);
    const double nu = xi - pi / 2.0;
    const double l = detail::leading_arc_from_half_tangent(p.w, p.T, t);
    double x = 0.0;
    double y = 0.0;
    double tau = 0.0;
    if (p.w == 0.0) {
        // Leading line along +y; the trace approaches it asymptotically.
        const double sx = std::sin(xi);
        const double cx = std::cos(xi);
        x = p.T * cx;
        y = -p.T * sx + p.T * std::log((1.0 + sx) / cx);
        tau = pi - xi;
    } else {
        const double psi = (p.w / p.T) * l;
        const double half = std::sin(0.5 * psi);
        const double versine_term = -2.0 * half * half / p.w;
        const double sin_term = (l / p.T) * detail::sinc(psi);
        x = p.T * (versine_term + std::cos(psi - xi));
        y = p.T * (sin_term + std::sin(psi - xi));
        tau = pi + psi - xi;
    }
    TraceSample out;
    out.l = l;
    out.s = s;
    out.nu = branch * nu;
    out.pose = {{x, branch * y}, normalize_angle(branch * tau)};
    out.curvature = natural_curvature(p, s, branch);
    return out;
}

/// Explicit height of the line tractrix over 0 < x <= T.
[[nodiscard]] inline double line_trace_height(double x, double T) {
    detail::require(T > 0.0 && x > 0.0 && x <= T, "explicit form needs 0 < x <= T");
    const double r = std::sqrt((1.0 - x / T) * (1.0 + x / T));
    return T * (std::atanh(r) - r);
}

/// Uniform closed-form sampling over [s_lo, s_hi].
[[nodiscard]] inline std::vector<TraceSample> canonical_trace_samples(ShapeParams p, double s_lo,
                                                                      double s_hi, std::size_t n,
                                                                      double branch = 1.0) {
    detail::require(n >= 2 && s_hi > s_lo, "need an increasing range with at least two samples");
    std::vector<TraceSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back(trace_point(p, s, branch));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polar form about the leading circle center. Not defined for the line case.
// ---------------------------------------------------------------------------

/// Center of the leading circle in the canonical pose.
[[nodiscard]] inline Point2 pole(ShapeParams p) {
    detail::require(p.w != 0.0, "the line tractrix has no finite pole");
    return {-p.T / p.w, 0.0};
}

/// Polar angle swept since the start, as a function of the half-angle tangent.
/// Continuous over the whole domain; zero at t = 0. The reverse family sweeps
/// backwards through the sector its forward twin covers.
[[nodiscard]] inline double swept_polar_angle(ShapeParams p, double t) {
    detail::require(p.w != 0.0, "the line tractrix has no polar form");
    if (p.T < 0.0) {
        const ShapeParams twin{-p.w, -p.T};
        return swept_polar_angle(twin, t == 0.0 ? inf : 1.0 / t) - swept_polar_angle(twin, inf);
    }
    const double psi = (p.w / p.T) * detail::leading_arc_from_half_tangent(p.w, p.T, t);
    return psi - std::atan(((p.w - 1.0) / (p.w + 1.0)) * t) - std::atan(t);
}

struct PolarPoint {
    double radius = 0.0;
    double angle = 0.0; // absolute, about pole(p)
};

/// Distance and absolute direction of the trace point from the pole.
[[nodiscard]] inline PolarPoint polar_point(ShapeParams p, double t) {
    detail::require(p.w != 0.0, "the line tractrix has no polar form");
    const double t2 = t * t;
    const double num = 1.0 + 2.0 * p.w * (1.0 - t2) / (1.0 + t2) + p.w * p.w;
    const double radius = std::abs(p.T / p.w) * std::sqrt(std::max(0.0, num));
    const double rel = swept_polar_angle(p, t);
    return {radius, p.w > 0.0 ? rel : pi + rel};
}

/// Angular width of the sector a stopping tractrix spans from start cusp to
/// stop cusp, as seen from the pole.
[[nodiscard]] inline double sector_width(double w) {
    detail::require(std::abs(w) > 1.0, "only stopping shapes span a finite sector");
    const double aw = std::abs(w);
    return pi * (aw / std::sqrt((aw - 1.0) * (aw + 1.0)) - 1.0);
}

/// Shape whose sector width equals 2 pi p / q, so that q copies arranged
/// around the pole close up into a star after p full turns.
[[nodiscard]] inline double star_parameter(int turns, int points) {
    detail::require(turns >= 1 && points >= 1, "star indices must be positive");
    const double A = 1.0 + 2.0 * static_cast<double>(turns) / static_cast<double>(points);
    return A / std::sqrt((A - 1.0) * (A + 1.0));
}

/// Polar equation of the spiral tractrix (w = 1) about its pole: angle as a
/// function of radius, 0 < radius <= 2 T.
[[nodiscard]] inline double spiral_polar_angle(double radius, double T) {
    detail::require(T > 0.0 && radius > 0.0 && radius <= 2.0 * T,
                    "spiral polar form needs 0 < radius <= 2 T");
    const double c = radius / (2.0 * T);
    return -std::acos(c) + std::sqrt((2.0 * T - radius) * (2.0 * T + radius)) / radius;
}

// ---------------------------------------------------------------------------
// Steady state of the pull around a circle with |K T| < 1.
// ---------------------------------------------------------------------------

/// Pull angle of the attracting steady trace around a circle of curvature K.
[[nodiscard]] inline double equilibrium_angle(double K, double T) {
    detail::require(std::abs(K * T) < 1.0, "steady pull needs |K T| < 1");
    return std::asin(K * T);
}

/// Radius of the concentric circle the steady trace runs on.
[[nodiscard]] inline double equilibrium_radius(double R, double T) {
    detail::require(R > T && T > 0.0, "steady trace needs leash shorter than the radius");
    return std::sqrt((R - T) * (R + T));
}

// ---------------------------------------------------------------------------
// Historical formulas kept for cross-checking; each carries a known defect
// that the verification suite demonstrates against the forms above.
// ---------------------------------------------------------------------------

namespace errata {

/// Classical two-arctan polar angle for a long-leash tractrix around a circle
/// of radius a with leash len > a. The first term's denominator changes sign
/// at t = sqrt((len + a) / (len - a)), so the published expression jumps by pi
/// there even though the curve itself is smooth.
[[nodiscard]] inline double loria_polar_angle(double t, double a, double len) {
    detail::require(len > a && a > 0.0, "this form needs leash longer than the radius");
    const double first = std::atan(2.0 * len * t / ((a + len) + (a - len) * t * t));
    const double root = std::sqrt((len - a) * (len + a));
    return first - (2.0 * len / root) * std::atan(std::sqrt((len - a) / (len + a)) * t);
}

/// Spiral polar angle as printed in the classical source, with arcsin where
/// arccos belongs; off by pi/2 at the start cusp.
[[nodiscard]] inline double spiral_polar_angle_published(double radius, double T) {
    detail::require(T > 0.0 && radius > 0.0 && radius <= 2.0 * T,
                    "spiral polar form needs 0 < radius <= 2 T");
    const double c = radius / (2.0 * T);
    return -std::asin(c) + std::sqrt((2.0 * T - radius) * (2.0 * T + radius)) / radius;
}

} // namespace errata

/// Leading circle (or line) of the shape, in the canonical pose.
[[nodiscard]] inline LeadingCurve leading_curve_of(ShapeParams p) {
    if (p.w == 0.0) return line_curve();
    return circle_curve(p.w / p.T);
}

} // namespace tractrix
