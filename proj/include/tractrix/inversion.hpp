#pragma once

// =============================================================================
// Pencil of asymptotic circles and the inversion dualities between traces.
// Short-leash traces of one circle spiral into coaxal limit circles whose
// implicit family is w(x^2 + y^2 + T^2) + 2Tx = 0; inverting about the leading
// circle's center with power R^2 - T^2 swaps the external and internal traces,
// and with negative power (a hyperbolic inversion, which folds in a half-turn)
// maps the long-leash trace onto the reverse trace.
// =============================================================================

#include <cmath>
#include <vector>

#include "tractrix/circle_family.hpp"
#include "tractrix/geometry.hpp"

namespace tractrix {

/// Implicit circle a(x^2 + y^2) + b x + c y + d = 0; a == 0 is a line.
struct ImplicitCircle {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    [[nodiscard]] double residual(Point2 p) const {
        return a * (p.x * p.x + p.y * p.y) + b * p.x + c * p.y + d;
    }
    [[nodiscard]] bool is_line() const { return a == 0.0; }
    [[nodiscard]] Point2 center() const {
        detail::require(!is_line(), "a line has no center");
        return {-b / (2.0 * a), -c / (2.0 * a)};
    }
    [[nodiscard]] double radius() const {
        detail::require(!is_line(), "a line has no radius");
        const double disc = b * b + c * c - 4.0 * a * d;
        detail::require(disc >= 0.0, "circle is imaginary");
        return std::sqrt(disc) / (2.0 * std::abs(a));
    }
};

/// Asymptote of the short-leash trace with shape w: a limit circle, or the
/// radical-axis line x = 0 when the leading curve degenerates to a line.
[[nodiscard]] inline ImplicitCircle pencil_asymptotic_circle(double w, double T) {
    detail::require(std::abs(w) < 1.0, "only short-leash shapes have asymptotic circles");
    detail::require(T > 0.0 && std::isfinite(T), "leash length must be positive");
    return {w, 2.0 * T, 0.0, w * T * T};
}

/// Inversion about `center` with signed power; negative power folds in the
/// half-turn rotation (hyperbolic inversion).
struct InversionSpec {
    Point2 center{};
    double power = 1.0;
};

[[nodiscard]] inline Point2 apply_inversion(const InversionSpec& spec, Point2 p) {
    detail::require(spec.power != 0.0, "inversion power must be nonzero");
    const Point2 v = p - spec.center;
    const double r2 = dot(v, v);
    detail::require(r2 > 0.0, "the inversion center has no image");
    return spec.center + (spec.power / r2) * v;
}

/// Differential of the inversion at p applied to direction h. Conformal up to
/// the reflection across the radial direction, so it preserves unsigned
/// angles and reverses orientation.
[[nodiscard]] inline Point2 apply_inversion_differential(const InversionSpec& spec, Point2 p,
                                                         Point2 h) {
    detail::require(spec.power != 0.0, "inversion power must be nonzero");
    const Point2 v = p - spec.center;
    const double r2 = dot(v, v);
    detail::require(r2 > 0.0, "the inversion center has no image");
    const Point2 vh = (1.0 / std::sqrt(r2)) * v;
    return (spec.power / r2) * (h - 2.0 * dot(vh, h) * vh);
}

namespace detail {

/// Shared pose for the circle-trace dualities: shift the canonical frame so
/// the leading circle is centered at the origin.
[[nodiscard]] inline std::vector<Point2> posed_positions(ShapeParams p, double s_lo, double s_hi,
                                                         std::size_t count, double branch,
                                                         Point2 shift) {
    std::vector<Point2> out;
    out.reserve(count);
    for (const TraceSample& sample : canonical_trace_samples(p, s_lo, s_hi, count, branch))
        out.push_back(sample.pose.position + shift);
    return out;
}

} // namespace detail

/// Max distance from inverted external-trace samples to the internal trace of
/// the same leading circle. Inversion power R^2 - T^2 > 0; the internal
/// companion runs mirrored because inversion preserves the sweep orientation
/// while the canonical internal trace winds the other way.
[[nodiscard]] inline double verify_external_internal_duality(double T, double w,
                                                             std::size_t sample_count) {
    detail::require(w > 0.0 && w < 1.0, "external/internal pair needs 0 < w < 1");
    detail::require(sample_count >= 2, "need at least two samples");
    const double R = T / w;
    const Point2 to_center{R, 0.0};
    const InversionSpec inv{{0.0, 0.0}, (R - T) * (R + T)};

    // The internal companion's canonical frame puts the shared circle at
    // (+R, 0) and winds the opposite way, so posing it over the external
    // frame is the map (x, y) -> (R - x, y). The chain must angularly cover
    // the inverted external sweep; the internal trace sweeps at least as fast
    // per unit arc (its polar radius never exceeds the shared limit circle's),
    // so a doubled arc budget with the same start more than covers it.
    std::vector<Point2> chain;
    chain.reserve(48001);
    for (const TraceSample& sample :
         canonical_trace_samples(ShapeParams::from_w(-w, T), 0.0, 10.0 * T, 48001, 1.0))
        chain.push_back({R - sample.pose.position.x, sample.pose.position.y});

    double worst = 0.0;
    for (const Point2 pos :
         detail::posed_positions(ShapeParams::from_w(w, T), 0.0, 5.0 * T, sample_count,
                                 1.0, to_center))
        worst = std::max(worst, distance_to_samples(apply_inversion(inv, pos), chain));
    return worst;
}

/// Max distance from inverted long-leash-trace samples to the reverse trace.
/// The power R^2 - T^2 is negative here, so the inversion is hyperbolic.
[[nodiscard]] inline double verify_long_reverse_duality(double T, double w,
                                                        std::size_t sample_count) {
    detail::require(w > 1.0, "the long-leash trace needs w > 1");
    detail::require(T > 0.0, "leash length must be positive");
    detail::require(sample_count >= 2, "need at least two samples");
    const ShapeParams outward = ShapeParams::from_w(w, T);
    const ShapeParams backward = ShapeParams::from_w(-w, -T);
    const double R = T / w;
    const Point2 to_center{R, 0.0};
    const InversionSpec inv{{0.0, 0.0}, (R - T) * (R + T)};
    const double s_end = stop_arc(outward);

    const std::vector<Point2> chain =
        detail::posed_positions(backward, 0.0, s_end, 48001, -1.0, to_center);

    double worst = 0.0;
    for (const Point2 pos :
         detail::posed_positions(outward, 0.0, s_end, sample_count, 1.0, to_center))
        worst = std::max(worst, distance_to_samples(apply_inversion(inv, pos), chain));
    return worst;
}

/// Max distance from the inverted spiral-type trace to the involute of the
/// envelope circle of radius 2R. The natural inversion power R^2 - T^2
/// degenerates here (T = R), so the inversion circle is the envelope itself
/// and the correspondence is exact in the half-tangent parameter.
[[nodiscard]] inline double verify_spiral_involute_duality(double T, std::size_t sample_count) {
    detail::require(T > 0.0 && std::isfinite(T), "leash length must be positive");
    detail::require(sample_count >= 2, "need at least two samples");
    const ShapeParams p = ShapeParams::from_w(1.0, T);
    const double R = T;
    const Point2 to_center{R, 0.0};
    const InversionSpec inv{{0.0, 0.0}, 4.0 * R * R};

    double worst = 0.0;
    const auto samples = canonical_trace_samples(p, 0.0, 4.0 * T, sample_count);
    for (const TraceSample& sample : samples) {
        const double t = half_tangent(p, sample.s);
        const Point2 img = apply_inversion(inv, sample.pose.position + to_center);
        const Point2 invol{2.0 * R * (std::cos(t) + t * std::sin(t)),
                           2.0 * R * (std::sin(t) - t * std::cos(t))};
        worst = std::max(worst, distance(img, invol));
    }
    return worst;
}

/// Max |cos| between the trace tangent and the tangent of the leash-radius
/// circle centered at the matching leading point; zero means the trace cuts
/// every such circle at a right angle.
[[nodiscard]] inline double verify_orthogonality(const LeadingCurve& leading, double T,
                                                 const Trace& trace, std::size_t sample_count) {
    detail::require(sample_count >= 1, "need at least one sample");
    detail::require(!trace.samples.empty(), "trace has no samples");
    const std::size_t stride = std::max<std::size_t>(1, trace.samples.size() / sample_count);
    double worst = 0.0;
    for (std::size_t i = 0; i < trace.samples.size(); i += stride) {
        const TraceSample& sample = trace.samples[i];
        const Point2 v = leading.at(sample.l).position - sample.pose.position;
        const double len = norm(v);
        detail::require(std::abs(len - std::abs(T)) <= 0.1 * std::abs(T),
                        "trace samples do not correspond to the leading curve");
        const Point2 tangent = unit_vector(sample.pose.tangent_angle);
        worst = std::max(worst, std::abs(dot(tangent, perp(v))) / len);
    }
    return worst;
}

} // namespace tractrix
