#pragma once

// =============================================================================
// Named verification suites behind the command line tool and the acceptance
// runner. Every check measures one number and compares it against a bound
// pinned here; suites bundle checks into machine-readable reports.
// =============================================================================

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tractrix/circle_family.hpp"
#include "tractrix/curves.hpp"
#include "tractrix/geometry.hpp"
#include "tractrix/inversion.hpp"
#include "tractrix/io.hpp"
#include "tractrix/ode_engine.hpp"
#include "tractrix/periodic.hpp"

namespace tractrix {

enum class CheckSense { AtMost, AtLeast };

struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    CheckSense sense = CheckSense::AtMost;
    bool pass = false;
};

[[nodiscard]] inline Check make_check(std::string name, double measured, double bound,
                                      CheckSense sense = CheckSense::AtMost) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.bound = bound;
    c.sense = sense;
    c.pass = !std::isnan(measured) &&
             (sense == CheckSense::AtMost ? measured <= bound : measured >= bound);
    return c;
}

struct Report {
    std::string suite;
    std::vector<Check> checks;
    [[nodiscard]] bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const Check& c) { return c.pass; });
    }
};

[[nodiscard]] inline nlohmann::json report_json(const Report& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const Check& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"measured", json_number(c.measured)},
                          {"bound", c.bound},
                          {"sense", c.sense == CheckSense::AtMost ? "<=" : ">="},
                          {"pass", c.pass}});
    return {{"suite", report.suite}, {"pass", report.all_pass()}, {"checks", checks}};
}

namespace detail {

/// Shapes the oracle grid runs over: one representative per class, T = 1.
inline constexpr std::array<double, 5> oracle_ws = {3.0, 1.0, 0.5, 0.0, -0.5};

/// Trace arc each oracle run covers: up to the stop, else a fixed horizon.
[[nodiscard]] inline double oracle_arc_limit(ShapeParams p) {
    return std::min(stop_arc(p) - 0.01, 10.0);
}

[[nodiscard]] inline Trace oracle_trace(ShapeParams p, double step) {
    IntegratorConfig cfg;
    cfg.step = step;
    if (!std::isfinite(stop_arc(p)))
        cfg.max_leading_arc = leading_arc(p, oracle_arc_limit(p));
    return trace_curve(leading_curve_of(p), p.T, cfg);
}

/// Invert leading_arc(s) by bisection; it is strictly increasing.
[[nodiscard]] inline double trace_arc_of_leading_arc(ShapeParams p, double l_target,
                                                     double s_hi) {
    double lo = 0.0;
    double hi = s_hi;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        (leading_arc(p, mid) < l_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Arc length along the doubled spiral from its pole, odd in t.
[[nodiscard]] inline double spiral_lead_arc(double t) {
    return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

[[nodiscard]] inline double spiral_param_of_arc(double lam) {
    double t = lam > 0.0 ? std::sqrt(2.0 * lam) : -std::sqrt(std::max(0.0, -2.0 * lam));
    if (std::abs(lam) < 1.0) t = lam;
    for (int i = 0; i < 60; ++i) {
        const double f = spiral_lead_arc(t) - lam;
        t -= f / std::sqrt(1.0 + t * t);
        if (std::abs(f) < 1e-14) break;
    }
    return t;
}

/// Cubic Hermite value on [0, 1] from endpoint values and slopes (per unit
/// parameter, already scaled by the interval width).
[[nodiscard]] inline double hermite(double th, double y0, double m0, double y1, double m1) {
    const double t2 = th * th;
    const double t3 = t2 * th;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + th) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
}

} // namespace detail

// ---- oracle suite ----

/// Engine positions against the closed-form trace, one representative of each
/// class of the circle family plus the line.
[[nodiscard]] inline std::vector<Check> check_trace_positions(double tolerance = 1e-6) {
    std::vector<Check> out;
    for (const double w : detail::oracle_ws) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const double s_hi = detail::oracle_arc_limit(p);
        const Trace trace = detail::oracle_trace(p, 0.0);
        double worst = 0.0;
        for (const TraceSample& sample : trace.samples) {
            if (sample.s < 0.01 || sample.s > s_hi) continue;
            const TraceSample exact = trace_point(p, sample.s);
            worst = std::max(worst, distance(sample.pose.position, exact.pose.position));
        }
        out.push_back(
            make_check("oracle/position/w=" + format_double(w), worst, tolerance));
    }
    return out;
}

/// The traced curvature against the natural (curvature-of-arc) equation.
[[nodiscard]] inline std::vector<Check> check_natural_equation(double tolerance = 1e-8) {
    std::vector<Check> out;
    for (const double w : detail::oracle_ws) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const double s_hi = detail::oracle_arc_limit(p);
        const Trace trace = detail::oracle_trace(p, 2e-3);
        double worst = 0.0;
        for (const TraceSample& sample : trace.samples) {
            if (sample.s < 0.01 || sample.s > s_hi) continue;
            worst = std::max(worst,
                             std::abs(sample.curvature - natural_curvature(p, sample.s)));
        }
        out.push_back(
            make_check("oracle/natural-curvature/w=" + format_double(w), worst, tolerance));
    }
    return out;
}

/// Location of the traced inflection against the closed-form arc.
[[nodiscard]] inline std::vector<Check> check_inflection(double tolerance = 1e-8) {
    std::vector<Check> out;
    for (const double w : {0.5, 1.0, 2.0, 5.0}) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const double s0 = *inflection_arc(p);
        const double S1 = stop_arc(p);
        const double s_hi = std::isfinite(S1) ? 0.5 * (s0 + S1) : s0 + 1.0;
        IntegratorConfig cfg;
        cfg.step = 5e-4;
        cfg.max_leading_arc = leading_arc(p, s_hi);
        const Trace trace = trace_curve(leading_curve_of(p), p.T, cfg);
        const LeadingCurve lead = leading_curve_of(p);

        double found = inf;
        for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
            const TraceSample& a = trace.samples[i];
            const TraceSample& b = trace.samples[i + 1];
            if (!(a.nu < 0.0 && b.nu >= 0.0) || b.l <= a.l) continue;
            const double dl = b.l - a.l;
            const double da = (lead.at(a.l).curvature - std::sin(a.nu) / p.T) * dl;
            const double db = (lead.at(b.l).curvature - std::sin(b.nu) / p.T) * dl;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (detail::hermite(mid, a.nu, da, b.nu, db) < 0.0 ? lo : hi) = mid;
            }
            const double th = 0.5 * (lo + hi);
            found = detail::hermite(th, a.s, std::cos(a.nu) * dl, b.s, std::cos(b.nu) * dl);
            break;
        }
        out.push_back(
            make_check("oracle/inflection/w=" + format_double(w), std::abs(found - s0),
                       tolerance));
    }
    return out;
}

/// Stopping arc of the finite-length classes.
[[nodiscard]] inline std::vector<Check> check_finite_length(double tolerance = 1e-8) {
    std::vector<Check> out;
    for (const double w : {1.5, 2.0, 3.0}) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const Trace trace = trace_curve(leading_curve_of(p), p.T);
        const double measured = trace.termination == Termination::Stopped
                                    ? std::abs(trace.samples.back().s - stop_arc(p))
                                    : inf;
        out.push_back(make_check("oracle/stop-arc/w=" + format_double(w), measured, tolerance));
    }
    return out;
}

/// Natural curvature of the reverse family against the reversed forward one.
[[nodiscard]] inline std::vector<Check> check_reversal_identity(double tolerance = 1e-10) {
    std::vector<Check> out;
    for (const double w : {1.5, 2.0, 3.0}) {
        const ShapeParams fwd = ShapeParams::from_w(w, 1.0);
        const ShapeParams rev = ShapeParams::from_w(-w, -1.0);
        const double S1 = stop_arc(fwd);
        double worst = 0.0;
        for (int i = 1; i < 160; ++i) {
            const double s = S1 * i / 160.0;
            worst = std::max(worst, std::abs(natural_curvature(rev, s) +
                                             natural_curvature(fwd, S1 - s)));
        }
        out.push_back(make_check("oracle/reversal/w=" + format_double(w), worst, tolerance));
    }
    return out;
}

/// Polar radius and swept angle turned back into Cartesian points.
[[nodiscard]] inline std::vector<Check> check_polar_consistency(double tolerance = 1e-8) {
    std::vector<Check> out;
    for (const double w : {3.0, 1.0, 0.5, -0.5}) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const double s_hi = std::min(0.95 * stop_arc(p), 6.0);
        const Point2 c = pole(p);
        double worst = 0.0;
        for (int i = 0; i <= 96; ++i) {
            const double s = s_hi * i / 96.0;
            const PolarPoint pp = polar_point(p, half_tangent(p, s));
            const Point2 back = c + pp.radius * unit_vector(pp.angle);
            worst = std::max(worst, distance(back, trace_point(p, s).pose.position));
        }
        out.push_back(make_check("oracle/polar/w=" + format_double(w), worst, tolerance));
    }

    // Spiral: the explicit angle-of-radius form against the parametric sweep.
    const ShapeParams spiral = ShapeParams::from_w(1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i <= 96; ++i) {
        const double t = 0.02 * std::pow(1000.0, i / 96.0);
        const PolarPoint pp = polar_point(spiral, t);
        worst = std::max(worst, std::abs(spiral_polar_angle(pp.radius, 1.0) - pp.angle));
    }
    out.push_back(make_check("oracle/polar/spiral-explicit", worst, tolerance));
    return out;
}

/// Push-pull continuation through the cusp of the doubled-spiral ride: the
/// whole trace must sit on the involute of the unit leash circle.
[[nodiscard]] inline Check check_involute_after_cusp(double tolerance = 1e-4) {
    const double R = 1.0;
    const double t0 = -3.0;
    const LeadingCurve spiral = archimedean_spiral_curve(R, t0, 3.0);
    IntegratorConfig cfg;
    cfg.mode = TraceMode::PushPull;
    cfg.nu0 = std::atan(1.0 / 3.0);
    const Trace trace = trace_curve(spiral, R, cfg);

    if (trace.mode_switches.size() != 1)
        return make_check("oracle/involute-after-cusp", inf, tolerance);
    const double cusp_l = trace.mode_switches[0].l;
    double worst = 0.0;
    for (const TraceSample& sample : trace.samples) {
        if (sample.l < cusp_l) continue;
        const double t = detail::spiral_param_of_arc(detail::spiral_lead_arc(t0) + sample.l);
        const Point2 invol{R * (std::cos(t) + t * std::sin(t)),
                           R * (std::sin(t) - t * std::cos(t))};
        worst = std::max(worst, distance(sample.pose.position, invol));
    }
    return make_check("oracle/involute-after-cusp", worst, tolerance);
}

/// Error ratio under step halving; fourth order gives sixteen, fourteen
/// leaves slack for roundoff.
[[nodiscard]] inline Check check_convergence_order(double min_ratio = 14.0) {
    const ShapeParams p = ShapeParams::from_w(0.5, 1.0);
    const LeadingCurve circle = leading_curve_of(p);
    const auto worst_error = [&](double h) {
        double worst = 0.0;
        for (const double l : {1.0, 2.0, 3.0}) {
            IntegratorConfig cfg;
            cfg.step = h;
            const double nu = transfer(circle, p.T, -pi / 2.0, 0.0, l, cfg).nu;
            const double s_exact = detail::trace_arc_of_leading_arc(p, l, 10.0);
            worst = std::max(worst, std::abs(nu - std::asin(pull_sine(p, s_exact))));
        }
        return worst;
    };
    const double coarse = worst_error(0.02);
    const double fine = worst_error(0.01);
    const double ratio = (fine > 0.0 && coarse > 1e-13) ? coarse / fine : 0.0;
    return make_check("oracle/convergence-ratio", ratio, min_ratio, CheckSense::AtLeast);
}

// ---- errata suite ----

/// The classical two-arctan polar angle jumps by a half turn where its first
/// denominator changes sign.
[[nodiscard]] inline Check check_published_polar_jump(double tolerance = 1e-3) {
    const double a = 1.0;
    const double len = 2.0;
    const double t0 = std::sqrt((len + a) / (len - a));
    const double eps = 1e-6;
    const double jump = errata::loria_polar_angle(t0 + eps, a, len) -
                        errata::loria_polar_angle(t0 - eps, a, len);
    return make_check("errata/published-jump", std::abs(std::abs(jump) - pi), tolerance);
}

/// The corrected sweep stays continuous across the same spot.
[[nodiscard]] inline Check check_corrected_polar_continuity(double tolerance = 1e-6) {
    const double a = 1.0;
    const double len = 2.0;
    const ShapeParams p = ShapeParams::from_w(len / a, len);
    const double t0 = std::sqrt((len + a) / (len - a));
    const double eps = 1e-8;
    const double gap = swept_polar_angle(p, t0 + eps) - swept_polar_angle(p, t0 - eps);
    return make_check("errata/corrected-continuity", std::abs(gap), tolerance);
}

/// The published spiral angle starts a quarter turn off the corrected one.
[[nodiscard]] inline Check check_spiral_start_offset(double tolerance = 1e-12) {
    const double T = 1.0;
    const double published = errata::spiral_polar_angle_published(2.0 * T, T);
    const double corrected = spiral_polar_angle(2.0 * T, T);
    return make_check("errata/spiral-start-offset",
                      std::abs(published - corrected + pi / 2.0), tolerance);
}

// ---- pencil suite ----

/// The asymptotic circle (or line) each unbounded trace approaches satisfies
/// the one-parameter implicit family.
[[nodiscard]] inline std::vector<Check> check_pencil_members(double tolerance = 1e-10) {
    std::vector<Check> out;
    const double T = 1.0;
    for (const double w : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
        const ImplicitCircle member = pencil_asymptotic_circle(w, T);
        double worst = 0.0;
        if (w == 0.0) {
            // The line member is the axis x = 0.
            for (int i = 0; i < 256; ++i) {
                const Point2 pt{0.0, -3.0 + 6.0 * i / 255.0};
                worst = std::max(worst, std::abs(member.residual(pt)));
            }
        } else {
            // Boundary of the steady orbit the trace spirals into.
            const ShapeParams p = ShapeParams::from_w(w, T);
            const Point2 c = pole(p);
            const double r = equilibrium_radius(T / std::abs(w), T);
            for (int i = 0; i < 256; ++i) {
                const double a = 2.0 * pi * i / 256.0;
                const Point2 pt = c + r * unit_vector(a);
                worst = std::max(worst, std::abs(member.residual(pt)));
            }
        }
        out.push_back(
            make_check("pencil/member-residual/w=" + format_double(w), worst, tolerance));
    }
    return out;
}

/// Degenerate members collapse onto the two foci.
[[nodiscard]] inline Check check_pencil_foci(double tolerance = 1e-4) {
    const double T = 1.0;
    double worst = 0.0;
    for (const double sign : {1.0, -1.0}) {
        const ImplicitCircle member = pencil_asymptotic_circle(sign * (1.0 - 1e-9), T);
        const Point2 focus{-sign * T, 0.0};
        worst = std::max(worst, distance(member.center(), focus));
        worst = std::max(worst, member.radius());
    }
    return make_check("pencil/foci", worst, tolerance);
}

/// Every circle member has the same power with respect to the origin, so one
/// circle about the origin cuts the whole pencil at right angles.
[[nodiscard]] inline Check check_pencil_power(double tolerance = 1e-12) {
    const double T = 1.0;
    double worst = 0.0;
    for (const double w : {-0.8, -0.4, 0.4, 0.8}) {
        const ImplicitCircle member = pencil_asymptotic_circle(w, T);
        const double cx = member.center().x;
        const double r = member.radius();
        worst = std::max(worst, std::abs(cx * cx - r * r - T * T));
    }
    return make_check("pencil/orthogonal-power", worst, tolerance);
}

// ---- inversion suite ----

[[nodiscard]] inline std::vector<Check> check_inversion_dualities(double tolerance = 1e-6) {
    std::vector<Check> out;
    out.push_back(make_check("inversion/external-internal",
                             verify_external_internal_duality(1.0, 0.5, 200), tolerance));
    out.push_back(make_check("inversion/long-reverse",
                             verify_long_reverse_duality(1.0, 1.5, 200), tolerance));
    out.push_back(make_check("inversion/spiral-involute",
                             verify_spiral_involute_duality(1.0, 200), tolerance));
    return out;
}

// ---- periodic suite ----

/// Steady pull around the reference circle: the fixed point and its orbit.
[[nodiscard]] inline std::vector<Check> check_steady_circle(double angle_tolerance = 1e-10,
                                                            double radius_tolerance = 1e-8) {
    std::vector<Check> out;
    const double R = 2.0;
    const double T = 1.0;
    const LeadingCurve circle = circle_curve(1.0 / R);
    const PeriodicResult fixed_point = find_periodic(circle, T);

    const double angle_err =
        fixed_point.converged ? std::abs(fixed_point.nu0 - pi / 6.0) : inf;
    out.push_back(make_check("periodic/circle-steady-angle", angle_err, angle_tolerance));

    double radius_err = inf;
    if (fixed_point.converged) {
        IntegratorConfig cfg;
        cfg.nu0 = fixed_point.nu0;
        cfg.max_leading_arc = 2.0 * pi * R;
        const Trace orbit = trace_curve(circle, T, cfg);
        const Point2 center{-R, 0.0};
        const double target = equilibrium_radius(R, T);
        radius_err = 0.0;
        for (const TraceSample& sample : orbit.samples)
            radius_err = std::max(radius_err,
                                  std::abs(distance(sample.pose.position, center) - target));
    }
    out.push_back(make_check("periodic/circle-orbit-radius", radius_err, radius_tolerance));
    return out;
}

/// Fixed point on a curve with varying curvature: geometric convergence, a
/// closed one-period trace, and a monotonically collapsing bracket.
[[nodiscard]] inline std::vector<Check> check_periodic_ellipse(
    double ratio_bound = 0.5, double closure_tolerance = 1e-8) {
    std::vector<Check> out;
    const LeadingCurve ell = ellipse_curve(2.0, 1.0);
    const double T = 0.4;
    const PeriodicResult fixed_point = find_periodic(ell, T);

    double worst_ratio = fixed_point.converged && !fixed_point.stopped ? 0.0 : inf;
    if (fixed_point.converged) {
        for (std::size_t i = 0; i + 1 < fixed_point.residuals.size(); ++i) {
            if (fixed_point.residuals[i] <= 1e-13) break;
            worst_ratio = std::max(worst_ratio,
                                   fixed_point.residuals[i + 1] / fixed_point.residuals[i]);
        }
    }
    out.push_back(make_check("periodic/ellipse-residual-ratio", worst_ratio, ratio_bound));

    double closure = inf;
    if (fixed_point.converged) {
        IntegratorConfig cfg;
        cfg.nu0 = fixed_point.nu0;
        cfg.max_leading_arc = *ell.period;
        const Trace lap = trace_curve(ell, T, cfg);
        closure = distance(lap.samples.front().pose.position,
                           lap.samples.back().pose.position);
    }
    out.push_back(make_check("periodic/ellipse-closure", closure, closure_tolerance));

    // Bracket the fixed point from both sides and watch the gap collapse.
    double below = -1.2;
    double above = 1.2;
    std::vector<double> gaps{above - below};
    bool bracket_ok = true;
    for (int k = 0; k < 6; ++k) {
        const TransferResult lo = period_map(ell, T, below, *ell.period);
        const TransferResult hi = period_map(ell, T, above, *ell.period);
        if (lo.stopped || hi.stopped) {
            bracket_ok = false;
            break;
        }
        below = lo.nu;
        above = hi.nu;
        // Below the noise floor consecutive iterates are bit identical, so
        // the recorded gaps stop before the collapse.
        if (above - below <= 1e-13) break;
        gaps.push_back(above - below);
    }
    double min_gap = inf;
    double worst_gap_ratio = bracket_ok ? 0.0 : inf;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        min_gap = std::min(min_gap, gaps[i]);
        if (i + 1 < gaps.size())
            worst_gap_ratio = std::max(worst_gap_ratio, gaps[i + 1] / gaps[i]);
    }
    out.push_back(
        make_check("periodic/ellipse-gap-positive", min_gap, 1e-16, CheckSense::AtLeast));
    out.push_back(make_check("periodic/ellipse-gap-shrink", worst_gap_ratio, 0.999));
    return out;
}

// ---- suite assembly ----

inline constexpr std::array<std::string_view, 6> suite_names = {
    "oracle", "errata", "pencil", "inversion", "periodic", "all"};

namespace detail {

inline void append(std::vector<Check>& into, std::vector<Check> more) {
    for (Check& c : more) into.push_back(std::move(c));
}

[[nodiscard]] inline std::vector<Check> oracle_checks() {
    std::vector<Check> out;
    append(out, check_trace_positions());
    append(out, check_natural_equation());
    append(out, check_inflection());
    append(out, check_finite_length());
    append(out, check_reversal_identity());
    append(out, check_polar_consistency());
    out.push_back(check_involute_after_cusp());
    out.push_back(check_convergence_order());
    return out;
}

[[nodiscard]] inline std::vector<Check> errata_checks() {
    return {check_published_polar_jump(), check_corrected_polar_continuity(),
            check_spiral_start_offset()};
}

[[nodiscard]] inline std::vector<Check> pencil_checks() {
    std::vector<Check> out = check_pencil_members();
    out.push_back(check_pencil_foci());
    out.push_back(check_pencil_power());
    return out;
}

[[nodiscard]] inline std::vector<Check> periodic_checks() {
    std::vector<Check> out = check_steady_circle();
    append(out, check_periodic_ellipse());
    return out;
}

} // namespace detail

/// Run one named suite ("all" concatenates the rest). The optional override
/// replaces the pinned bound of every upper-bound check; lower-bound checks
/// keep their own floors.
[[nodiscard]] inline Report run_suite(std::string_view suite,
                                      std::optional<double> bound_override = {}) {
    Report report;
    report.suite = std::string{suite};
    if (suite == "oracle" || suite == "all")
        detail::append(report.checks, detail::oracle_checks());
    if (suite == "errata" || suite == "all")
        detail::append(report.checks, detail::errata_checks());
    if (suite == "pencil" || suite == "all")
        detail::append(report.checks, detail::pencil_checks());
    if (suite == "inversion" || suite == "all")
        detail::append(report.checks, check_inversion_dualities());
    if (suite == "periodic" || suite == "all")
        detail::append(report.checks, detail::periodic_checks());
    detail::require(!report.checks.empty(), "unknown verification suite");

    if (bound_override) {
        for (Check& c : report.checks) {
            if (c.sense != CheckSense::AtMost) continue;
            c.bound = *bound_override;
            c.pass = !std::isnan(c.measured) && c.measured <= c.bound;
        }
    }
    return report;
}

} // namespace tractrix
