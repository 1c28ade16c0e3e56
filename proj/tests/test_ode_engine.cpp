#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tractrix/circle_family.hpp"
#include "tractrix/curves.hpp"
#include "tractrix/ode_engine.hpp"

using namespace tractrix;
using Catch::Matchers::WithinAbs;

namespace {

/// Invert leading_arc(s) by bisection; it is strictly increasing.
double trace_arc_of_leading_arc(ShapeParams p, double l_target, double s_hi) {
    double lo = 0.0;
    double hi = s_hi;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        (leading_arc(p, mid) < l_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Arc length along the doubled spiral from its pole, odd in t.
double spiral_arc(double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); }

/// Invert spiral_arc by Newton; speed is sqrt(1 + t^2).
double spiral_param_of_arc(double lam) {
    double t = lam > 0.0 ? std::sqrt(2.0 * lam) : -std::sqrt(-2.0 * lam);
    if (std::abs(lam) < 1.0) t = lam;
    for (int i = 0; i < 60; ++i) {
        const double f = spiral_arc(t) - lam;
        t -= f / std::sqrt(1.0 + t * t);
        if (std::abs(f) < 1e-14) break;
    }
    return t;
}

} // namespace

TEST_CASE("pulled line trace matches the closed form") {
    const double T = 1.3;
    const ShapeParams p = ShapeParams::from_w(0.0, T);
    IntegratorConfig cfg;
    cfg.max_leading_arc = 6.0;
    const Trace trace = trace_curve(line_curve(), T, cfg);
    REQUIRE(trace.termination == Termination::ReachedLength);
    REQUIRE(trace.mode_switches.empty());
    REQUIRE(trace.samples.size() > 100);

    for (const TraceSample& sample : trace.samples) {
        const TraceSample exact = trace_point(p, sample.s);
        CAPTURE(sample.l, sample.s);
        REQUIRE_THAT(distance(sample.pose.position, exact.pose.position),
                     WithinAbs(0.0, 1e-7));
        REQUIRE_THAT(sample.nu, WithinAbs(exact.nu, 1e-8));
        REQUIRE_THAT(sample.l, WithinAbs(exact.l, 1e-7));
    }
}

TEST_CASE("circle traces match the closed forms across the classes") {
    for (const double w : {3.0, 1.0, 0.5, -0.5}) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        IntegratorConfig cfg;
        cfg.max_leading_arc = 20.0;
        cfg.max_trace_arc = 6.0;
        const Trace trace = trace_curve(leading_curve_of(p), p.T, cfg);
        CAPTURE(w);
        REQUIRE(trace.samples.size() > 100);
        for (const TraceSample& sample : trace.samples) {
            if (sample.s < 0.01) continue;
            const TraceSample exact = trace_point(p, sample.s);
            CAPTURE(sample.l, sample.s);
            REQUIRE_THAT(distance(sample.pose.position, exact.pose.position),
                         WithinAbs(0.0, 1e-6));
            // nu itself is ill conditioned in s at the stopping cusp; its sine
            // is the stable quantity there.
            REQUIRE_THAT(std::sin(sample.nu), WithinAbs(pull_sine(p, sample.s), 1e-8));
        }
    }
}

TEST_CASE("pull-only traces stop at the exact stopping arc") {
    for (const double w : {1.5, 2.0, 3.0}) {
        const ShapeParams p = ShapeParams::from_w(w, 1.0);
        const Trace trace = trace_curve(leading_curve_of(p), p.T);
        CAPTURE(w);
        REQUIRE(trace.termination == Termination::Stopped);
        REQUIRE_THAT(trace.samples.back().s, WithinAbs(stop_arc(p), 1e-8));
        REQUIRE_THAT(trace.samples.back().nu, WithinAbs(pi / 2.0, 1e-12));
        REQUIRE(trace.samples.back().curvature == inf);
    }
}

TEST_CASE("steady pull angle is preserved to roundoff") {
    const double R = 2.0;
    const double T = 1.0;
    IntegratorConfig cfg;
    cfg.nu0 = equilibrium_angle(1.0 / R, T);
    cfg.max_leading_arc = 4.0 * pi;
    const Trace trace = trace_curve(circle_curve(1.0 / R), T, cfg);
    const Point2 center{-R, 0.0};
    const double r_star = equilibrium_radius(R, T);
    for (const TraceSample& sample : trace.samples) {
        REQUIRE_THAT(sample.nu, WithinAbs(pi / 6.0, 1e-12));
        REQUIRE_THAT(distance(sample.pose.position, center), WithinAbs(r_star, 1e-11));
    }
}

TEST_CASE("halving the step cuts the error by the fourth-order factor") {
    const ShapeParams p = ShapeParams::from_w(0.5, 1.0);
    const LeadingCurve circle = leading_curve_of(p);
    const auto max_error = [&](double h) {
        IntegratorConfig cfg;
        cfg.step = h;
        cfg.max_leading_arc = 3.0;
        cfg.local_error_tol = 0.0;
        const Trace trace = trace_curve(circle, p.T, cfg);
        double worst = 0.0;
        for (const TraceSample& sample : trace.samples) {
            if (sample.l < 1e-9) continue;
            const double s_exact = trace_arc_of_leading_arc(p, sample.l, 10.0);
            const double nu_exact = std::asin(pull_sine(p, s_exact));
            worst = std::max(worst, std::abs(sample.nu - nu_exact));
        }
        return worst;
    };
    const double coarse = max_error(0.02);
    const double fine = max_error(0.01);
    REQUIRE(coarse > 1e-13);
    REQUIRE(coarse / fine >= 14.0);
}

TEST_CASE("push-pull rides the circle involute through its cusp") {
    // Leading curve: doubled spiral, R = T = 1. The trace then runs exactly on
    // the involute of the unit circle, with one cusp where the spiral meets
    // the pole; push mode must carry it straight through.
    const double R = 1.0;
    const double t0 = -3.0;
    const LeadingCurve spiral = archimedean_spiral_curve(R, t0, 3.0);
    IntegratorConfig cfg;
    cfg.mode = TraceMode::PushPull;
    cfg.nu0 = std::atan(1.0 / 3.0);
    const Trace trace = trace_curve(spiral, R, cfg);

    REQUIRE(trace.termination == Termination::ReachedLength);
    REQUIRE(trace.mode_switches.size() == 1);
    const ModeSwitch& flip = trace.mode_switches[0];
    REQUIRE(flip.kind == ModeSwitchKind::CuspReversal);
    REQUIRE_THAT(flip.l, WithinAbs(-spiral_arc(t0), 1e-6));

    // Tangent flips by a half turn across the cusp, position does not move.
    const TraceSample& before = trace.samples[flip.sample_index];
    const TraceSample& after = trace.samples[flip.sample_index + 1];
    REQUIRE_THAT(distance(before.pose.position, after.pose.position), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(std::abs(normalize_angle(after.pose.tangent_angle -
                                          before.pose.tangent_angle)),
                 WithinAbs(pi, 1e-9));
    REQUIRE_THAT(before.pose.position.x, WithinAbs(1.0, 1e-6));
    REQUIRE_THAT(before.pose.position.y, WithinAbs(0.0, 1e-6));

    // Every sample lies on the involute, before and after the flip.
    for (const TraceSample& sample : trace.samples) {
        const double t = spiral_param_of_arc(spiral_arc(t0) + sample.l);
        const Point2 invol{R * (std::cos(t) + t * std::sin(t)),
                           R * (std::sin(t) - t * std::cos(t))};
        CAPTURE(sample.l, t);
        REQUIRE_THAT(distance(sample.pose.position, invol), WithinAbs(0.0, 1e-5));
    }
}

TEST_CASE("corner transfer jumps the pull angle and keeps the trace continuous") {
    const double T = 0.5;

    SECTION("gentle corner passes the pull through") {
        const std::vector<Point2> left{{0.0, 0.0}, {0.0, 2.0}, {-2.0, 2.0}};
        const Trace trace = trace_curve(resample_polyline(left), T);
        REQUIRE(trace.termination == Termination::ReachedLength);
        REQUIRE(trace.mode_switches.empty());
        // Locate the two samples flanking the corner at l = 2.
        std::size_t at = 0;
        for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i)
            if (trace.samples[i].l == 2.0 && trace.samples[i + 1].l == 2.0) at = i;
        REQUIRE(at > 0);
        const TraceSample& pre = trace.samples[at];
        const TraceSample& post = trace.samples[at + 1];
        REQUIRE_THAT(post.nu - pre.nu, WithinAbs(pi / 2.0, 1e-12));
        REQUIRE_THAT(distance(pre.pose.position, post.pose.position), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(normalize_angle(post.pose.tangent_angle - pre.pose.tangent_angle),
                     WithinAbs(0.0, 1e-12));
    }

    SECTION("sharp corner slackens a pull-only trace") {
        const std::vector<Point2> right{{0.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}};
        const Trace trace = trace_curve(resample_polyline(right), T);
        REQUIRE(trace.termination == Termination::Stopped);
        REQUIRE(trace.mode_switches.size() == 1);
        REQUIRE(trace.mode_switches[0].kind == ModeSwitchKind::StopSlack);
        REQUIRE_THAT(trace.mode_switches[0].l, WithinAbs(2.0, 1e-12));
    }

    SECTION("sharp corner reflects a push-pull trace into push") {
        const std::vector<Point2> right{{0.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}};
        IntegratorConfig cfg;
        cfg.mode = TraceMode::PushPull;
        const Trace trace = trace_curve(resample_polyline(right), T, cfg);
        REQUIRE(trace.termination == Termination::ReachedLength);
        // The reflected push segment is brief: the trace point swings to
        // perpendicular, cusps again, and settles back into a trailing pull.
        REQUIRE(trace.mode_switches.size() == 2);
        REQUIRE(trace.mode_switches[0].kind == ModeSwitchKind::CuspReversal);
        REQUIRE_THAT(trace.mode_switches[0].l, WithinAbs(2.0, 1e-12));
        REQUIRE(trace.mode_switches[1].kind == ModeSwitchKind::CuspReversal);
        REQUIRE(trace.mode_switches[1].l > 2.0);
        REQUIRE(trace.mode_switches[1].l < 2.1);
        const std::size_t at = trace.mode_switches[0].sample_index;
        const TraceSample& pre = trace.samples[at];
        const TraceSample& post = trace.samples[at + 1];
        REQUIRE_THAT(post.nu - pre.nu, WithinAbs(-pi / 2.0 + pi, 1e-12));
        REQUIRE_THAT(distance(pre.pose.position, post.pose.position), WithinAbs(0.0, 1e-12));
        REQUIRE(trace.samples.back().nu < 0.0);
        REQUIRE(trace.samples.back().nu > -pi / 2.0);
    }
}

TEST_CASE("push start retraces a pull trace backwards") {
    const LeadingCurve ellipse = ellipse_curve(2.0, 1.0);
    const double T = 0.4;
    const double l_end = 3.0;
    IntegratorConfig fwd_cfg;
    fwd_cfg.max_leading_arc = l_end;
    const Trace fwd = trace_curve(ellipse, T, fwd_cfg);
    REQUIRE(fwd.termination == Termination::ReachedLength);

    std::vector<Point2> fwd_chain;
    for (const TraceSample& sample : fwd.samples) fwd_chain.push_back(sample.pose.position);

    IntegratorConfig rev_cfg;
    rev_cfg.mode = TraceMode::PushPull;
    rev_cfg.nu0 = fwd.samples.back().nu;
    rev_cfg.max_leading_arc = l_end;
    const Trace rev = trace_curve(reverse_of(ellipse, l_end), -T, rev_cfg);

    for (const TraceSample& sample : rev.samples) {
        if (sample.l > l_end - 0.01) continue;
        CAPTURE(sample.l);
        REQUIRE_THAT(distance_to_samples(sample.pose.position, fwd_chain),
                     WithinAbs(0.0, 1e-6));
    }
    // The far end of the retraced path is the original start cusp.
    REQUIRE_THAT(distance(rev.samples.back().pose.position, fwd.samples.front().pose.position),
                 WithinAbs(0.0, 1e-5));
}

TEST_CASE("transfer reports the same end state as the full trace") {
    const LeadingCurve circle = circle_curve(0.5);
    IntegratorConfig cfg;
    cfg.max_leading_arc = 5.0;
    cfg.nu0 = -0.3;
    const Trace trace = trace_curve(circle, 1.0, cfg);
    const TransferResult end = transfer(circle, 1.0, -0.3, 0.0, 5.0);
    REQUIRE_FALSE(end.stopped);
    REQUIRE_THAT(end.nu, WithinAbs(trace.samples.back().nu, 1e-14));
    REQUIRE_THAT(end.s, WithinAbs(trace.samples.back().s, 1e-14));
}

TEST_CASE("engine rejects invalid setups") {
    const LeadingCurve line = line_curve();
    IntegratorConfig cfg;
    cfg.max_leading_arc = 1.0;
    REQUIRE_THROWS_AS(trace_curve(line, 0.0, cfg), std::invalid_argument);
    IntegratorConfig bad_nu = cfg;
    bad_nu.nu0 = 2.0;
    REQUIRE_THROWS_AS(trace_curve(line, 1.0, bad_nu), std::invalid_argument);
    IntegratorConfig bad_refine = cfg;
    bad_refine.refine_factor = 0;
    REQUIRE_THROWS_AS(trace_curve(line, 1.0, bad_refine), std::invalid_argument);

    // Corner turns of half a turn or more cannot transfer.
    IntegratorConfig full;
    LeadingCurve kinked = line_curve();
    kinked.total_length = 2.0;
    kinked.corners.push_back({1.0, 3.2});
    REQUIRE_THROWS_AS(trace_curve(kinked, 1.0, full), std::invalid_argument);

    // A corner landing on a cusp is rejected rather than guessed at.
    LeadingCurve early = line_curve();
    early.total_length = 2.0;
    early.corners.push_back({1e-10, 0.3});
    REQUIRE_THROWS_AS(trace_curve(early, 1.0, full), std::invalid_argument);
}
