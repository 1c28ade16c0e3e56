#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "tractrix/curves.hpp"

using namespace tractrix;
using Catch::Matchers::WithinAbs;

namespace {

/// Composite Simpson on [a, b], independent of the library quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double acc = f(a) + f(b);
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

/// Central-difference velocity of an arc-length curve.
Point2 fd_velocity(const LeadingCurve& curve, double l, double h = 1e-6) {
    const Point2 a = curve.at(l - h).position;
    const Point2 b = curve.at(l + h).position;
    return (1.0 / (2.0 * h)) * (b - a);
}

} // namespace

TEST_CASE("circle factory runs at unit speed around the advertised center") {
    for (const double K : {0.5, -0.5, 2.0}) {
        const LeadingCurve c = circle_curve(K);
        const Point2 center{-1.0 / K, 0.0};
        for (const double l : {0.0, 0.3, 1.7, 4.0, -2.0}) {
            const CurvePoint p = c.at(l);
            REQUIRE_THAT(distance(p.position, center), WithinAbs(1.0 / std::abs(K), 1e-12));
            REQUIRE_THAT(p.curvature, WithinAbs(K, 0.0));
            const Point2 v = fd_velocity(c, l);
            REQUIRE_THAT(norm(v), WithinAbs(1.0, 1e-8));
            REQUIRE_THAT(std::atan2(v.y, v.x), WithinAbs(normalize_angle(p.theta), 1e-6));
        }
        REQUIRE(c.period.has_value());
        const double L = *c.period;
        REQUIRE_THAT(L, WithinAbs(2.0 * pi / std::abs(K), 1e-15));
        REQUIRE_THAT(distance(c.at(1.0 + L).position, c.at(1.0).position), WithinAbs(0.0, 1e-12));
        // Unwrapped tangent advances by a signed full turn per lap.
        REQUIRE_THAT(c.at(1.0 + L).theta - c.at(1.0).theta,
                     WithinAbs(K > 0 ? 2.0 * pi : -2.0 * pi, 1e-12));
    }
    REQUIRE_THROWS_AS(circle_curve(0.0), std::invalid_argument);
}

TEST_CASE("line factory is the trivial leading curve") {
    const LeadingCurve c = line_curve();
    const CurvePoint p = c.at(3.25);
    REQUIRE_THAT(p.position.x, WithinAbs(0.0, 0.0));
    REQUIRE_THAT(p.position.y, WithinAbs(3.25, 0.0));
    REQUIRE_THAT(p.theta, WithinAbs(pi / 2.0, 0.0));
    REQUIRE_THAT(p.curvature, WithinAbs(0.0, 0.0));
}

TEST_CASE("ellipse adapter against a quadrature oracle") {
    const double a = 2.0;
    const double b = 1.0;
    const LeadingCurve e = ellipse_curve(a, b);

    const auto speed = [a, b](double u) {
        return std::hypot(a * std::sin(u), b * std::cos(u));
    };
    const double oracle_len = simpson(speed, 0.0, 2.0 * pi, 20000);
    REQUIRE_THAT(oracle_len, WithinAbs(9.688448220547675, 1e-9));
    REQUIRE_THAT(e.total_length, WithinAbs(oracle_len, 1e-9));
    REQUIRE(e.corners.empty());
    REQUIRE(e.period.has_value());

    SECTION("unit speed and tangent direction") {
        for (const double l : {0.05, 1.0, 2.5, 4.8, 7.2, 9.3}) {
            const Point2 v = fd_velocity(e, l);
            REQUIRE_THAT(norm(v), WithinAbs(1.0, 1e-7));
            REQUIRE_THAT(std::atan2(v.y, v.x), WithinAbs(normalize_angle(e.at(l).theta), 1e-6));
        }
    }

    SECTION("curvature matches the closed form") {
        for (const double l : {0.0, 1.3, 3.9, 6.6, 8.8}) {
            const CurvePoint p = e.at(l);
            const double u = std::atan2(p.position.y / b, p.position.x / a);
            const double den = std::pow(a * a * std::sin(u) * std::sin(u) +
                                            b * b * std::cos(u) * std::cos(u),
                                        1.5);
            REQUIRE_THAT(p.curvature, WithinAbs(a * b / den, 1e-8));
        }
    }

    SECTION("closure and winding") {
        const double L = e.total_length;
        REQUIRE_THAT(distance(e.at(L).position, e.at(0.0).position), WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(e.at(L).theta - e.at(0.0).theta, WithinAbs(2.0 * pi, 1e-9));
        REQUIRE_THAT(distance(e.at(1.0 + 2.0 * L).position, e.at(1.0).position),
                     WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("sinusoid repeats with a pure shift") {
    const double amp = 0.7;
    const double lam = 3.0;
    const LeadingCurve s = sinusoid_curve(amp, lam);
    REQUIRE(s.period.has_value());
    const double L = *s.period;
    const auto speed = [amp, lam](double u) {
        const double om = 2.0 * pi / lam;
        return std::hypot(1.0, amp * om * std::cos(om * u));
    };
    REQUIRE_THAT(L, WithinAbs(simpson(speed, 0.0, lam, 20000), 1e-9));
    for (const double l : {0.2, 1.1, 2.9}) {
        const CurvePoint base = s.at(l);
        const CurvePoint next = s.at(l + L);
        REQUIRE_THAT(next.position.x - base.position.x, WithinAbs(lam, 1e-9));
        REQUIRE_THAT(next.position.y - base.position.y, WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(next.theta - base.theta, WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(next.curvature - base.curvature, WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("lemniscate adapter touches the known extremes") {
    const double a = 1.5;
    const LeadingCurve lem = lemniscate_curve(a);
    REQUIRE(lem.period.has_value());

    // Starts at the right tip, where the polar form gives curvature 3/a.
    const CurvePoint tip = lem.at(0.0);
    REQUIRE_THAT(tip.position.x, WithinAbs(a, 1e-12));
    REQUIRE_THAT(tip.position.y, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(tip.curvature), WithinAbs(3.0 / a, 1e-9));

    // Figure eight: net turning over the full traversal is zero.
    REQUIRE_THAT(lem.at(lem.total_length).theta - tip.theta, WithinAbs(0.0, 1e-9));

    // Passes the node; nearest approach to the origin is essentially zero.
    double closest = inf;
    for (int i = 0; i <= 4000; ++i) {
        const double l = lem.total_length * i / 4000.0;
        closest = std::min(closest, norm(lem.at(l).position));
    }
    REQUIRE(closest < 1e-3);

    for (const double l : {0.4, 1.9, 3.3, 5.0}) {
        REQUIRE_THAT(norm(fd_velocity(lem, l)), WithinAbs(1.0, 1e-7));
    }
}

TEST_CASE("spiral adapter against the closed-form arc length") {
    const double R = 1.0;
    const double t0 = -3.0;
    const LeadingCurve sp = archimedean_spiral_curve(R, t0, 3.0);
    const auto lambda = [R](double t) {
        return 0.5 * R * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
    };
    for (const double t : {-2.5, -1.0, 0.0, 0.5, 2.0, 3.0}) {
        const double l = lambda(t) - lambda(t0);
        const CurvePoint p = sp.at(l);
        const Point2 expect{R * t * std::sin(t), -R * t * std::cos(t)};
        REQUIRE_THAT(distance(p.position, expect), WithinAbs(0.0, 1e-8));
        const double q = (2.0 + t * t) / (R * std::pow(1.0 + t * t, 1.5));
        REQUIRE_THAT(p.curvature, WithinAbs(q, 1e-8));
    }
}

TEST_CASE("composite records the curvature breakpoint") {
    const LeadingCurve pl = parabola_line_curve();
    const double l_join = 0.5 * (2.0 * std::sqrt(5.0) + std::asinh(2.0));
    REQUIRE(pl.corners.size() == 1);
    REQUIRE_THAT(pl.corners[0].l, WithinAbs(l_join, 1e-9));
    REQUIRE_THAT(pl.corners[0].turn, WithinAbs(0.0, 0.0));

    // Tangent continuous through the join, curvature steps from 1 to 0.
    const CurvePoint before = pl.at(l_join - 1e-4);
    const CurvePoint after = pl.at(l_join + 1e-4);
    REQUIRE_THAT(normalize_angle(after.theta - before.theta), WithinAbs(0.0, 1e-3));
    REQUIRE_THAT(before.curvature, WithinAbs(1.0, 1e-3));
    REQUIRE_THAT(after.curvature, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(pl.at(l_join + 1.0).position.y, WithinAbs(0.0, 1e-10));
}

TEST_CASE("reversed view mirrors pose and corners") {
    const LeadingCurve sp = archimedean_spiral_curve(1.0, -3.0, 1.0);
    const double l_end = sp.total_length * 0.9;
    const LeadingCurve rev = reverse_of(sp, l_end);
    REQUIRE_THAT(rev.total_length, WithinAbs(l_end, 0.0));
    for (const double lam : {0.0, 0.7, 1.9, l_end}) {
        const CurvePoint fwd = sp.at(l_end - lam);
        const CurvePoint bwd = rev.at(lam);
        REQUIRE_THAT(distance(bwd.position, fwd.position), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(normalize_angle(bwd.theta - fwd.theta - pi), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(bwd.curvature, WithinAbs(-fwd.curvature, 1e-12));
    }

    const LeadingCurve pl = parabola_line_curve();
    const LeadingCurve plr = reverse_of(pl, pl.total_length);
    REQUIRE(plr.corners.size() == 1);
    REQUIRE_THAT(plr.corners[0].l + pl.corners[0].l, WithinAbs(pl.total_length, 1e-12));
}
