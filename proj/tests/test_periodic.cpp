#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tractrix/circle_family.hpp"
#include "tractrix/curves.hpp"
#include "tractrix/periodic.hpp"

using namespace tractrix;
using Catch::Matchers::WithinAbs;

namespace {

/// Pull angles of two traces paired at identical leading arcs.
std::vector<std::pair<double, double>> paired_angles(const Trace& one, const Trace& two) {
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < one.samples.size() && j < two.samples.size()) {
        const double li = one.samples[i].l;
        const double lj = two.samples[j].l;
        if (std::abs(li - lj) < 1e-12) {
            out.push_back({one.samples[i].nu, two.samples[j].nu});
            ++i;
            ++j;
        } else if (li < lj) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

} // namespace

TEST_CASE("straight rail has the straight pull as its fixed point") {
    const LeadingCurve line = line_curve();
    PeriodicConfig cfg;
    cfg.length = 5.0;
    const PeriodicResult at_zero = find_periodic(line, 1.3, cfg);
    REQUIRE(at_zero.converged);
    REQUIRE(at_zero.iterations == 1);
    REQUIRE(at_zero.nu0 == 0.0);

    cfg.initial_nu = 1.0;
    const PeriodicResult from_high = find_periodic(line, 1.3, cfg);
    REQUIRE(from_high.converged);
    REQUIRE_THAT(from_high.nu0, WithinAbs(0.0, 1e-9));
    for (std::size_t k = 1; k < from_high.residuals.size(); ++k)
        REQUIRE(from_high.residuals[k] < 0.05 * from_high.residuals[k - 1]);

    // Without an explicit lap length a line cannot define a period map.
    REQUIRE_THROWS_AS(find_periodic(line, 1.3), std::invalid_argument);
}

TEST_CASE("circular rail settles on the steady pull angle and radius") {
    const double R = 2.0;
    const double T = 1.0;
    const LeadingCurve circle = circle_curve(1.0 / R);
    const PeriodicResult res = find_periodic(circle, T);
    REQUIRE(res.converged);
    REQUIRE_FALSE(res.stopped);
    REQUIRE_THAT(res.nu0, WithinAbs(equilibrium_angle(1.0 / R, T), 1e-12));

    IntegratorConfig icfg;
    icfg.nu0 = res.nu0;
    icfg.max_leading_arc = 2.0 * pi * R;
    const Trace orbit = trace_curve(circle, T, icfg);
    const Point2 center{-R, 0.0};
    const double r_star = equilibrium_radius(R, T);
    for (const TraceSample& sample : orbit.samples)
        REQUIRE_THAT(distance(sample.pose.position, center), WithinAbs(r_star, 1e-10));
    REQUIRE_THAT(distance(orbit.samples.front().pose.position,
                          orbit.samples.back().pose.position),
                 WithinAbs(0.0, 1e-10));
}

TEST_CASE("steady angle grows with the leash on a fixed circle") {
    const double R = 2.0;
    double prev = -1.0;
    for (const double T : {0.6, 1.0, 1.4}) {
        const PeriodicResult res = find_periodic(circle_curve(1.0 / R), T);
        REQUIRE(res.converged);
        REQUIRE_THAT(res.nu0, WithinAbs(std::asin(T / R), 1e-9));
        REQUIRE(res.nu0 > prev);
        prev = res.nu0;
    }
}

TEST_CASE("period map contracts within the angle-averaged exponential bound") {
    const double R = 2.0;
    const double T = 1.0;
    const double L = 2.0 * pi * R;
    const LeadingCurve circle = circle_curve(1.0 / R);
    const double margin = 1e-3;

    const double measured = contraction_rate(circle, T, L, margin);
    REQUIRE(measured > 0.0);
    REQUIRE(measured < 1.0);

    // Pair the two extreme trajectories and take the worst mean-angle cosine.
    IntegratorConfig lo_cfg;
    lo_cfg.nu0 = -pi / 2.0 + margin;
    lo_cfg.max_leading_arc = L;
    IntegratorConfig hi_cfg = lo_cfg;
    hi_cfg.nu0 = pi / 2.0 - margin;
    const Trace lo = trace_curve(circle, T, lo_cfg);
    const Trace hi = trace_curve(circle, T, hi_cfg);
    const auto pairs = paired_angles(lo, hi);
    REQUIRE(pairs.size() > 1000);
    double c = 1.0;
    for (const auto& [nu1, nu2] : pairs) c = std::min(c, std::cos(0.5 * (nu1 + nu2)));
    REQUIRE(c > 0.5);

    // Rigorous two-sided envelope for the mean slope over one lap. The upper
    // side carries the 2/pi chord factor; without it the bound fails, because
    // the endpoint gap starts wide enough that sin(gap/2) < gap/2 matters.
    REQUIRE(measured <= std::exp(-2.0 * c * L / (pi * T)) * (1.0 + 1e-9));
    REQUIRE(measured >= std::exp(-L / T) * (1.0 - 1e-9));
    // Regression pin of the actual contraction factor for this setup.
    REQUIRE(measured > 1.9e-5);
    REQUIRE(measured < 2.2e-5);
}

TEST_CASE("elliptic rail closes its trace and brackets the steady angle") {
    const LeadingCurve ellipse = ellipse_curve(2.0, 1.0);
    const double T = 0.4;
    const PeriodicResult res = find_periodic(ellipse, T);
    REQUIRE(res.converged);
    REQUIRE(res.residuals.size() >= 2);
    for (std::size_t k = 1; k < res.residuals.size(); ++k)
        REQUIRE(res.residuals[k] < 0.1 * res.residuals[k - 1]);

    IntegratorConfig icfg;
    icfg.nu0 = res.nu0;
    icfg.max_leading_arc = *ellipse.period;
    const Trace orbit = trace_curve(ellipse, T, icfg);
    REQUIRE_THAT(distance(orbit.samples.front().pose.position,
                          orbit.samples.back().pose.position),
                 WithinAbs(0.0, 1e-8));

    // Iterating the map from both sides pinches the fixed point monotonically;
    // the contraction is strong enough that the gap hits roundoff in a couple
    // of laps, so only iterate while it is still resolvable.
    double below = -1.2;
    double above = 1.2;
    double gap = above - below;
    for (int k = 0; k < 5 && gap > 1e-14; ++k) {
        below = period_map(ellipse, T, below, *ellipse.period).nu;
        above = period_map(ellipse, T, above, *ellipse.period).nu;
        REQUIRE(above >= below);
        REQUIRE(above - below < gap);
        gap = above - below;
    }
    REQUIRE(gap < 1e-8);
    REQUIRE_THAT(below, WithinAbs(res.nu0, 1e-6));
    REQUIRE_THAT(above, WithinAbs(res.nu0, 1e-6));
}

TEST_CASE("contraction guard rejects tight leashes but can be overridden") {
    // Figure-eight tips reach curvature 3/a, so T = 0.4 breaks the bound.
    const LeadingCurve eight = lemniscate_curve(1.0);
    REQUIRE(eight.max_abs_curvature * 0.4 >= 1.0);
    REQUIRE_THROWS_AS(find_periodic(eight, 0.4), std::invalid_argument);

    PeriodicConfig loose;
    loose.allow_weak_contraction = true;
    const PeriodicResult res = find_periodic(eight, 0.4, loose);
    CAPTURE(res.converged, res.stopped, res.iterations, res.nu0);
    REQUIRE(res.converged);

    // A leash longer than the circle radius has no steady pull at all; the
    // iteration must report the collapse instead of spinning.
    PeriodicConfig collapse;
    collapse.allow_weak_contraction = true;
    const PeriodicResult no_orbit = find_periodic(circle_curve(0.5), 3.0, collapse);
    REQUIRE_FALSE(no_orbit.converged);
    REQUIRE(no_orbit.stopped);
}
