#pragma once

// =============================================================================
// Periodic pulls around closed (or otherwise periodic) leading curves. One lap
// of the pull angle defines the period map P(nu0) = nu(L); while |q T| < 1
// holds along the curve the map is a strict contraction, so plain fixed-point
// iteration converges to the unique closed trace.
// =============================================================================

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tractrix/ode_engine.hpp"

namespace tractrix {

struct PeriodicConfig {
    /// Leading arc of one lap; 0 takes the curve's own period.
    double length = 0.0;
    double nu_tol = 1e-10;
    int max_iterations = 200;
    double initial_nu = 0.0;
    /// The contraction bound |q T| < 1 guarantees convergence. Shapes that
    /// violate it locally often still converge; this flag lets them try.
    bool allow_weak_contraction = false;
    IntegratorConfig integrator{};
};

struct PeriodicResult {
    double nu0 = 0.0;
    bool converged = false;
    /// An iterate collapsed to a cusp before completing a lap.
    bool stopped = false;
    int iterations = 0;
    /// |P(nu_k) - nu_k| per completed iteration.
    std::vector<double> residuals;
};

namespace detail {

[[nodiscard]] inline double lap_length(const LeadingCurve& curve, const PeriodicConfig& cfg) {
    if (cfg.length > 0.0) return cfg.length;
    require(curve.period.has_value(), "curve has no period; set length explicitly");
    return *curve.period;
}

[[nodiscard]] inline IntegratorConfig lap_integrator(const PeriodicConfig& cfg) {
    IntegratorConfig icfg = cfg.integrator;
    icfg.mode = TraceMode::PullOnly;
    icfg.max_trace_arc = inf;
    return icfg;
}

} // namespace detail

/// Pull angle after one lap of length `length` starting at nu0.
[[nodiscard]] inline TransferResult period_map(const LeadingCurve& curve, double T, double nu0,
                                               double length, IntegratorConfig icfg = {}) {
    return transfer(curve, T, nu0, 0.0, length, icfg);
}

/// Fixed-point search for the closed pull. Throws when the contraction bound
/// fails (where the curve reports its curvature reach) unless overridden.
[[nodiscard]] inline PeriodicResult find_periodic(const LeadingCurve& curve, double T,
                                                  const PeriodicConfig& cfg = {}) {
    detail::require(cfg.nu_tol > 0.0, "angle tolerance must be positive");
    detail::require(cfg.max_iterations >= 1, "iteration cap must be at least 1");
    const double length = detail::lap_length(curve, cfg);
    if (!cfg.allow_weak_contraction && curve.max_abs_curvature > 0.0)
        detail::require(curve.max_abs_curvature * std::abs(T) < 1.0,
                        "leading curve breaks the contraction bound |curvature * T| < 1; "
                        "set allow_weak_contraction to try anyway");

    const IntegratorConfig icfg = detail::lap_integrator(cfg);
    PeriodicResult res;
    res.nu0 = cfg.initial_nu;
    for (int k = 0; k < cfg.max_iterations; ++k) {
        const TransferResult lap = period_map(curve, T, res.nu0, length, icfg);
        res.iterations = k + 1;
        if (lap.stopped) {
            res.stopped = true;
            return res;
        }
        const double residual = std::abs(lap.nu - res.nu0);
        res.residuals.push_back(residual);
        res.nu0 = lap.nu;
        if (residual <= cfg.nu_tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

/// Mean slope of the period map across almost the whole pull range; values
/// below one certify the contraction empirically.
[[nodiscard]] inline double contraction_rate(const LeadingCurve& curve, double T, double length,
                                             double margin = 1e-3,
                                             IntegratorConfig icfg = {}) {
    detail::require(margin > 0.0 && margin < pi / 4.0, "margin must sit inside (0, pi/4)");
    const double a = -pi / 2.0 + margin;
    const double b = pi / 2.0 - margin;
    IntegratorConfig run = icfg;
    run.mode = TraceMode::PullOnly;
    const TransferResult pa = period_map(curve, T, a, length, run);
    const TransferResult pb = period_map(curve, T, b, length, run);
    if (pa.stopped || pb.stopped)
        throw std::runtime_error("an endpoint trajectory stopped; the pull is not contracting");
    return (pb.nu - pa.nu) / (b - a);
}

} // namespace tractrix
