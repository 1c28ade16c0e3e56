#pragma once

// =============================================================================
// Pull-angle integrator for arbitrary leading curves. The state (nu, s) obeys
//
//     d nu / d l = q(l) - sin(nu) / T_eff,      d s / d l = cos(nu),
//
// which is regular in l even at cusps (|nu| = pi/2), so a fixed-step RK4 in l
// keeps its full order everywhere. Steps never straddle corners or curvature
// breakpoints, cusps are located by bisection, and the trace point is
// reconstructed exactly from the leash constraint B = A - T_eff * unit(tau).
// =============================================================================

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tractrix/geometry.hpp"

namespace tractrix {

enum class TraceMode {
    PullOnly,  // stop when the pull degenerates (cusp or slack corner)
    PushPull   // flip into push through cusps and keep going
};

struct IntegratorConfig {
    /// Base step in leading arc; 0 picks min(|T|, 1/max curvature) / 200.
    double step = 0.0;
    /// Steps shrink by this factor while |cos nu| is below the threshold.
    int refine_factor = 8;
    double refine_cos_threshold = 0.2;
    /// Caps on how far to integrate; whichever binds first ends the trace.
    double max_leading_arc = inf;
    double max_trace_arc = inf;
    TraceMode mode = TraceMode::PullOnly;
    /// Initial pull angle; the canonical start is the rear cusp.
    double nu0 = -pi / 2.0;
    /// Step-doubling tolerance on nu; 0 disables rejection so the integrator
    /// stays a pure fixed-step scheme with a clean convergence order.
    double local_error_tol = 0.0;
    /// Bisection width in l for locating cusps.
    double event_tol = 1e-12;
};

namespace detail {

struct PullState {
    double nu = 0.0;
    double s = 0.0;
    double t_eff = 1.0;
};

inline void check_config(const IntegratorConfig& cfg) {
    require(cfg.step >= 0.0 && std::isfinite(cfg.step), "step must be finite and nonnegative");
    require(cfg.refine_factor >= 1, "refine factor must be at least 1");
    require(cfg.refine_cos_threshold >= 0.0, "refine threshold must be nonnegative");
    require(std::abs(cfg.nu0) <= pi / 2.0 + 1e-12, "initial pull angle must lie in [-pi/2, pi/2]");
    require(cfg.event_tol > 0.0, "event tolerance must be positive");
    require(cfg.max_leading_arc > 0.0 && cfg.max_trace_arc > 0.0, "arc caps must be positive");
}

[[nodiscard]] inline double base_step(const LeadingCurve& curve, double T,
                                      const IntegratorConfig& cfg) {
    if (cfg.step > 0.0) return cfg.step;
    double h = std::abs(T);
    if (curve.max_abs_curvature > 0.0) h = std::min(h, 1.0 / curve.max_abs_curvature);
    return h / 200.0;
}

/// Classic RK4 on the joint state over [l0, l0 + h].
[[nodiscard]] inline PullState rk4_step(const LeadingCurve& curve, PullState st, double l0,
                                        double h) {
    const auto f_nu = [&](double l, double nu) {
        return curve.at(l).curvature - std::sin(nu) / st.t_eff;
    };
    const auto f_s = [](double nu) { return std::max(0.0, std::cos(nu)); };

    const double k1 = f_nu(l0, st.nu);
    const double m1 = f_s(st.nu);
    const double k2 = f_nu(l0 + 0.5 * h, st.nu + 0.5 * h * k1);
    const double m2 = f_s(st.nu + 0.5 * h * k1);
    const double k3 = f_nu(l0 + 0.5 * h, st.nu + 0.5 * h * k2);
    const double m3 = f_s(st.nu + 0.5 * h * k2);
    const double k4 = f_nu(l0 + h, st.nu + h * k3);
    const double m4 = f_s(st.nu + h * k3);

    PullState out = st;
    out.nu += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.s += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    return out;
}

/// Two half steps, which both sharpens the constant and supplies an error
/// estimate against the single full step.
[[nodiscard]] inline PullState advance(const LeadingCurve& curve, PullState st, double l0,
                                       double h, double* error_estimate = nullptr) {
    const PullState half = rk4_step(curve, st, l0, 0.5 * h);
    const PullState two = rk4_step(curve, half, l0 + 0.5 * h, 0.5 * h);
    if (error_estimate != nullptr) {
        const PullState one = rk4_step(curve, st, l0, h);
        *error_estimate = std::abs(one.nu - two.nu) / 15.0;
    }
    return two;
}

struct WalkResult {
    PullState state;
    double l = 0.0;
    Termination termination = Termination::ReachedLength;
    std::vector<ModeSwitch> switches;
};

/// Next corner strictly after l, unwrapping the corner list for periodic
/// curves. Returns the corner arc and its turn, or nothing before l_stop.
class CornerWalker {
  public:
    CornerWalker(const LeadingCurve& curve, double l_begin) : curve_(curve) {
        if (curve.period) {
            lap_ = std::floor(l_begin / *curve.period);
            while (absolute(index_, lap_) <= l_begin + kEdge) bump();
        } else {
            while (index_ < curve.corners.size() &&
                   curve.corners[index_].l <= l_begin + kEdge)
                ++index_;
        }
    }

    [[nodiscard]] bool has_next() const {
        if (curve_.period) return !curve_.corners.empty();
        return index_ < curve_.corners.size();
    }

    [[nodiscard]] double next_l() const { return absolute(index_, lap_); }
    [[nodiscard]] double next_turn() const { return curve_.corners[index_].turn; }

    void consume() { bump(); }

  private:
    static constexpr double kEdge = 1e-12;

    [[nodiscard]] double absolute(std::size_t idx, double lap) const {
        if (!curve_.period) {
            return idx < curve_.corners.size() ? curve_.corners[idx].l : inf;
        }
        if (curve_.corners.empty()) return inf;
        return curve_.corners[idx].l + lap * *curve_.period;
    }

    void bump() {
        ++index_;
        if (curve_.period && index_ >= curve_.corners.size()) {
            index_ = 0;
            lap_ += 1.0;
        }
    }

    const LeadingCurve& curve_;
    std::size_t index_ = 0;
    double lap_ = 0.0;
};

/// Core fixed-step walker. Emits (l, state, at_cusp, theta_shift) for the
/// start point, every accepted step, and both sides of cusps and corners. The
/// curve adapters are right-continuous at corners, so the sample emitted on
/// the approach side carries theta_shift = -turn for its reconstruction.
template <typename Emit>
[[nodiscard]] inline WalkResult walk(const LeadingCurve& curve, double T,
                                     const IntegratorConfig& cfg, double l_begin, Emit&& emit) {
    check_config(cfg);
    require(T != 0.0 && std::isfinite(T), "leash length must be finite and nonzero");

    WalkResult res;
    res.state = {cfg.nu0, 0.0, T};
    res.l = l_begin;
    const double l_stop = std::min(l_begin + cfg.max_leading_arc, curve.total_length);
    const double h_base = base_step(curve, T, cfg);
    // Unbounded runs march in chunks until a cusp or the trace-arc cap ends
    // them; the safety cap turns a runaway into a diagnosable failure.
    const double chunk = 4096.0 * h_base;
    const double l_safety = l_begin + 1e4 * std::abs(T);
    std::size_t emitted = 0;

    const auto record = [&](bool at_cusp, double theta_shift = 0.0) {
        emit(res.l, res.state, at_cusp, theta_shift);
        ++emitted;
    };
    record(std::abs(std::cos(res.state.nu)) < 1e-15);

    CornerWalker corners(curve, l_begin);
    while (res.l < l_stop - 1e-13) {
        if (!std::isfinite(l_stop) && res.l > l_safety)
            throw std::runtime_error(
                "trace exceeded 1e4 leash lengths without terminating; "
                "set max_leading_arc to go further");
        double leg_end = std::min(l_stop, res.l + chunk);
        bool leg_has_corner = false;
        if (corners.has_next() && corners.next_l() < l_stop - 1e-13 &&
            corners.next_l() <= leg_end) {
            leg_end = corners.next_l();
            leg_has_corner = true;
        }

        // March the smooth leg; cusps restart the leg plan from where they hit.
        bool replan = false;
        const double leg_len = leg_end - res.l;
        const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                           std::ceil(leg_len / h_base)));
        const double h_leg = leg_len / static_cast<double>(n);
        const double leg_start = res.l;
        for (std::size_t i = 0; i < n && !replan; ++i) {
            const double l0 = leg_start + static_cast<double>(i) * h_leg;
            const int sub = std::cos(res.state.nu) < cfg.refine_cos_threshold
                                ? cfg.refine_factor
                                : 1;
            const double h_sub = h_leg / sub;
            for (int j = 0; j < sub; ++j) {
                const double l00 = l0 + static_cast<double>(j) * h_sub;
                double h = h_sub;
                double err = 0.0;
                PullState next = advance(curve, res.state, l00, h, &err);
                if (cfg.local_error_tol > 0.0) {
                    while (err > cfg.local_error_tol && h > 1e-12) {
                        h *= 0.5;
                        next = advance(curve, res.state, l00, h, &err);
                    }
                }

                if (std::cos(next.nu) < 0.0) {
                    // Bracket the cusp inside (0, h] by bisecting the step.
                    double lo = 0.0;
                    double hi = h;
                    PullState at_hi = next;
                    while (hi - lo > cfg.event_tol) {
                        const double mid = 0.5 * (lo + hi);
                        const PullState at_mid = advance(curve, res.state, l00, mid);
                        if (std::cos(at_mid.nu) < 0.0) {
                            hi = mid;
                            at_hi = at_mid;
                        } else {
                            lo = mid;
                        }
                    }
                    res.state.s = at_hi.s;
                    const double sgn = at_hi.nu > 0.0 ? 1.0 : -1.0;
                    res.state.nu = sgn * pi / 2.0;
                    res.l = l00 + hi;
                    record(true);
                    if (cfg.mode == TraceMode::PullOnly) {
                        res.termination = Termination::Stopped;
                        return res;
                    }
                    res.switches.push_back({res.l, ModeSwitchKind::CuspReversal, emitted - 1});
                    res.state.nu = -sgn * pi / 2.0;
                    res.state.t_eff = -res.state.t_eff;
                    record(true);
                    replan = true;
                    break;
                }

                res.state = next;
                const bool leg_final = (i + 1 == n) && (j + 1 == sub);
                res.l = leg_final ? leg_end
                                  : ((j + 1 == sub) ? l0 + h_leg : l00 + h_sub);
                double shift = (leg_final && leg_has_corner) ? -corners.next_turn() : 0.0;
                if (h < h_sub) {
                    // Error control shortened the step: advance only h, then
                    // replan the remaining leg from there.
                    res.l = l00 + h;
                    shift = 0.0;
                    replan = true;
                }
                record(false, shift);
                if (res.state.s >= cfg.max_trace_arc) {
                    res.termination = Termination::ReachedLength;
                    return res;
                }
                if (replan) break;
            }
        }
        if (replan) continue;

        res.l = leg_end;
        if (!leg_has_corner) continue;

        const double turn = corners.next_turn();
        corners.consume();
        if (turn != 0.0) {
            require(std::abs(turn) < pi, "corner turn magnitude must be below pi");
            require(std::abs(std::cos(res.state.nu)) >= 1e-9,
                    "corner coincides with a cusp; the jump is not well defined");
            const double nu_c = res.state.nu + turn;
            if (std::abs(nu_c) < pi / 2.0) {
                res.state.nu = nu_c;
                record(false);
            } else if (cfg.mode == TraceMode::PullOnly) {
                res.switches.push_back({res.l, ModeSwitchKind::StopSlack, emitted - 1});
                res.termination = Termination::Stopped;
                return res;
            } else {
                res.switches.push_back({res.l, ModeSwitchKind::CuspReversal, emitted - 1});
                res.state.nu = nu_c - (nu_c > 0.0 ? pi : -pi);
                res.state.t_eff = -res.state.t_eff;
                record(false);
            }
        }
    }
    res.termination = Termination::ReachedLength;
    return res;
}

} // namespace detail

/// Reconstruct the trace point from the leading pose and the pull state: the
/// trace tangent is tau = theta - nu and the leash stretches t_eff ahead.
/// theta_shift corrects the evaluated tangent angle on the approach side of a
/// corner, where the curve adapters already report the departing direction.
[[nodiscard]] inline TraceSample reconstruct(const LeadingCurve& curve, double l,
                                             double nu, double s, double t_eff,
                                             double theta_shift = 0.0) {
    const CurvePoint a = curve.at(l);
    const double tau = a.theta + theta_shift - nu;
    TraceSample out;
    out.l = l;
    out.s = s;
    out.nu = nu;
    out.pose = {a.position - t_eff * unit_vector(tau), normalize_angle(tau)};
    const double c = std::cos(nu);
    out.curvature = (c == 0.0) ? (nu > 0.0 ? 1.0 : -1.0) * (t_eff > 0.0 ? inf : -inf)
                               : std::tan(nu) / t_eff;
    return out;
}

/// Integrate the pull angle over one stretch of leading arc without building
/// samples; the workhorse behind periodic orbit searches.
struct TransferResult {
    double nu = 0.0;
    double s = 0.0;
    bool stopped = false;
};

[[nodiscard]] inline TransferResult transfer(const LeadingCurve& curve, double T, double nu0,
                                             double l_begin, double length,
                                             IntegratorConfig cfg = {}) {
    cfg.nu0 = nu0;
    cfg.max_leading_arc = length;
    const auto drop = [](double, const detail::PullState&, bool, double) {};
    const detail::WalkResult res = detail::walk(curve, T, cfg, l_begin, drop);
    return {res.state.nu, res.state.s, res.termination == Termination::Stopped};
}

/// Trace the tractrix of `curve` with signed leash T (negative starts in
/// push). Samples cover the start, every integrator step, and both sides of
/// every cusp and corner.
[[nodiscard]] inline Trace trace_curve(const LeadingCurve& curve, double T,
                                       const IntegratorConfig& cfg = {}) {
    Trace trace;
    const auto emit = [&](double l, const detail::PullState& st, bool at_cusp,
                          double theta_shift) {
        TraceSample sample = reconstruct(curve, l, st.nu, st.s, st.t_eff, theta_shift);
        if (at_cusp)
            sample.curvature = (st.nu > 0.0 ? 1.0 : -1.0) * (st.t_eff > 0.0 ? inf : -inf);
        trace.samples.push_back(sample);
    };
    detail::WalkResult res = detail::walk(curve, T, cfg, 0.0, emit);
    trace.mode_switches = std::move(res.switches);
    trace.termination = res.termination;
    return trace;
}

} // namespace tractrix
