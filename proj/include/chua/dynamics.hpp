#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "chua/circuit.hpp"

// The 4-dimensional oscillator ODEs, their analytic Jacobian, and a
// fixed-step RK4 integrator.
//
// Circuit equations, implemented exactly as printed in the source model:
//   dphi/dt = V1
//   dV1/dt  = [(V2 - V1)/R1 - i(t)] / C1
//   dV2/dt  = [(V1 - V2)/R1 - iL ] / C2
//   diL/dt  = V2 / L
// The common formulation flips the signs of both iL terms; the two
// conventions are related by iL -> -iL and are dynamically equivalent.

namespace chua {

struct StateVector {
    double phi;  // Wb
    double v1;   // V
    double v2;   // V
    double i_l;  // A

    bool finite() const {
        return std::isfinite(phi) && std::isfinite(v1) && std::isfinite(v2) &&
               std::isfinite(i_l);
    }
    double max_abs() const {
        return std::max(std::max(std::abs(phi), std::abs(v1)),
                        std::max(std::abs(v2), std::abs(i_l)));
    }

    friend StateVector operator+(StateVector a, const StateVector& b) {
        return {a.phi + b.phi, a.v1 + b.v1, a.v2 + b.v2, a.i_l + b.i_l};
    }
    friend StateVector operator*(double s, const StateVector& a) {
        return {s * a.phi, s * a.v1, s * a.v2, s * a.i_l};
    }
    double operator[](int i) const {
        switch (i) {
            case 0: return phi;
            case 1: return v1;
            case 2: return v2;
            default: return i_l;
        }
    }
    double& operator[](int i) {
        switch (i) {
            case 0: return phi;
            case 1: return v1;
            case 2: return v2;
            default: return i_l;
        }
    }
};

struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<StateVector> samples;
    // Explicit time column, filled only when loading from file. The
    // recovered dt can differ from the original in its last bits, so
    // re-emission uses these verbatim to stay byte-identical.
    std::vector<double> times;
    std::string params_digest;
};

struct IntegratorConfig {
    double dt = 1e-6;             // resolves R1*C1 = 20 us with >= 20 steps
    double t_end = 0.2;
    double transient_skip = 0.05;

    void validate() const {
        if (!(dt > 0.0) || !(dt <= t_end))
            throw std::invalid_argument("IntegratorConfig: need 0 < dt <= t_end");
        if (!(transient_skip >= 0.0) || !(transient_skip < t_end))
            throw std::invalid_argument("IntegratorConfig: need 0 <= transient_skip < t_end");
    }
};

// Thrown when the state leaves the numerically meaningful range.
class IntegrationFault : public std::runtime_error {
public:
    IntegrationFault(const std::string& msg, double t)
        : std::runtime_error(msg + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

inline constexpr double kBlowupLimit = 1e9;  // SI units, far above physical scales

inline double drive_voltage(double t, const CircuitParams& p) {
    if (!p.drive) return 0.0;
    return p.drive->amplitude * std::sin(2.0 * std::numbers::pi * p.drive->frequency * t);
}

// Right-hand side. For the GST variant the instantaneous device state
// must be supplied; it is advanced outside the RK stages.
inline StateVector rhs(double t, const StateVector& x, const CircuitParams& p,
                       const std::optional<GstState>& gst = std::nullopt) {
    if (!x.finite()) throw IntegrationFault("non-finite state", t);
    // With a series drive the memristor branch sees v1 - vs(t); the flux
    // state is the flux across the memristor, so it follows the same voltage.
    const double v_mem = x.v1 - drive_voltage(t, p);
    const double i = nonlinearity_current({.phi = x.phi, .v = v_mem}, gst, p.nonlinearity);
    return {
        v_mem,
        ((x.v2 - x.v1) / p.r1 - i) / p.c1,
        ((x.v1 - x.v2) / p.r1 - x.i_l) / p.c2,
        x.v2 / p.l,
    };
}

using Mat4 = std::array<std::array<double, 4>, 4>;

struct Jacobian {
    Mat4 m{};
    bool finite_difference = false;  // set when no analytic form exists

    double trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }
};

namespace detail {

inline Mat4 linear_part(const CircuitParams& p) {
    Mat4 j{};
    j[0][1] = 1.0;
    j[1][1] = -1.0 / (p.r1 * p.c1);
    j[1][2] = 1.0 / (p.r1 * p.c1);
    j[2][1] = 1.0 / (p.r1 * p.c2);
    j[2][2] = -1.0 / (p.r1 * p.c2);
    j[2][3] = -1.0 / p.c2;
    j[3][2] = 1.0 / p.l;
    return j;
}

inline Jacobian finite_difference_jacobian(const StateVector& x, const CircuitParams& p,
                                           const std::optional<GstState>& gst) {
    Jacobian out;
    out.finite_difference = true;
    const double scale = std::max(x.max_abs(), 1.0);
    const double h = 1e-6 * scale;
    for (int col = 0; col < 4; ++col) {
        StateVector xp = x, xm = x;
        xp[col] += h;
        xm[col] -= h;
        const StateVector fp = rhs(0.0, xp, p, gst);
        const StateVector fm = rhs(0.0, xm, p, gst);
        for (int row = 0; row < 4; ++row)
            out.m[row][col] = (fp[row] - fm[row]) / (2.0 * h);
    }
    return out;
}

}  // namespace detail

// Analytic linearization of the autonomous system. Cubic and PWL
// variants are exact; the GST variant falls back to central finite
// differences around the frozen device state, flagged in the result.
inline Jacobian jacobian(const StateVector& x, const CircuitParams& p,
                         const std::optional<GstState>& gst = std::nullopt) {
    if (const auto* nl = std::get_if<CubicNonlinearity>(&p.nonlinearity)) {
        Jacobian out{detail::linear_part(p), false};
        const double w = memductance(x.phi, *nl);
        out.m[1][0] = -2.0 * nl->sigma * x.phi * x.v1 / p.c1;
        out.m[1][1] -= w / p.c1;
        return out;
    }
    if (const auto* nl = std::get_if<PwlNonlinearity>(&p.nonlinearity)) {
        Jacobian out{detail::linear_part(p), false};
        const double slope =
            std::abs(x.v1) <= nl->breakpoint ? nl->inner_slope : nl->outer_slope;
        out.m[1][1] -= slope / p.c1;
        return out;
    }
    return detail::finite_difference_jacobian(x, p, gst);
}

// One classical RK4 step; deterministic and bit-stable for identical inputs.
inline StateVector step_rk4(double t, const StateVector& x, double dt,
                            const CircuitParams& p,
                            const std::optional<GstState>& gst = std::nullopt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be > 0");
    const StateVector k1 = rhs(t, x, p, gst);
    const StateVector k2 = rhs(t + dt / 2, x + (dt / 2) * k1, p, gst);
    const StateVector k3 = rhs(t + dt / 2, x + (dt / 2) * k2, p, gst);
    const StateVector k4 = rhs(t + dt, x + dt * k3, p, gst);
    const StateVector out =
        x + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!out.finite()) throw IntegrationFault("non-finite RK4 result", t);
    return out;
}

namespace detail {

// Holds the GST device state across steps when that variant is active.
struct GstCarrier {
    std::optional<GstState> state;

    explicit GstCarrier(const CircuitParams& p) {
        if (const auto* nl = std::get_if<GstNonlinearity>(&p.nonlinearity)) {
            GstState s = nl->initial;
            if (s.m <= 0.0) s.m = 0.5 * (nl->gst.r_low + nl->gst.r_high);
            state = s;
        }
    }

    // Strang-style splitting: half a device update, the RK4 step with the
    // device frozen, then the second half with the post-step voltage.
    void advance_pre(double t, const StateVector& x, double dt, const CircuitParams& p) {
        if (!state) return;
        const auto& nl = std::get<GstNonlinearity>(p.nonlinearity);
        state = gst_step(*state, x.v1 - drive_voltage(t, p), dt / 2, nl.gst);
    }
    void advance_post(double t, const StateVector& x, double dt, const CircuitParams& p) {
        if (!state) return;
        const auto& nl = std::get<GstNonlinearity>(p.nonlinearity);
        state = gst_step(*state, x.v1 - drive_voltage(t, p), dt / 2, nl.gst);
    }
};

}  // namespace detail

// Integrates from x0, discards the transient, then records every
// record_every-th step (and the first post-transient state). Identical
// inputs give identical trajectories.
inline Trajectory integrate_decimated(const StateVector& x0, const CircuitParams& p,
                                      const IntegratorConfig& cfg, long record_every) {
    cfg.validate();
    p.validate();
    if (record_every < 1)
        throw std::invalid_argument("integrate: record_every must be >= 1");

    const long n_total = std::lround(cfg.t_end / cfg.dt);
    const long n_skip = std::lround(cfg.transient_skip / cfg.dt);

    Trajectory traj;
    traj.t0 = cfg.transient_skip;
    traj.dt = cfg.dt * static_cast<double>(record_every);
    traj.samples.reserve(static_cast<size_t>((n_total - n_skip) / record_every) + 1);

    StateVector x = x0;
    const auto* cubic = std::get_if<CubicNonlinearity>(&p.nonlinearity);
    const bool fast_path = cubic != nullptr && !p.drive;
    detail::GstCarrier gst(p);
    if (n_skip == 0) traj.samples.push_back(x);
    for (long i = 0; i < n_total; ++i) {
        const double t = i * cfg.dt;
        if (fast_path) {
            // Same RK4 arithmetic as step_rk4 with the branch-current
            // dispatch hoisted out; the long TRNG runs live here.
            const double dt = cfg.dt;
            auto f = [&](const StateVector& s) -> StateVector {
                const double w = cubic->theta + cubic->sigma * s.phi * s.phi;
                return {s.v1, ((s.v2 - s.v1) / p.r1 - w * s.v1) / p.c1,
                        ((s.v1 - s.v2) / p.r1 - s.i_l) / p.c2, s.v2 / p.l};
            };
            const StateVector k1 = f(x);
            const StateVector k2 = f(x + (dt / 2) * k1);
            const StateVector k3 = f(x + (dt / 2) * k2);
            const StateVector k4 = f(x + dt * k3);
            x = x + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!x.finite()) throw IntegrationFault("non-finite RK4 result", t);
        } else {
            gst.advance_pre(t, x, cfg.dt, p);
            x = step_rk4(t, x, cfg.dt, p, gst.state);
            gst.advance_post(t + cfg.dt, x, cfg.dt, p);
        }
        if (x.max_abs() > kBlowupLimit)
            throw IntegrationFault("trajectory blow-up", t + cfg.dt);
        if (i + 1 >= n_skip && (i + 1 - n_skip) % record_every == 0)
            traj.samples.push_back(x);
    }
    return traj;
}

inline Trajectory integrate(const StateVector& x0, const CircuitParams& p,
                            const IntegratorConfig& cfg) {
    return integrate_decimated(x0, p, cfg, 1);
}

}  // namespace chua
