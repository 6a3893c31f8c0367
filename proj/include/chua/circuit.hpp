#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

// Device models of the memristive double-scroll oscillator: the cubic
// flux-controlled memductance, the three-segment Chua diode, and the
// GST phase-change memristor with its RC emulator network.

namespace chua {

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x))
        throw std::domain_error(std::string(what) + " must be finite");
}

// Component values of the GST emulator network: contact resistance in
// series with two parallel RC branches (grain and grain-boundary defects).
struct EmulatorParams {
    double r_s;    // contact resistance, ohm
    double r_g;    // grain resistance, ohm
    double c_g;    // grain capacitance, F
    double r_gb;   // grain-boundary resistance, ohm
    double c_gb;   // grain-boundary capacitance, F

    void validate() const {
        for (auto [v, n] : {std::pair{r_s, "r_s"}, {r_g, "r_g"}, {c_g, "c_g"},
                            {r_gb, "r_gb"}, {c_gb, "c_gb"}}) {
            if (!std::isfinite(v) || v <= 0.0)
                throw std::invalid_argument(std::string("EmulatorParams::") + n +
                                            " must be positive and finite");
        }
    }
};

// W(phi) = theta + sigma*phi^2, q(phi) = theta*phi + (sigma/3)*phi^3.
struct CubicNonlinearity {
    double theta;   // S
    double sigma;   // S/Wb^2

    void validate() const {
        require_finite(theta, "theta");
        require_finite(sigma, "sigma");
    }
};

// Odd-symmetric three-segment conductance, the classic diode-resistor
// Chua element reduced to its i-v characteristic.
struct PwlNonlinearity {
    double inner_slope;  // S, |v| <= breakpoint
    double outer_slope;  // S, beyond the breakpoints
    double breakpoint;   // V

    void validate() const {
        require_finite(inner_slope, "inner_slope");
        require_finite(outer_slope, "outer_slope");
        if (!std::isfinite(breakpoint) || breakpoint <= 0.0)
            throw std::invalid_argument("PwlNonlinearity::breakpoint must be > 0");
    }
};

enum class PhaseMap { identity, logistic };

struct GstParams {
    double alpha;      // memristance rate below threshold
    double beta;       // memristance rate above threshold
    double v_l;        // left threshold voltage, V
    double v_r;        // right threshold voltage, V
    double gamma;      // phase-transition correction factor
    double w_t;        // phase-transition threshold
    double r_low;      // minimum memristance, ohm
    double r_high;     // maximum memristance, ohm
    PhaseMap phase_map = PhaseMap::identity;

    void validate() const {
        if (v_l <= 0.0 || v_r <= 0.0)
            throw std::invalid_argument("GstParams thresholds must be > 0");
        if (!(0.0 < r_low && r_low < r_high))
            throw std::invalid_argument("GstParams requires 0 < r_low < r_high");
        if (gamma <= 0.0)
            throw std::invalid_argument("GstParams::gamma must be > 0");
    }
};

struct GstState {
    double m;  // memristance, ohm
    double w;  // phase variable, dimensionless
};

// GST device model plus the emulator network it is realized with.
struct GstNonlinearity {
    GstParams gst;
    EmulatorParams emulator;
    GstState initial{.m = 0.0, .w = 0.0};  // m == 0 means midpoint of [r_low, r_high]

    void validate() const {
        gst.validate();
        emulator.validate();
    }
};

using Nonlinearity = std::variant<CubicNonlinearity, PwlNonlinearity, GstNonlinearity>;

struct Drive {
    double amplitude;  // V
    double frequency;  // Hz
};

struct CircuitParams {
    double r1;  // ohm
    double c1;  // F
    double c2;  // F
    double l;   // H
    Nonlinearity nonlinearity;
    std::optional<Drive> drive;

    void validate() const {
        for (auto [v, n] : {std::pair{r1, "r1"}, {c1, "c1"}, {c2, "c2"}, {l, "l"}}) {
            if (!std::isfinite(v) || v <= 0.0)
                throw std::invalid_argument(std::string("CircuitParams::") + n +
                                            " must be positive and finite");
        }
        std::visit([](const auto& nl) { nl.validate(); }, nonlinearity);
        if (drive && drive->frequency <= 0.0)
            throw std::invalid_argument("drive frequency must be > 0");
    }
};

// W(phi) = theta + sigma*phi^2
inline double memductance(double phi, const CubicNonlinearity& nl) {
    require_finite(phi, "phi");
    return nl.theta + nl.sigma * phi * phi;
}

// q(phi) = theta*phi + (sigma/3)*phi^3, the exact antiderivative of the
// memductance so that W = dq/dphi holds identically. A commonly printed
// variant writes the cubic coefficient as sigma, which is inconsistent
// with its own W = theta + sigma*phi^2 by a factor of 3.
inline double charge(double phi, const CubicNonlinearity& nl) {
    require_finite(phi, "phi");
    return nl.theta * phi + (nl.sigma / 3.0) * phi * phi * phi;
}

// theta from the negative-resistor load: theta = -1/R_load.
inline double derive_theta(double r_load) {
    if (!std::isfinite(r_load) || r_load <= 0.0)
        throw std::domain_error("derive_theta: r_load must be > 0");
    return -1.0 / r_load;
}

// sigma = (1/3) * (R_g + R_gb) / (R_gb * R_load * R_c).
inline double derive_sigma(double r_g, double r_gb, double r_load, double r_c) {
    for (double v : {r_g, r_gb, r_load, r_c})
        if (!std::isfinite(v) || v <= 0.0)
            throw std::domain_error("derive_sigma: all resistances must be > 0");
    return (r_g + r_gb) / (3.0 * r_gb * r_load * r_c);
}

inline double pwl_current(double v, const PwlNonlinearity& nl) {
    require_finite(v, "v");
    const double a = std::abs(v);
    if (a <= nl.breakpoint) return nl.inner_slope * v;
    const double mag = nl.inner_slope * nl.breakpoint + nl.outer_slope * (a - nl.breakpoint);
    return v > 0.0 ? mag : -mag;
}

// f(V) = -beta*V + (beta-alpha)/2 * (|V+V_L| - |V-V_R| + V_R - V_L).
// Reduces to -alpha*V on the inner segment -V_L < V < V_R.
inline double gst_f(double v, const GstParams& p) {
    require_finite(v, "v");
    return -p.beta * v +
           0.5 * (p.beta - p.alpha) *
               (std::abs(v + p.v_l) - std::abs(v - p.v_r) + p.v_r - p.v_l);
}

namespace detail {
// Unit step with step(0) = 0, so the rate gates close exactly at the
// memristance rails.
inline double unit_step(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline double phase_map_value(double w, PhaseMap map) {
    switch (map) {
        case PhaseMap::logistic: return 4.0 * w * (1.0 - w);
        case PhaseMap::identity: default: return w;
    }
}
}  // namespace detail

// One explicit update of (M, W). The memristance rate is gated so M can
// only move inside [r_low, r_high]; the phase variable follows the
// configured mapping and stays in [0, 1].
inline GstState gst_step(GstState s, double v_m, double dt, const GstParams& p) {
    require_finite(v_m, "v_m");
    if (s.m < p.r_low || s.m > p.r_high)
        throw std::logic_error("gst_step: memristance outside [r_low, r_high]");
    const double gate = detail::unit_step(v_m) * detail::unit_step(s.m / p.r_low - 1.0) +
                        detail::unit_step(-v_m) * detail::unit_step(1.0 - s.m / p.r_high);
    const double dm = gst_f(v_m, p) * gate * p.gamma * (1.0 + s.w);
    GstState out;
    out.m = std::clamp(s.m + dt * dm, p.r_low, p.r_high);
    const double w_next = s.w * detail::phase_map_value(s.w, p.phase_map) * (s.w - p.w_t);
    out.w = std::clamp(w_next, 0.0, 1.0);
    return out;
}

// Branch drive for the nonlinear element: flux for the cubic model,
// voltage across the element for PWL and GST.
struct BranchInput {
    double phi;  // Wb
    double v;    // V
};

// Single dispatch point for the memristor/diode branch current used by
// the ODE right-hand side.
inline double nonlinearity_current(const BranchInput& in,
                                   const std::optional<GstState>& state,
                                   const Nonlinearity& nl) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CubicNonlinearity>) {
                return memductance(in.phi, n) * in.v;
            } else if constexpr (std::is_same_v<T, PwlNonlinearity>) {
                return pwl_current(in.v, n);
            } else {
                if (!state)
                    throw std::invalid_argument(
                        "nonlinearity_current: GST variant requires a GstState");
                return in.v / state->m;
            }
        },
        nl);
}

}  // namespace chua
