#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chua/dynamics.hpp"

// Chaos and figure-of-merit analysis: power spectra, spectral flatness,
// double-scroll lobe statistics, per-component average power, and board
// footprint sums.

namespace chua {

struct Spectrum {
    double df = 0.0;                                  // Hz
    std::vector<std::pair<double, double>> bins;      // (frequency Hz, power V^2)
};

enum class Window { rectangular, hann };

namespace detail {

// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline size_t largest_pow2_not_above(size_t n) {
    size_t p = 1;
    while (p * 2 <= n) p *= 2;
    return p;
}

}  // namespace detail

// One-sided power spectrum. Bin powers are scaled so that their sum
// equals the sum of squared samples (Parseval) for the rectangular
// window; the Hann option is for display only and does not preserve it.
inline Spectrum power_spectrum(std::span<const double> samples, double dt,
                               Window window = Window::rectangular) {
    if (samples.size() < 2)
        throw std::invalid_argument("power_spectrum: need at least 2 samples");
    if (!(dt > 0.0)) throw std::invalid_argument("power_spectrum: dt must be > 0");

    const size_t n = detail::largest_pow2_not_above(samples.size());
    std::vector<std::complex<double>> a(n);
    for (size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n));
        a[i] = samples[i] * w;
    }
    detail::fft(a);

    Spectrum s;
    s.df = 1.0 / (static_cast<double>(n) * dt);
    s.bins.reserve(n / 2 + 1);
    for (size_t k = 0; k <= n / 2; ++k) {
        const double mag2 = std::norm(a[k]);
        const double fold = (k == 0 || k == n / 2) ? 1.0 : 2.0;
        s.bins.emplace_back(static_cast<double>(k) * s.df,
                            fold * mag2 / static_cast<double>(n));
    }
    return s;
}

// Geometric over arithmetic mean of the non-DC bin powers; 1 for a flat
// (noise-like) spectrum, near 0 for a tone.
inline double spectral_flatness(const Spectrum& s) {
    if (s.bins.size() < 9)
        throw std::invalid_argument("spectral_flatness: need at least 8 non-DC bins");
    double log_sum = 0.0, sum = 0.0;
    size_t n = 0;
    bool has_zero = false;
    for (size_t k = 1; k < s.bins.size(); ++k) {
        const double p = s.bins[k].second;
        sum += p;
        if (p <= 0.0)
            has_zero = true;
        else
            log_sum += std::log(p);
        ++n;
    }
    if (sum <= 0.0) return 0.0;  // all-zero spectrum: undefined, reported as 0
    const double am = sum / static_cast<double>(n);
    const double gm = has_zero ? 0.0 : std::exp(log_sum / static_cast<double>(n));
    return gm / am;
}

namespace detail {

inline double trapezoid_mean(const std::vector<double>& y) {
    if (y.size() < 2) return y.empty() ? 0.0 : y.front();
    double acc = 0.0;
    for (size_t i = 1; i < y.size(); ++i) acc += 0.5 * (y[i - 1] + y[i]);
    return acc / static_cast<double>(y.size() - 1);
}

}  // namespace detail

// Trajectory analysis of a GST run would need the recorded device state;
// a mid-range memristance stands in for it here.
inline std::optional<GstState> gst_placeholder(const CircuitParams& p) {
    if (const auto* nl = std::get_if<GstNonlinearity>(&p.nonlinearity)) {
        GstState s = nl->initial;
        if (s.m <= 0.0) s.m = 0.5 * (nl->gst.r_low + nl->gst.r_high);
        return s;
    }
    return std::nullopt;
}

// Time-averaged instantaneous v*i for one branch of the circuit.
// Capacitor and inductor figures are net stored-energy exchange, which
// averages near zero over a bounded orbit.
inline double average_power(const Trajectory& traj, const CircuitParams& p,
                            std::string_view component) {
    if (traj.samples.size() < 2)
        throw std::invalid_argument("average_power: trajectory too short");
    std::vector<double> inst;
    inst.reserve(traj.samples.size());
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const StateVector& x = traj.samples[i];
        const double t = traj.t0 + static_cast<double>(i) * traj.dt;
        if (component == "R1") {
            const double dv = x.v1 - x.v2;
            inst.push_back(dv * dv / p.r1);
        } else if (component == "C1") {
            inst.push_back(x.v1 * p.c1 * rhs(t, x, p, gst_placeholder(p)).v1);
        } else if (component == "C2") {
            inst.push_back(x.v2 * p.c2 * rhs(t, x, p, gst_placeholder(p)).v2);
        } else if (component == "L") {
            // v_L = L diL/dt = v2
            inst.push_back(x.v2 * x.i_l);
        } else if (component == "memristor") {
            const double v_mem = x.v1 - drive_voltage(t, p);
            inst.push_back(v_mem * nonlinearity_current({.phi = x.phi, .v = v_mem},
                                                        gst_placeholder(p),
                                                        p.nonlinearity));
        } else {
            throw std::invalid_argument("average_power: unknown component '" +
                                        std::string(component) + "'");
        }
    }
    return detail::trapezoid_mean(inst);
}

struct LobeStats {
    long lobe_a_count = 0;   // dwell episodes with v1 > +hysteresis
    long lobe_b_count = 0;   // dwell episodes with v1 < -hysteresis
    long transitions = 0;    // direct switches between the two lobes
};

// Classifies samples by the sign of v1 with a +/-hysteresis dead band.
inline LobeStats lobe_transitions(const Trajectory& traj, double hysteresis) {
    if (!(hysteresis > 0.0))
        throw std::invalid_argument("lobe_transitions: hysteresis must be > 0");
    LobeStats out;
    int state = 0;  // 0 unknown, +1 lobe A, -1 lobe B
    for (const StateVector& x : traj.samples) {
        if (x.v1 > hysteresis && state != 1) {
            if (state == -1) ++out.transitions;
            state = 1;
            ++out.lobe_a_count;
        } else if (x.v1 < -hysteresis && state != -1) {
            if (state == 1) ++out.transitions;
            state = -1;
            ++out.lobe_b_count;
        }
    }
    return out;
}

// Default dead band: 5% of the v1 standard deviation.
inline double default_lobe_hysteresis(const Trajectory& traj) {
    double mean = 0.0;
    for (const auto& x : traj.samples) mean += x.v1;
    mean /= static_cast<double>(traj.samples.size());
    double var = 0.0;
    for (const auto& x : traj.samples) var += (x.v1 - mean) * (x.v1 - mean);
    var /= static_cast<double>(traj.samples.size());
    return 0.05 * std::sqrt(var);
}

struct BomEntry {
    std::string name;
    double width_mm;
    double height_mm;
    int count;
};

// Catalog dimensions used by the footprint comparison. The quoted
// circuit totals (162 mm^2 and 1.155 mm^2) do not follow from these
// per-part dimensions by summation; both numbers are reported side by
// side and the gap is flagged, not asserted.
namespace bom {

inline constexpr double kQuotedOriginalTotalMm2 = 162.0;
inline constexpr double kQuotedEmulatorTotalMm2 = 1.155;

// Diode-resistor nonlinear element: two 1N4148 diodes and two resistor pairs.
inline std::vector<BomEntry> original_nonlinear_resistor() {
    return {
        {"1N4148 body", 3.4, 1.75, 2},
        {"1N4148 wires", 25.4, 0.55, 2},
        {"chip resistor", 0.6, 0.3, 4},
    };
}

// Emulator network: three resistors, two chip capacitors.
inline std::vector<BomEntry> gst_emulator_network() {
    return {
        {"chip resistor", 0.6, 0.3, 3},
        {"chip capacitor", 0.51, 0.25, 2},
    };
}

// Integrated GST device, assumed 1x1 um.
inline std::vector<BomEntry> gst_device() {
    return {{"GST device", 1e-3, 1e-3, 1}};
}

}  // namespace bom

// Sum of count * width * height over the bill of materials, mm^2.
inline double footprint_area(std::span<const BomEntry> bom) {
    if (bom.empty()) throw std::invalid_argument("footprint_area: empty BOM");
    double area = 0.0;
    for (const auto& e : bom) {
        if (e.width_mm <= 0.0 || e.height_mm <= 0.0 || e.count <= 0)
            throw std::invalid_argument("footprint_area: invalid BOM entry '" + e.name +
                                        "'");
        area += static_cast<double>(e.count) * e.width_mm * e.height_mm;
    }
    return area;
}

}  // namespace chua
