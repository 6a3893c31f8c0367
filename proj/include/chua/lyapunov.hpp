#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "chua/dynamics.hpp"

// Benettin-style Lyapunov spectrum: four tangent vectors co-integrated
// under the linearized flow, re-orthonormalized by Gram-Schmidt at a
// fixed interval; exponents are the time-averaged log stretch factors.

namespace chua {

struct LyapunovResult {
    std::array<double, 4> exponents{};  // 1/s, descending
    // One row per renormalization: (t, running lambda_1..lambda_4).
    std::vector<std::array<double, 5>> history;
    double dt = 0.0;
    double t_total = 0.0;
    double renorm_interval = 0.0;
    double last_quarter_spread = 0.0;   // max |change| of lambda_1 over the last quarter
    double mean_jacobian_trace = 0.0;   // along the same trajectory
    bool finite_difference_jacobian = false;
};

namespace detail {

// Modified Gram-Schmidt on the columns of Q; returns the column norms
// before normalization (the stretch factors).
inline std::array<double, 4> gram_schmidt(Mat4& q) {
    std::array<double, 4> norms{};
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < 4; ++i) dot += q[i][j] * q[i][k];
            for (int i = 0; i < 4; ++i) q[i][j] -= dot * q[i][k];
        }
        double n = 0.0;
        for (int i = 0; i < 4; ++i) n += q[i][j] * q[i][j];
        n = std::sqrt(n);
        norms[j] = n;
        if (n > 0.0)
            for (int i = 0; i < 4; ++i) q[i][j] /= n;
    }
    return norms;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 c{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const double aik = a[i][k];
            for (int j = 0; j < 4; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

inline Mat4 axpy(const Mat4& a, double s, const Mat4& b) {
    Mat4 c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c[i][j] = a[i][j] + s * b[i][j];
    return c;
}

}  // namespace detail

// Generic engine over a flow given by rhs/jacobian callables:
//   Rhs:  StateVector(double t, const StateVector&)
//   Jac:  Mat4(const StateVector&)
// State and tangent matrix advance together in one RK4 scheme, with the
// Jacobian evaluated at the RK stage states.
template <class Rhs, class Jac>
LyapunovResult lyapunov_spectrum_generic(const StateVector& x0, Rhs&& f, Jac&& jac_of,
                                         const IntegratorConfig& cfg,
                                         double renorm_interval) {
    cfg.validate();
    if (!(renorm_interval >= cfg.dt))
        throw std::invalid_argument("lyapunov: renorm_interval must be >= dt");

    const double dt = cfg.dt;
    const long n_total = std::lround(cfg.t_end / dt);
    const long n_skip = std::lround(cfg.transient_skip / dt);
    const long renorm_steps = std::max<long>(1, std::lround(renorm_interval / dt));

    StateVector x = x0;
    Mat4 q{};
    for (int i = 0; i < 4; ++i) q[i][i] = 1.0;

    std::array<double, 4> log_sum{};
    double t_acc = 0.0;
    double trace_sum = 0.0;
    long trace_count = 0;

    LyapunovResult out;
    out.dt = dt;
    out.renorm_interval = renorm_steps * dt;

    for (long i = 0; i < n_total; ++i) {
        const double t = i * dt;
        const Mat4 j1 = jac_of(x);
        const StateVector k1 = f(t, x);
        const Mat4 m1 = detail::matmul(j1, q);

        const StateVector x2 = x + (dt / 2) * k1;
        const StateVector k2 = f(t + dt / 2, x2);
        const Mat4 m2 = detail::matmul(jac_of(x2), detail::axpy(q, dt / 2, m1));

        const StateVector x3 = x + (dt / 2) * k2;
        const StateVector k3 = f(t + dt / 2, x3);
        const Mat4 m3 = detail::matmul(jac_of(x3), detail::axpy(q, dt / 2, m2));

        const StateVector x4 = x + dt * k3;
        const StateVector k4 = f(t + dt, x4);
        const Mat4 m4 = detail::matmul(jac_of(x4), detail::axpy(q, dt, m3));

        x = x + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                q[r][c] += (dt / 6) * (m1[r][c] + 2 * m2[r][c] + 2 * m3[r][c] + m4[r][c]);

        if (!x.finite() || x.max_abs() > kBlowupLimit)
            throw IntegrationFault("lyapunov trajectory blow-up", t + dt);

        if (i >= n_skip) {
            trace_sum += j1[0][0] + j1[1][1] + j1[2][2] + j1[3][3];
            ++trace_count;
        }

        if ((i + 1) % renorm_steps == 0) {
            const auto norms = detail::gram_schmidt(q);
            if (i + 1 > n_skip) {
                for (int k = 0; k < 4; ++k) log_sum[k] += std::log(norms[k]);
                t_acc += renorm_steps * dt;
                std::array<double, 5> row;
                row[0] = (i + 1) * dt;
                for (int k = 0; k < 4; ++k) row[k + 1] = log_sum[k] / t_acc;
                out.history.push_back(row);
            }
        }
    }

    if (t_acc <= 0.0)
        throw std::invalid_argument("lyapunov: no post-transient renormalizations");

    std::array<double, 4> lam;
    for (int k = 0; k < 4; ++k) lam[k] = log_sum[k] / t_acc;
    std::sort(lam.begin(), lam.end(), std::greater<>());
    out.exponents = lam;
    out.t_total = t_acc;
    out.mean_jacobian_trace = trace_count ? trace_sum / trace_count : 0.0;

    const size_t q0 = out.history.size() - out.history.size() / 4;
    double lo = out.history.back()[1], hi = lo;
    for (size_t i = q0; i < out.history.size(); ++i) {
        lo = std::min(lo, out.history[i][1]);
        hi = std::max(hi, out.history[i][1]);
    }
    out.last_quarter_spread = hi - lo;
    return out;
}

// Circuit front-end: autonomous cubic or PWL variants use the analytic
// Jacobian; the GST variant is rejected (its Jacobian is not autonomous).
inline LyapunovResult lyapunov_spectrum(const StateVector& x0, const CircuitParams& p,
                                        const IntegratorConfig& cfg,
                                        double renorm_interval) {
    p.validate();
    if (p.drive)
        throw std::invalid_argument("lyapunov_spectrum requires the autonomous circuit");
    if (std::holds_alternative<GstNonlinearity>(p.nonlinearity))
        throw std::invalid_argument(
            "lyapunov_spectrum supports the cubic and PWL variants only");
    auto f = [&p](double t, const StateVector& x) { return rhs(t, x, p); };
    auto j = [&p](const StateVector& x) { return jacobian(x, p).m; };
    return lyapunov_spectrum_generic(x0, f, j, cfg, renorm_interval);
}

}  // namespace chua
