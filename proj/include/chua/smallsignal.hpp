#pragma once

#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chua/circuit.hpp"

// Closed-form small-signal results for the negative resistor and the
// emulator impedance, plus a minimal modified-nodal-analysis solver used
// as an independent oracle for all of them.

namespace chua {

using Complex = std::complex<double>;

// Z(w) = R_s + R_g/(1+jwR_gC_g) + R_gb/(1+jwR_gbC_gb)
inline Complex emulator_impedance(double omega, const EmulatorParams& e) {
    if (!(omega >= 0.0))
        throw std::invalid_argument("emulator_impedance: omega must be >= 0");
    const Complex j(0.0, 1.0);
    return e.r_s + e.r_g / (1.0 + j * omega * e.r_g * e.c_g) +
           e.r_gb / (1.0 + j * omega * e.r_gb * e.c_gb);
}

struct NegResistorParams {
    double r_plus;
    double r_minus;
    double r_load;
    double gain_a = 1e5;                                      // open-loop gain
    double r_out_internal = 75.0;                             // ohm
    double r_in_internal = std::numeric_limits<double>::infinity();

    void validate() const {
        if (r_plus <= 0.0 || r_minus <= 0.0 || r_load <= 0.0)
            throw std::invalid_argument("NegResistorParams resistances must be > 0");
        if (r_out_internal < 0.0 || gain_a <= 0.0)
            throw std::invalid_argument("NegResistorParams: bad op-amp parameters");
    }
};

// Ideal-op-amp input current: i = -V_s * R_minus / (R_plus * R_load).
inline double nr_input_current(double v_s, const NegResistorParams& p) {
    p.validate();
    return -v_s * p.r_minus / (p.r_plus * p.r_load);
}

// R_in = -(R_plus * R_load) / R_minus; always negative.
inline double nr_input_resistance(const NegResistorParams& p) {
    p.validate();
    return -(p.r_plus * p.r_load) / p.r_minus;
}

// Ideal-op-amp open-circuit output: V_out = V_s * (1 + R_minus / R_load).
inline double nr_open_loop_vout(double v_s, const NegResistorParams& p) {
    p.validate();
    return v_s * (1.0 + p.r_minus / p.r_load);
}

// R_out = V_oc / i_sc with finite gain A and internal r_out. Both sides
// are proportional to V_s, so the source amplitude cancels out of the
// ratio and is not a parameter here.
inline double nr_output_resistance_full(const NegResistorParams& p) {
    p.validate();
    const double a = p.gain_a;
    const double denom = p.r_load * (1.0 - a) + p.r_minus + p.r_out_internal;
    if (denom == 0.0)
        throw std::domain_error("nr_output_resistance_full: degenerate gain");
    const double v_oc = a * (p.r_load + p.r_minus) / denom;            // per unit V_s
    const double i_sc = a / p.r_out_internal + 1.0 / p.r_plus;         // per unit V_s
    if (i_sc == 0.0)
        throw std::domain_error("nr_output_resistance_full: zero short-circuit current");
    return v_oc / i_sc;
}

// Large-gain approximation: -(R_load+R_minus) * r_out * R_plus / (A * R_plus * R_load).
inline double nr_output_resistance_approx(const NegResistorParams& p) {
    p.validate();
    return -(p.r_load + p.r_minus) * p.r_out_internal * p.r_plus /
           (p.gain_a * p.r_plus * p.r_load);
}

// ---------------------------------------------------------------------------
// MNA oracle

// Linear network over named nodes; "0" is ground. Voltage sources and
// controlled sources add a branch-current unknown each.
class LinearNetwork {
public:
    void add_resistor(const std::string& a, const std::string& b, double ohms) {
        elements_.push_back({Kind::resistor, "", a, b, "", "", ohms});
    }
    void add_capacitor(const std::string& a, const std::string& b, double farads) {
        elements_.push_back({Kind::capacitor, "", a, b, "", "", farads});
    }
    void add_vsource(const std::string& name, const std::string& pos,
                     const std::string& neg, double volts) {
        elements_.push_back({Kind::vsource, name, pos, neg, "", "", volts});
    }
    // V(pos) - V(neg) = gain * (V(cp) - V(cn))
    void add_vcvs(const std::string& name, const std::string& pos, const std::string& neg,
                  const std::string& cp, const std::string& cn, double gain) {
        elements_.push_back({Kind::vcvs, name, pos, neg, cp, cn, gain});
    }

    struct Solution {
        std::map<std::string, Complex> node_voltage;   // ground omitted
        // Branch current of each named source, oriented from the positive
        // terminal through the source; current delivered to the external
        // network is its negative.
        std::map<std::string, Complex> source_current;
        Complex voltage(const std::string& node) const {
            if (node == "0") return {};
            auto it = node_voltage.find(node);
            if (it == node_voltage.end())
                throw std::invalid_argument("unknown node '" + node + "'");
            return it->second;
        }
    };

    Solution solve(double omega) const;

private:
    enum class Kind { resistor, capacitor, vsource, vcvs };
    struct Element {
        Kind kind;
        std::string name;
        std::string a, b;    // terminals (pos, neg for sources)
        std::string cp, cn;  // control terminals for vcvs
        double value;
    };
    std::vector<Element> elements_;
};

namespace detail {

// Gaussian elimination with partial pivoting on a dense complex system.
inline std::vector<Complex> solve_dense(std::vector<std::vector<Complex>> a,
                                        std::vector<Complex> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-30)
            throw std::runtime_error("mna_solve: singular matrix (ill-posed network)");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = col + 1; r < n; ++r) {
            const Complex f = a[r][col] / a[col][col];
            if (f == Complex{}) continue;
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Complex> x(n);
    for (size_t i = n; i-- > 0;) {
        Complex acc = b[i];
        for (size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

}  // namespace detail

inline LinearNetwork::Solution LinearNetwork::solve(double omega) const {
    if (!(omega >= 0.0)) throw std::invalid_argument("mna_solve: omega must be >= 0");

    std::map<std::string, size_t> node_index;
    size_t n_nodes = 0;
    auto index_of = [&](const std::string& node) -> long {
        if (node == "0") return -1;
        auto [it, inserted] = node_index.try_emplace(node, n_nodes);
        if (inserted) ++n_nodes;
        return static_cast<long>(it->second);
    };
    size_t n_branches = 0;
    for (const auto& e : elements_) {
        index_of(e.a);
        index_of(e.b);
        if (e.kind == Kind::vcvs) {
            index_of(e.cp);
            index_of(e.cn);
        }
        if (e.kind == Kind::vsource || e.kind == Kind::vcvs) ++n_branches;
    }
    const size_t dim = n_nodes + n_branches;
    if (dim == 0) throw std::runtime_error("mna_solve: empty network");

    std::vector<std::vector<Complex>> a(dim, std::vector<Complex>(dim));
    std::vector<Complex> rhs(dim);

    auto stamp = [&](long i, long j, Complex v) {
        if (i >= 0 && j >= 0) a[static_cast<size_t>(i)][static_cast<size_t>(j)] += v;
    };

    size_t branch = 0;
    std::vector<std::pair<std::string, size_t>> branch_names;
    for (const auto& e : elements_) {
        const long ia = index_of(e.a), ib = index_of(e.b);
        switch (e.kind) {
            case Kind::resistor:
            case Kind::capacitor: {
                const Complex y = e.kind == Kind::resistor
                                      ? Complex(1.0 / e.value, 0.0)
                                      : Complex(0.0, omega * e.value);
                stamp(ia, ia, y);
                stamp(ib, ib, y);
                stamp(ia, ib, -y);
                stamp(ib, ia, -y);
                break;
            }
            case Kind::vsource:
            case Kind::vcvs: {
                const size_t k = n_nodes + branch;
                // branch current flows from pos terminal through the source
                if (ia >= 0) {
                    a[static_cast<size_t>(ia)][k] += 1.0;
                    a[k][static_cast<size_t>(ia)] += 1.0;
                }
                if (ib >= 0) {
                    a[static_cast<size_t>(ib)][k] -= 1.0;
                    a[k][static_cast<size_t>(ib)] -= 1.0;
                }
                if (e.kind == Kind::vsource) {
                    rhs[k] = e.value;
                } else {
                    const long icp = index_of(e.cp), icn = index_of(e.cn);
                    if (icp >= 0) a[k][static_cast<size_t>(icp)] -= e.value;
                    if (icn >= 0) a[k][static_cast<size_t>(icn)] += e.value;
                }
                branch_names.emplace_back(e.name, k);
                ++branch;
                break;
            }
        }
    }

    const auto x = detail::solve_dense(std::move(a), std::move(rhs));

    Solution sol;
    for (const auto& [name, idx] : node_index) sol.node_voltage[name] = x[idx];
    for (const auto& [name, k] : branch_names)
        if (!name.empty()) sol.source_current[name] = x[k];
    return sol;
}

inline LinearNetwork::Solution mna_solve(const LinearNetwork& net, double omega) {
    return net.solve(omega);
}

// The negative-resistor network of the small-signal analysis, with the
// op-amp as a VCVS with gain A and internal output resistance. Nodes:
// "in" (source), "out" (op-amp output after r_out), "inv" (inverting input).
inline LinearNetwork negative_resistor_network(double v_s, const NegResistorParams& p,
                                               bool short_output = false) {
    LinearNetwork net;
    net.add_vsource("Vs", "in", "0", v_s);
    net.add_resistor("in", "out", p.r_plus);
    net.add_resistor("out", "inv", p.r_minus);
    net.add_resistor("inv", "0", p.r_load);
    // Control polarity chosen so the finite-gain network reproduces the
    // closed forms above (input current, V_out, and the sign of R_out) in
    // the large-gain limit.
    net.add_vcvs("Eop", "op", "0", "inv", "in", p.gain_a);
    if (p.r_out_internal > 0.0)
        net.add_resistor("op", "out", p.r_out_internal);
    else
        net.add_vcvs("Eshort", "op", "out", "0", "0", 0.0);  // 0 V tie
    if (std::isfinite(p.r_in_internal))
        net.add_resistor("in", "inv", p.r_in_internal);
    if (short_output) net.add_vsource("Vshort", "out", "0", 0.0);
    return net;
}

// The emulator one-port driven by a 1 V source; impedance is V/I.
inline Complex emulator_impedance_mna(double omega, const EmulatorParams& e) {
    LinearNetwork net;
    net.add_vsource("Vs", "p", "0", 1.0);
    net.add_resistor("p", "a", e.r_s);
    net.add_resistor("a", "b", e.r_g);
    net.add_capacitor("a", "b", e.c_g);
    net.add_resistor("b", "0", e.r_gb);
    net.add_capacitor("b", "0", e.c_gb);
    const auto sol = net.solve(omega);
    return -1.0 / sol.source_current.at("Vs");
}

}  // namespace chua
