// Acceptance gate: one test case per release criterion, each emitting a
// single [PASS]/[FAIL] line on stdout.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "chua/pipeline.hpp"

using namespace chua;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string description;
    bool passed = false;
    ~Criterion() {
        std::printf("[%s] criterion %2d: %s\n", passed ? "PASS" : "FAIL", id,
                    description.c_str());
        std::fflush(stdout);
    }
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// The chaotic Lyapunov run shared by criteria 1 and 2.
const LyapunovResult& chaotic_lyapunov(double dt) {
    static std::map<double, LyapunovResult> cache;
    auto it = cache.find(dt);
    if (it == cache.end()) {
        const RunConfig cfg = profiles::fallback_chaotic();
        IntegratorConfig icfg{.dt = dt, .t_end = 0.5, .transient_skip = 0.05};
        it = cache.emplace(dt, lyapunov_spectrum(cfg.initial_state, cfg.circuit, icfg, 1e-4))
                 .first;
    }
    return it->second;
}

const Trajectory& chaotic_trajectory() {
    static const Trajectory traj = [] {
        const RunConfig cfg = profiles::fallback_chaotic();
        Trajectory t = integrate(cfg.initial_state, cfg.circuit, cfg.integrator);
        t.params_digest = params_digest(cfg);
        return t;
    }();
    return traj;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CHUA_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: chaos property") {
    Criterion c{1, "largest Lyapunov exponent > 0, stable within 20% under dt halving, < 60 s"};
    Timer timer;
    const double l1 = chaotic_lyapunov(1e-6).exponents[0];
    const double l1_half = chaotic_lyapunov(5e-7).exponents[0];
    INFO("lambda1 = " << l1 << " /s, at dt/2 = " << l1_half << " /s, " << timer.seconds()
                      << " s");
    REQUIRE(l1 > 0.0);
    REQUIRE(l1_half > 0.0);
    REQUIRE(std::abs(l1_half - l1) <= 0.2 * std::abs(l1));
    REQUIRE(timer.seconds() < 60.0);
    c.passed = true;
}

TEST_CASE("criterion 2: exponent-sum identity") {
    Criterion c{2, "sum of exponents equals mean Jacobian trace within 5%"};
    const LyapunovResult& r = chaotic_lyapunov(1e-6);
    const double sum = r.exponents[0] + r.exponents[1] + r.exponents[2] + r.exponents[3];
    INFO("sum = " << sum << ", <trace J> = " << r.mean_jacobian_trace);
    REQUIRE(std::abs(sum - r.mean_jacobian_trace) <= 0.05 * std::abs(r.mean_jacobian_trace));
    c.passed = true;
}

TEST_CASE("criterion 3: Jacobian correctness") {
    Criterion c{3, "analytic Jacobian matches finite differences < 1e-5 at 20 random states"};
    Timer timer;
    const CircuitParams p = profiles::fallback_chaotic().circuit;
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const StateVector x{1e-4 * dist(rng), dist(rng), dist(rng), 1e-3 * dist(rng)};
        const Jacobian ja = jacobian(x, p);
        const double h = 1e-6 * std::max(x.max_abs(), 1.0);
        for (int col = 0; col < 4; ++col) {
            StateVector xp = x, xm = x;
            xp[col] += h;
            xm[col] -= h;
            const StateVector fp = rhs(0.0, xp, p);
            const StateVector fm = rhs(0.0, xm, p);
            for (int row = 0; row < 4; ++row) {
                const double fd = (fp[row] - fm[row]) / (2.0 * h);
                const double denom = std::max(std::abs(ja.m[row][col]), 1.0);
                worst = std::max(worst, std::abs(fd - ja.m[row][col]) / denom);
            }
        }
    }
    INFO("max relative error " << worst);
    REQUIRE(worst < 1e-5);
    REQUIRE(timer.seconds() < 1.0);
    c.passed = true;
}

namespace {

double harmonic_error(double dt) {
    // sigma = 0, theta = 0, r1 huge: (v2, iL) is a pure harmonic
    // oscillator with omega = 1/sqrt(L C2). The error is the max
    // deviation of v2 from cos(omega t) over one period, which is
    // dominated by the 4th-order phase error.
    const CircuitParams p{.r1 = 1e18, .c1 = 10e-9, .c2 = 100e-9, .l = 18e-3,
                          .nonlinearity = CubicNonlinearity{.theta = 0.0, .sigma = 0.0}};
    const double omega = 1.0 / std::sqrt(p.l * p.c2);
    const double period = 2.0 * std::numbers::pi / omega;
    const long n = std::lround(period / dt);
    const double dte = period / static_cast<double>(n);
    StateVector x{0.0, 0.0, 1.0, 0.0};
    double err = 0.0;
    for (long i = 0; i < n; ++i) {
        x = step_rk4(static_cast<double>(i) * dte, x, dte, p);
        err = std::max(err,
                       std::abs(x.v2 - std::cos(omega * static_cast<double>(i + 1) * dte)));
    }
    return err;
}

}  // namespace

TEST_CASE("criterion 4: integrator order") {
    Criterion c{4, "harmonic-oscillator global error ratio in [12, 20] when dt halves"};
    Timer timer;
    const double period = 2.0 * std::numbers::pi * std::sqrt(18e-3 * 100e-9);
    const double ratio = harmonic_error(period / 100.0) / harmonic_error(period / 200.0);
    INFO("ratio " << ratio);
    REQUIRE(ratio >= 12.0);
    REQUIRE(ratio <= 20.0);
    REQUIRE(timer.seconds() < 5.0);
    c.passed = true;
}

TEST_CASE("criterion 5: spectral evidence") {
    Criterion c{5, "Parseval within 1e-9; chaotic flatness >= 10x a pure 1 kHz tone"};
    const Trajectory& traj = chaotic_trajectory();
    std::vector<double> v1;
    for (const auto& s : traj.samples) v1.push_back(s.v1);

    const Spectrum chaotic = power_spectrum(v1, traj.dt);
    double total = 0.0, direct = 0.0;
    for (const auto& [f, p] : chaotic.bins) total += p;
    const size_t n = detail::largest_pow2_not_above(v1.size());
    for (size_t i = 0; i < n; ++i) direct += v1[i] * v1[i];
    REQUIRE(std::abs(total - direct) <= 1e-9 * direct);

    // pure tone at the analysis bin nearest 1 kHz, so it occupies a single
    // bin of the length-n window instead of leaking across the spectrum
    const double f_tone =
        std::round(1e3 * static_cast<double>(n) * traj.dt) / (static_cast<double>(n) * traj.dt);
    std::vector<double> tone(v1.size());
    for (size_t i = 0; i < tone.size(); ++i)
        tone[i] = std::sin(2.0 * std::numbers::pi * f_tone * static_cast<double>(i) * traj.dt);
    const Spectrum tone_spec = power_spectrum(tone, traj.dt);
    double tone_total = 0.0, tone_direct = 0.0;
    for (const auto& [f, p] : tone_spec.bins) tone_total += p;
    for (size_t i = 0; i < n; ++i) tone_direct += tone[i] * tone[i];
    REQUIRE(std::abs(tone_total - tone_direct) <= 1e-9 * tone_direct);

    const double chaotic_flatness = spectral_flatness(chaotic);
    const double tone_flatness = spectral_flatness(tone_spec);
    INFO("flatness chaotic " << chaotic_flatness << " vs tone " << tone_flatness);
    REQUIRE(chaotic_flatness >= 10.0 * tone_flatness);
    c.passed = true;
}

TEST_CASE("criterion 6: double-scroll property") {
    Criterion c{6, "both lobes >= 10 dwell episodes, >= 20 transitions over 0.15 s"};
    const Trajectory& traj = chaotic_trajectory();  // 0.15 s post-transient
    const LobeStats s = lobe_transitions(traj, default_lobe_hysteresis(traj));
    INFO("lobes A " << s.lobe_a_count << " B " << s.lobe_b_count << " transitions "
                    << s.transitions);
    REQUIRE(s.lobe_a_count >= 10);
    REQUIRE(s.lobe_b_count >= 10);
    REQUIRE(s.transitions >= 20);
    c.passed = true;
}

TEST_CASE("criterion 7: small-signal exactness") {
    Criterion c{7, "DC impedance 26280; R_in -2717.39 (0.01%); MNA 1e-6 at gain 1e9; "
                   "R_out gap < 1e-4 at A=1e6"};
    const EmulatorParams em{.r_s = 100.0, .r_g = 25.9e3, .c_g = 5e-12, .r_gb = 280.0,
                            .c_gb = 30.6e-12};
    REQUIRE(emulator_impedance(0.0, em) == Complex{26280.0, 0.0});

    NegResistorParams nr{.r_plus = 250.0, .r_minus = 230.0, .r_load = 2500.0};
    REQUIRE(std::abs(nr_input_resistance(nr) - (-2717.39)) <= 1e-4 * 2717.39);

    NegResistorParams hi = nr;
    hi.gain_a = 1e9;
    const auto sol = negative_resistor_network(1.0, hi).solve(0.0);
    const double i_in = -sol.source_current.at("Vs").real();
    REQUIRE(std::abs(1.0 / i_in - nr_input_resistance(nr)) <=
            1e-6 * std::abs(nr_input_resistance(nr)));
    REQUIRE(std::abs(i_in - nr_input_current(1.0, nr)) <=
            1e-6 * std::abs(nr_input_current(1.0, nr)));
    REQUIRE(std::abs(sol.voltage("out").real() - nr_open_loop_vout(1.0, nr)) <=
            1e-6 * nr_open_loop_vout(1.0, nr));
    const double w = 2.0 * std::numbers::pi * 1e6;
    REQUIRE(std::abs(emulator_impedance(w, em) - emulator_impedance_mna(w, em)) <=
            1e-6 * std::abs(emulator_impedance(w, em)));
    const auto oc = negative_resistor_network(1.0, hi).solve(0.0);
    const auto sc = negative_resistor_network(1.0, hi, true).solve(0.0);
    const double r_out_mna =
        oc.voltage("out").real() / sc.source_current.at("Vshort").real();
    REQUIRE(std::abs(r_out_mna - nr_output_resistance_full(hi)) <=
            1e-6 * std::abs(nr_output_resistance_full(hi)));

    NegResistorParams a6 = nr;
    a6.gain_a = 1e6;
    const double full = nr_output_resistance_full(a6);
    const double approx = nr_output_resistance_approx(a6);
    REQUIRE(std::abs(full - approx) <= 1e-4 * std::abs(full));
    c.passed = true;
}

TEST_CASE("criterion 8: theta/sigma round trip") {
    Criterion c{8, "derive_theta(2500) = -4.0e-4 exactly; derive_sigma hits 1.35e-6 "
                   "within 1e-9"};
    REQUIRE(derive_theta(2500.0) == -4.0e-4);
    const double sigma = derive_sigma(25.9e3, 280.0, 2500.0, kDefaultRc);
    REQUIRE(std::abs(sigma - 1.35e-6) <= 1e-9 * 1.35e-6);
    c.passed = true;
}

TEST_CASE("criterion 9: TRNG suite") {
    Criterion c{9, "1e5 debiased bits pass all tests at alpha 0.01 in < 120 s; "
                   "biased source passes monobit only after debiasing"};
    Timer timer;
    const RunConfig cfg = profiles::fallback_chaotic();
    const BitsPipelineResult res = run_bits_pipeline(cfg);
    REQUIRE(res.final.size() == 100000);
    for (const auto& t : res.report.tests) {
        INFO(t.name << " p = " << t.p_value);
        REQUIRE(t.pass);
    }
    REQUIRE(timer.seconds() < 120.0);

    std::mt19937 rng(314159);
    std::bernoulli_distribution biased(0.7);
    BitStream raw;
    raw.bits.reserve(1000000);
    for (int i = 0; i < 1000000; ++i) raw.bits.push_back(biased(rng));
    REQUIRE(monobit_test(raw).p_value < 0.01);
    REQUIRE(monobit_test(von_neumann_debias(raw)).p_value >= 0.01);
    c.passed = true;
}

TEST_CASE("criterion 10: power analysis") {
    Criterion c{10, "1 V DC / 1 kohm -> 1.000 mW; 1 V sinusoid / 1 kohm -> 0.500 mW "
                    "(1e-6); paper mW figures reported, not asserted"};
    CircuitParams p{.r1 = 1000.0, .c1 = 10e-9, .c2 = 100e-9, .l = 18e-3,
                    .nonlinearity = CubicNonlinearity{.theta = 0.0, .sigma = 0.0}};
    Trajectory dc;
    dc.dt = 1e-4;
    for (int i = 0; i < 100; ++i) dc.samples.push_back({0.0, 1.0, 0.0, 0.0});
    REQUIRE(std::abs(average_power(dc, p, "R1") - 1e-3) <= 1e-6 * 1e-3);

    Trajectory ac;
    ac.dt = 1.0 / (50.0 * 1000.0);
    for (int i = 0; i <= 10000; ++i)
        ac.samples.push_back(
            {0.0, std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(i) * ac.dt),
             0.0, 0.0});
    REQUIRE(std::abs(average_power(ac, p, "R1") - 0.5e-3) <= 1e-6 * 0.5e-3);

    // the paper's comparison figures are reported alongside, never asserted
    const RunConfig cfg = profiles::fallback_chaotic();
    AnalyzeResult a;
    a.power_mw["memristor"] =
        1e3 * average_power(chaotic_trajectory(), cfg.circuit, "memristor");
    const Json metrics = analyze_metrics_json(a, cfg);
    REQUIRE(metrics["paper_power_figures_mw"]["original_circuit"] == 5.02);
    REQUIRE(metrics["paper_power_figures_mw"]["gst_emulator_circuit"] == 4.47);
    REQUIRE(metrics["paper_power_figures_mw"]["difference"] == 0.55);
    const double mem_mw = a.power_mw["memristor"].get<double>();
    REQUIRE(std::isfinite(mem_mw));
    // the memristive branch is the active element (theta < 0): on average it
    // supplies the power that the series resistance dissipates
    REQUIRE(mem_mw < 0.0);
    REQUIRE(average_power(chaotic_trajectory(), cfg.circuit, "R1") > 0.0);
    c.passed = true;
}

TEST_CASE("criterion 11: area figures") {
    Criterion c{11, "per-part footprints exact (0.18 / 19.92 / 1e-6 mm^2); quoted totals "
                    "reported with the discrepancy flagged"};
    REQUIRE(footprint_area(std::vector<BomEntry>{{"resistor", 0.6, 0.3, 1}}) == 0.18);
    REQUIRE(std::abs(footprint_area(std::vector<BomEntry>{{"body", 3.4, 1.75, 1},
                                                          {"wires", 25.4, 0.55, 1}}) -
                     19.92) < 1e-12);
    REQUIRE(footprint_area(bom::gst_device()) == 1e-6);
    const Json rep = footprint_report();
    REQUIRE(rep["original_quoted_mm2"] == 162.0);
    REQUIRE(rep["gst_emulator_quoted_mm2"] == 1.155);
    REQUIRE(rep["quoted_totals_match_part_sums"] == false);
    REQUIRE(rep["original_nonlinear_resistor_mm2"].get<double>() != 162.0);
    c.passed = true;
}

TEST_CASE("criterion 12: determinism") {
    Criterion c{12, "every command re-run with identical config is byte-identical"};
    const fs::path base = fs::temp_directory_path() / "chua_acceptance_det";
    fs::remove_all(base);
    const std::string small =
        " --set integrator.t_end=0.02 --set integrator.transient_skip=0.005";
    struct Cmd {
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Cmd> cmds = {
        {"simulate --profile fallback-chaotic" + small,
         {"trajectory.csv", "portrait_v1_v2.csv", "portrait_iL_v2.csv", "summary.json"}},
        {"analyze --profile fallback-chaotic" + small + " --set analysis.lyapunov_t_end=0.05",
         {"spectrum.csv", "lyapunov.csv", "metrics.json"}},
        {"smallsignal", {"impedance_sweep.csv", "smallsignal.json"}},
        {"bits --profile fallback-chaotic --set trng.n_bits=1000"
         " --set integrator.transient_skip=0.005",
         {"bits.bin", "bits.json", "report.json"}},
        {"sweep --profile fallback-chaotic --param circuit.r1 --values 1800 1850" + small,
         {"sweep_metrics.csv", "diff_v1_0.csv"}},
    };
    for (size_t k = 0; k < cmds.size(); ++k) {
        const fs::path a = base / ("a" + std::to_string(k));
        const fs::path b = base / ("b" + std::to_string(k));
        fs::create_directories(a);
        fs::create_directories(b);
        const int ra = run_cli(cmds[k].args + " --out " + a.string());
        const int rb = run_cli(cmds[k].args + " --out " + b.string());
        REQUIRE(ra == rb);
        REQUIRE((ra == 0 || ra == 1));
        for (const auto& f : cmds[k].files) {
            INFO(cmds[k].args << " -> " << f);
            REQUIRE(slurp(a / f) == slurp(b / f));
        }
    }
    fs::remove_all(base);
    c.passed = true;
}
