// Command-line front end: simulate | analyze | bits | smallsignal | sweep.
// One JSON config document drives every command; --set overrides single
// keys by dotted path. All series data goes to CSV, reports to JSON,
// diagnostics to stderr. Exit codes: 0 success, 1 test failure,
// 2 usage/config error, 3 numerical fault.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "chua/pipeline.hpp"

namespace fs = std::filesystem;
using chua::Json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string profile;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--profile", args.profile,
                    "named profile: paper-default | fallback-chaotic | linear-test | "
                    "pwl-original | gst-emulator");
    cmd->add_option("--set", args.overrides, "override a config key, e.g. circuit.r1=1800");
}

Json build_doc(const CommonArgs& args) {
    Json doc = Json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in)
            throw std::invalid_argument("cannot open config file '" + args.config_path + "'");
        doc = Json::parse(in);
    }
    if (!args.profile.empty()) doc["profile"] = args.profile;
    for (const auto& ov : args.overrides) chua::apply_override(doc, ov);
    return doc;
}

void write_json(const fs::path& path, const Json& j) {
    chua::io::write_atomic(path, j.dump(2) + "\n");
}

int cmd_simulate(const CommonArgs& args) {
    const chua::RunConfig cfg = chua::config_from_json(build_doc(args));
    chua::Trajectory traj =
        chua::integrate(cfg.initial_state, cfg.circuit, cfg.integrator);
    traj.params_digest = chua::params_digest(cfg);

    const fs::path out(args.out_dir);
    chua::io::write_atomic(out / "trajectory.csv", chua::io::trajectory_csv(traj));
    chua::io::write_atomic(out / "portrait_v1_v2.csv",
                           chua::io::portrait_csv(traj, 2, 1, "v2", "v1"));
    chua::io::write_atomic(out / "portrait_iL_v2.csv",
                           chua::io::portrait_csv(traj, 2, 3, "v2", "iL"));
    write_json(out / "summary.json", chua::trajectory_summary_json(traj, cfg));
    std::cerr << "simulate: " << traj.samples.size() << " samples -> " << out << "\n";
    return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& trajectory_path) {
    const chua::RunConfig cfg = chua::config_from_json(build_doc(args));
    chua::Trajectory traj;
    if (!trajectory_path.empty()) {
        traj = chua::io::trajectory_from_csv(trajectory_path);
    } else {
        traj = chua::integrate(cfg.initial_state, cfg.circuit, cfg.integrator);
        traj.params_digest = chua::params_digest(cfg);
    }

    const chua::AnalyzeResult a = chua::analyze_trajectory(traj, cfg);
    const fs::path out(args.out_dir);
    chua::io::write_atomic(out / "spectrum.csv", chua::io::spectrum_csv(a.spectrum));
    if (a.lyapunov)
        chua::io::write_atomic(out / "lyapunov.csv", chua::io::lyapunov_csv(*a.lyapunov));
    write_json(out / "metrics.json", chua::analyze_metrics_json(a, cfg));
    std::cerr << "analyze: flatness=" << a.flatness;
    if (a.lyapunov) std::cerr << " lambda1=" << a.lyapunov->exponents[0] << "/s";
    std::cerr << " -> " << out << "\n";
    return 0;
}

int cmd_bits(const CommonArgs& args) {
    const chua::RunConfig cfg = chua::config_from_json(build_doc(args));
    const chua::BitsPipelineResult res = chua::run_bits_pipeline(cfg);

    const fs::path out(args.out_dir);
    chua::io::write_atomic(out / "bits.bin", chua::pack_bits(res.final));
    Json sidecar;
    sidecar["n_bits"] = res.final.size();
    sidecar["packing"] = "msb-first, final byte zero-padded";
    sidecar["source_digest"] = res.final.source_digest;
    sidecar["extraction"] = {{"sample_period_s", res.final.meta.sample_period},
                             {"policy", res.final.meta.policy},
                             {"xor_fold", res.final.meta.xor_fold},
                             {"debiased", res.final.meta.debiased},
                             {"raw_bits", res.raw.size()},
                             {"simulated_seconds", res.simulated_seconds}};
    write_json(out / "bits.json", sidecar);

    Json rep;
    rep["n_bits"] = res.report.n_bits;
    rep["alpha"] = res.report.alpha;
    rep["all_pass"] = res.report.all_pass();
    for (const auto& t : res.report.tests) {
        Json tj = {{"name", t.name}, {"statistic", t.statistic}, {"p_value", t.p_value},
                   {"pass", t.pass}};
        if (!t.note.empty()) tj["note"] = t.note;
        rep["tests"].push_back(tj);
    }
    write_json(out / "report.json", rep);

    for (const auto& t : res.report.tests)
        std::cerr << "bits: " << t.name << " p=" << t.p_value
                  << (t.pass ? " pass" : " FAIL") << "\n";
    return res.report.all_pass() ? 0 : 1;
}

int cmd_smallsignal(const CommonArgs& args) {
    const chua::RunConfig cfg = chua::config_from_json(build_doc(args));
    const fs::path out(args.out_dir);
    chua::io::write_atomic(out / "impedance_sweep.csv", chua::impedance_sweep_csv(cfg));
    write_json(out / "smallsignal.json", chua::smallsignal_report_json(cfg));
    std::cerr << "smallsignal -> " << out << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<double>& values) {
    if (values.size() < 2)
        throw std::invalid_argument("sweep needs at least 2 values");
    const Json base = build_doc(args);
    const fs::path out(args.out_dir);

    std::vector<chua::Trajectory> trajs;
    std::ostringstream table;
    table << param << ",v1_min,v1_max,v1_std,spectral_flatness,lobe_transitions\n";
    for (double v : values) {
        Json doc = base;
        chua::apply_override(doc, param + "=" + chua::io::fmt(v));
        const chua::RunConfig cfg = chua::config_from_json(doc);
        chua::Trajectory traj =
            chua::integrate(cfg.initial_state, cfg.circuit, cfg.integrator);
        traj.params_digest = chua::params_digest(cfg);

        std::vector<double> v1;
        v1.reserve(traj.samples.size());
        double lo = traj.samples[0].v1, hi = lo, sum = 0.0;
        for (const auto& s : traj.samples) {
            v1.push_back(s.v1);
            lo = std::min(lo, s.v1);
            hi = std::max(hi, s.v1);
            sum += s.v1;
        }
        const double mean = sum / static_cast<double>(v1.size());
        double var = 0.0;
        for (double x : v1) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v1.size());

        const auto spec = chua::power_spectrum(v1, traj.dt);
        const double hyst = cfg.analysis.lobe_hysteresis.value_or(
            chua::default_lobe_hysteresis(traj));
        long transitions = 0;
        if (hyst > 0.0) transitions = chua::lobe_transitions(traj, hyst).transitions;

        table << chua::io::fmt(v) << ',' << chua::io::fmt(lo) << ',' << chua::io::fmt(hi)
              << ',' << chua::io::fmt(std::sqrt(var)) << ','
              << chua::io::fmt(chua::spectral_flatness(spec)) << ',' << transitions
              << '\n';
        trajs.push_back(std::move(traj));
    }
    chua::io::write_atomic(out / "sweep_metrics.csv", table.str());

    // Fig.-18-style difference of v1 between consecutive parameter values.
    for (size_t k = 0; k + 1 < trajs.size(); ++k) {
        const auto& a = trajs[k];
        const auto& b = trajs[k + 1];
        const size_t n = std::min(a.samples.size(), b.samples.size());
        std::ostringstream diff;
        diff << "t,dv1\n";
        for (size_t i = 0; i < n; ++i)
            diff << chua::io::fmt(a.t0 + static_cast<double>(i) * a.dt) << ','
                 << chua::io::fmt(b.samples[i].v1 - a.samples[i].v1) << '\n';
        chua::io::write_atomic(out / ("diff_v1_" + std::to_string(k) + ".csv"),
                               diff.str());
    }
    std::cerr << "sweep: " << values.size() << " values of " << param << " -> " << out
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memristive double-scroll oscillator laboratory"};
    app.require_subcommand(1);

    CommonArgs sim_args, an_args, bits_args, ss_args, sweep_args;
    std::string trajectory_path, sweep_param;
    std::vector<double> sweep_values;

    add_common(app.add_subcommand("simulate", "integrate the circuit and export the trajectory"),
               sim_args);
    auto* an = app.add_subcommand("analyze", "spectrum, Lyapunov exponents, lobe and power metrics");
    add_common(an, an_args);
    an->add_option("--trajectory", trajectory_path, "analyze an existing trajectory CSV");
    add_common(app.add_subcommand("bits", "extract and test a random bitstream"), bits_args);
    add_common(app.add_subcommand("smallsignal", "closed-form small-signal results vs MNA"),
               ss_args);
    auto* sw = app.add_subcommand("sweep", "run the pipeline across parameter values");
    add_common(sw, sweep_args);
    sw->add_option("--param", sweep_param, "dotted config key to sweep")->required();
    sw->add_option("--values", sweep_values, "parameter values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_args);
        if (app.got_subcommand("analyze")) return cmd_analyze(an_args, trajectory_path);
        if (app.got_subcommand("bits")) return cmd_bits(bits_args);
        if (app.got_subcommand("smallsignal")) return cmd_smallsignal(ss_args);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args, sweep_param, sweep_values);
    } catch (const chua::IntegrationFault& e) {
        std::cerr << "numerical fault: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
