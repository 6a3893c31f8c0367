#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chua/analysis.hpp"
#include "chua/dynamics.hpp"
#include "chua/lyapunov.hpp"

// File export/import. Doubles are printed with 17 significant digits so
// values round-trip exactly and re-emission is byte-identical.

namespace chua::io {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Write via a temp file in the same directory, then rename into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

inline void write_atomic(const std::filesystem::path& path,
                         const std::vector<std::uint8_t>& bytes) {
    write_atomic(path, std::string(bytes.begin(), bytes.end()));
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,phi,v1,v2,iL\n";
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& x = traj.samples[i];
        const double t = i < traj.times.size() ? traj.times[i]
                                               : traj.t0 + static_cast<double>(i) * traj.dt;
        out << fmt(t) << ',' << fmt(x.phi) << ','
            << fmt(x.v1) << ',' << fmt(x.v2) << ',' << fmt(x.i_l) << '\n';
    }
    return out.str();
}

inline Trajectory trajectory_from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,phi,v1,v2,iL")
        throw std::runtime_error("bad trajectory header in '" + path.string() + "'");
    Trajectory traj;
    double t_prev = 0.0, t_first = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StateVector x;
        double t;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &x.phi, &x.v1, &x.v2,
                        &x.i_l) != 5)
            throw std::runtime_error("bad trajectory row in '" + path.string() + "'");
        if (traj.samples.empty())
            t_first = t;
        else if (traj.samples.size() == 1)
            traj.dt = t - t_prev;
        t_prev = t;
        traj.times.push_back(t);
        traj.samples.push_back(x);
    }
    traj.t0 = t_first;
    if (traj.samples.size() < 2)
        throw std::runtime_error("trajectory '" + path.string() + "' too short");
    return traj;
}

inline std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "freq_hz,power\n";
    for (const auto& [f, p] : s.bins) out << fmt(f) << ',' << fmt(p) << '\n';
    return out.str();
}

inline std::string lyapunov_csv(const LyapunovResult& r) {
    std::ostringstream out;
    out << "t,l1,l2,l3,l4\n";
    for (const auto& row : r.history)
        out << fmt(row[0]) << ',' << fmt(row[1]) << ',' << fmt(row[2]) << ','
            << fmt(row[3]) << ',' << fmt(row[4]) << '\n';
    return out.str();
}

// Two-column phase-portrait file, e.g. v1 vs v2.
inline std::string portrait_csv(const Trajectory& traj, int col_x, int col_y,
                                const std::string& hx, const std::string& hy) {
    std::ostringstream out;
    out << hx << ',' << hy << '\n';
    for (const auto& s : traj.samples)
        out << fmt(s[col_x]) << ',' << fmt(s[col_y]) << '\n';
    return out.str();
}

}  // namespace chua::io
