#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chua/dynamics.hpp"

// Bit extraction from chaotic trajectories and a small statistical test
// battery (frequency, runs, serial correlation).

namespace chua {

struct ExtractionMeta {
    double sample_period = 5e-5;   // s
    std::string policy = "median"; // threshold rule
    int xor_fold = 1;              // comparator samples XORed per output bit
    bool debiased = false;
};

struct BitStream {
    std::vector<std::uint8_t> bits;  // one bit per element, 0 or 1
    std::string source_digest;
    ExtractionMeta meta;

    size_t size() const { return bits.size(); }
};

struct ThresholdPolicy {
    enum class Kind { median, zero };
    Kind kind = Kind::median;
    // XOR-fold factor: each output bit is the parity of this many
    // consecutive comparator samples. Successive trajectory samples stay
    // phase-correlated for several oscillation periods, so folding is
    // what makes the fixed-rate comparator output usable; 1 disables it.
    int xor_fold = 1;
};

// Samples v1 every sample_period, thresholds it (median of the sampled
// set by default; ties resolve to 0), then XOR-folds groups of
// xor_fold comparator bits into one output bit.
inline BitStream extract_bits(const Trajectory& traj, double sample_period,
                              const ThresholdPolicy& policy = {}) {
    if (traj.samples.empty() || !(traj.dt > 0.0))
        throw std::invalid_argument("extract_bits: empty trajectory");
    if (!(sample_period >= traj.dt))
        throw std::invalid_argument("extract_bits: sample_period must be >= traj.dt");
    const double duration = static_cast<double>(traj.samples.size() - 1) * traj.dt;
    if (duration <= 2.0 * sample_period)
        throw std::invalid_argument("extract_bits: trajectory shorter than 2 sample periods");
    if (policy.xor_fold < 1)
        throw std::invalid_argument("extract_bits: xor_fold must be >= 1");

    // First sample at t0 + sample_period, so the bit count is exactly
    // floor(duration / sample_period).
    const long stride = std::lround(sample_period / traj.dt);
    std::vector<double> sampled;
    sampled.reserve(traj.samples.size() / static_cast<size_t>(stride) + 1);
    for (size_t i = static_cast<size_t>(stride); i < traj.samples.size();
         i += static_cast<size_t>(stride))
        sampled.push_back(traj.samples[i].v1);

    double threshold = 0.0;
    if (policy.kind == ThresholdPolicy::Kind::median) {
        std::vector<double> tmp = sampled;
        const size_t mid = tmp.size() / 2;
        std::nth_element(tmp.begin(), tmp.begin() + static_cast<long>(mid), tmp.end());
        threshold = tmp[mid];
        if (tmp.size() % 2 == 0) {
            const double lower = *std::max_element(tmp.begin(), tmp.begin() + static_cast<long>(mid));
            threshold = 0.5 * (lower + threshold);
        }
    }

    BitStream out;
    out.source_digest = traj.params_digest;
    out.meta.sample_period = sample_period;
    out.meta.policy = policy.kind == ThresholdPolicy::Kind::median ? "median" : "zero";
    out.meta.xor_fold = policy.xor_fold;
    out.bits.reserve(sampled.size() / static_cast<size_t>(policy.xor_fold));
    const size_t k = static_cast<size_t>(policy.xor_fold);
    for (size_t i = 0; i + k <= sampled.size(); i += k) {
        std::uint8_t b = 0;
        for (size_t j = 0; j < k; ++j) b ^= sampled[i + j] > threshold ? 1 : 0;
        out.bits.push_back(b);
    }
    return out;
}

// Non-overlapping pairs: 01 -> 0, 10 -> 1, 00/11 discarded.
inline BitStream von_neumann_debias(const BitStream& b) {
    BitStream out;
    out.source_digest = b.source_digest;
    out.meta = b.meta;
    out.meta.debiased = true;
    out.bits.reserve(b.bits.size() / 2);
    for (size_t i = 0; i + 1 < b.bits.size(); i += 2)
        if (b.bits[i] != b.bits[i + 1]) out.bits.push_back(b.bits[i]);
    return out;
}

struct TestResult {
    std::string name;
    double statistic = 0.0;
    double p_value = 0.0;
    bool pass = false;
    std::string note;
};

// Frequency test: S = sum(2b-1), p = erfc(|S| / sqrt(2n)).
inline TestResult monobit_test(const BitStream& b) {
    const size_t n = b.size();
    if (n < 100) throw std::invalid_argument("monobit_test: need at least 100 bits");
    long s = 0;
    for (auto bit : b.bits) s += bit ? 1 : -1;
    TestResult r;
    r.name = "monobit";
    r.statistic = static_cast<double>(s);
    r.p_value = std::erfc(std::abs(static_cast<double>(s)) /
                          std::sqrt(2.0 * static_cast<double>(n)));
    return r;
}

// Runs test. Prerequisite |pi - 1/2| < 2/sqrt(n); failing it is reported
// as an automatic fail, not an exception.
inline TestResult runs_test(const BitStream& b) {
    const size_t n = b.size();
    if (n < 100) throw std::invalid_argument("runs_test: need at least 100 bits");
    double ones = 0.0;
    for (auto bit : b.bits) ones += bit;
    const double pi = ones / static_cast<double>(n);
    TestResult r;
    r.name = "runs";
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) {
        r.p_value = 0.0;
        r.note = "monobit prerequisite failed";
        return r;
    }
    long v = 1;
    for (size_t i = 1; i < n; ++i)
        if (b.bits[i] != b.bits[i - 1]) ++v;
    const double nn = static_cast<double>(n);
    r.statistic = static_cast<double>(v);
    r.p_value = std::erfc(std::abs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi)) /
                          (2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi)));
    return r;
}

// Pearson correlation between the stream and its lag-shifted copy.
// Constant sequences are undefined; reported as 0 via the test wrapper.
inline double serial_correlation(const BitStream& b, int lag) {
    const size_t n = b.size();
    if (lag < 1 || n <= static_cast<size_t>(lag) + 1)
        throw std::invalid_argument("serial_correlation: need n > lag + 1");
    const size_t m = n - static_cast<size_t>(lag);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        const double x = b.bits[i];
        const double y = b.bits[i + static_cast<size_t>(lag)];
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    const double mm = static_cast<double>(m);
    const double cov = sxy - sx * sy / mm;
    const double vx = sxx - sx * sx / mm;
    const double vy = syy - sy * sy / mm;
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

inline TestResult serial_correlation_test(const BitStream& b, int lag) {
    TestResult r;
    r.name = "serial_correlation_lag" + std::to_string(lag);
    const double c = serial_correlation(b, lag);
    const double n = static_cast<double>(b.size() - static_cast<size_t>(lag));
    r.statistic = c;
    if (c == 0.0 && b.size() > 0) r.note = "zero or undefined correlation";
    // normal approximation: c*sqrt(n) ~ N(0,1) under independence
    r.p_value = std::erfc(std::abs(c) * std::sqrt(n / 2.0));
    return r;
}

struct RandomnessReport {
    size_t n_bits = 0;
    double alpha = 0.01;
    std::vector<TestResult> tests;

    bool all_pass() const {
        for (const auto& t : tests)
            if (!t.pass) return false;
        return true;
    }
};

// Runs the whole battery; per-test errors become per-test failures so a
// report is always produced.
inline RandomnessReport evaluate(const BitStream& b, double alpha = 0.01) {
    if (b.size() < 100) throw std::invalid_argument("evaluate: need at least 100 bits");
    RandomnessReport rep;
    rep.n_bits = b.size();
    rep.alpha = alpha;
    auto add = [&](auto&& fn, const char* name) {
        TestResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.name = name;
            r.p_value = 0.0;
            r.note = e.what();
        }
        r.pass = r.p_value >= alpha;
        rep.tests.push_back(std::move(r));
    };
    add([&] { return monobit_test(b); }, "monobit");
    add([&] { return runs_test(b); }, "runs");
    for (int lag : {1, 2, 8})
        add([&] { return serial_correlation_test(b, lag); },
            ("serial_correlation_lag" + std::to_string(lag)).c_str());
    return rep;
}

// MSB-first packing; the final partial byte is zero-padded (record the
// bit count separately).
inline std::vector<std::uint8_t> pack_bits(const BitStream& b) {
    std::vector<std::uint8_t> out((b.size() + 7) / 8, 0);
    for (size_t i = 0; i < b.size(); ++i)
        if (b.bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return out;
}

}  // namespace chua
