// harness.hpp - Monte Carlo sweeps over (sigma_c2, n, SNR), CSV output and
// configuration handling.
//
// Every trial owns a generator seeded from (master seed, trial index) only,
// so each sweep point sees the same bits, channel and noise draws, and the
// result does not depend on how trials are spread over workers.
#pragma once

#include "affine_fbmc/affine_codec.hpp"
#include "affine_fbmc/channel.hpp"
#include "affine_fbmc/common.hpp"
#include "affine_fbmc/fbmc_modem.hpp"
#include "affine_fbmc/oqam_mapper.hpp"
#include "affine_fbmc/prototype_filter.hpp"
#include "affine_fbmc/receiver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace affine_fbmc {

struct SimConfig {
    std::size_t N = 64;
    std::size_t K = 0; // 0 means K = N
    std::vector<std::size_t> redundancy; // empty means {N}
    std::size_t Lh = 12;
    std::size_t overlap_factor = 4;
    std::vector<double> sigma_c2 = {0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0};
    std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30};
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    EstimatorMode mode = EstimatorMode::Raw;
    BasisKind basis = BasisKind::Dct;
    bool perfect_csi = false;

    std::size_t frames() const { return K == 0 ? N : K; }

    std::vector<std::size_t> redundancies() const
    {
        return redundancy.empty() ? std::vector<std::size_t>{N} : redundancy;
    }

    // N = 64, K = n = N, Lh = 12, 100 trials.
    static SimConfig desk() { return {}; }

    // N = 256, Lp = 4N, Lh = 12, QPSK, 100 trials.
    static SimConfig paper()
    {
        SimConfig c;
        c.N = 256;
        c.K = 0;
        c.redundancy.clear();
        c.Lh = 12;
        c.overlap_factor = 4;
        c.trials = 100;
        return c;
    }
};

inline void validate(const SimConfig& c)
{
    if (c.N < 2 || c.N % 2 != 0)
        throw ConfigError("N must be even and >= 2, got " + std::to_string(c.N));
    if (c.frames() % 2 != 0)
        throw ConfigError("K must be even, got " + std::to_string(c.frames()));
    if (c.trials < 1)
        throw ConfigError("trials must be >= 1");
    if (c.Lh < 1 || c.Lh > c.N)
        throw ConfigError("Lh must lie in [1, N], got " + std::to_string(c.Lh));
    for (std::size_t n : c.redundancies()) {
        if (n < c.N)
            throw ConfigError("redundancy n = " + std::to_string(n) + " must be >= N = "
                              + std::to_string(c.N));
        if (c.basis == BasisKind::Hadamard && !is_power_of_two(c.frames() + n))
            throw ConfigError("Hadamard basis needs K + n to be a power of two, got "
                              + std::to_string(c.frames() + n));
    }
    for (double s : c.sigma_c2) {
        if (!(s >= 0.0 && s <= 1.0))
            throw ConfigError("sigma_c2 entries must lie in [0, 1], got " + std::to_string(s));
        if (c.mode == EstimatorMode::Normalized && s == 0.0)
            throw ConfigError("normalized estimator mode needs sigma_c2 > 0");
    }
    for (double s : c.snr_db)
        if (std::isnan(s))
            throw ConfigError("SNR list contains NaN");
}

inline double bandwidth_efficiency(std::size_t K, std::size_t n)
{
    return static_cast<double>(K) / static_cast<double>(K + n);
}

struct SweepPoint {
    double sigma_c2 = 0.0;
    std::size_t n = 0;
    double snr_db = 0.0;
};

struct TrialResult {
    double mse = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    std::size_t fade_events = 0;

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
};

inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return Rng(seq);
}

inline Bits random_bits(std::size_t count, Rng& rng)
{
    Bits b(count);
    for (auto& v : b)
        v = static_cast<std::uint8_t>(rng() >> 63);
    return b;
}

inline std::size_t count_bit_errors(const Bits& a, const Bits& b)
{
    std::size_t errors = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        errors += a[i] != b[i];
    return errors + (std::max(a.size(), b.size()) - std::min(a.size(), b.size()));
}

// One pipeline pass: bits -> QPSK -> OQAM -> precode -> FBMC -> channel + AWGN
// -> analysis -> LS estimate -> detection -> bits.
inline TrialResult run_trial(const SimConfig& cfg, const FbmcModem& modem,
                             const AffineMatrixSet& mats, const SweepPoint& point, Rng& rng)
{
    const std::size_t N = cfg.N;
    const std::size_t K = cfg.frames();

    const Bits bits = random_bits(N * K, rng);
    const RealOqamGrid X = oqam_stagger(qpsk_modulate(bits, N, K));
    const PrecodedGrid Z = precode(X, mats, point.sigma_c2);
    const Samples s = modem.synthesize(Z.Z);

    const ChannelRealization ch = draw_channel(cfg.Lh, N, rng);
    const double noise_var = noise_variance_for_snr(mean_power(s), point.snr_db);
    const Samples y = apply(s, ch, noise_var, rng);
    const ComplexMatrix Y = modem.analyze(y, mats.frame_instants());

    const ChannelEstimate ls = estimate_ls(Y, mats, cfg.mode, Z.sigma_c());
    TrialResult r;
    r.mse = channel_mse(ls, ch);

    const DetectionResult det = detect(Y, mats, cfg.perfect_csi ? perfect_estimate(ch) : ls);
    const Bits decided = qpsk_demodulate(oqam_destagger(det.x_hat));
    r.bit_errors = count_bit_errors(bits, decided);
    r.bits = bits.size();
    r.fade_events = det.fade_events;
    return r;
}

struct SweepRecord {
    double sigma_c2 = 0.0;
    std::size_t n = 0;
    double snr_db = 0.0;
    double mse = 0.0;
    double ber = 0.0; // pooled: total errors / total bits
    double bw_eff = 0.0;
    std::size_t trials = 0;
    std::size_t fade_events = 0;

    // Not part of the CSV.
    double mse_se = 0.0;
    double ber_se = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    std::vector<double> trial_mse;
    std::vector<double> trial_ber;
};

struct SweepResult {
    std::vector<SweepRecord> records;

    const SweepRecord* find(double sigma_c2, std::size_t n, double snr_db) const
    {
        for (const auto& r : records)
            if (r.sigma_c2 == sigma_c2 && r.n == n && r.snr_db == snr_db)
                return &r;
        return nullptr;
    }
};

namespace detail {

inline double standard_error(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

} // namespace detail

inline std::vector<SweepPoint> sweep_points(const SimConfig& cfg)
{
    std::vector<SweepPoint> pts;
    for (double sc : cfg.sigma_c2)
        for (std::size_t n : cfg.redundancies())
            for (double snr : cfg.snr_db)
                pts.push_back({sc, n, snr});
    return pts;
}

inline SweepResult sweep(const SimConfig& cfg, unsigned workers = std::thread::hardware_concurrency())
{
    validate(cfg);
    workers = std::max(1u, workers);

    const FbmcModem modem(BasisFunctionSpec(design_phydyas(cfg.N, cfg.overlap_factor)));
    std::map<std::size_t, AffineMatrixSet> mats;
    for (std::size_t n : cfg.redundancies())
        if (!mats.contains(n))
            mats.emplace(n, make_affine_matrices(cfg.N, cfg.frames(), n, cfg.basis));

    const auto points = sweep_points(cfg);
    const std::size_t tasks = points.size() * cfg.trials;
    std::vector<TrialResult> results(tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mtx;
    auto work = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const std::size_t point = t / cfg.trials;
            const std::size_t trial = t % cfg.trials;
            try {
                Rng rng = trial_rng(cfg.seed, trial);
                results[t] = run_trial(cfg, modem, mats.at(points[point].n), points[point], rng);
            } catch (...) {
                std::lock_guard lock(failure_mtx);
                if (!failure)
                    failure = std::current_exception();
                next = tasks;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);

    SweepResult out;
    for (std::size_t p = 0; p < points.size(); ++p) {
        SweepRecord rec;
        rec.sigma_c2 = points[p].sigma_c2;
        rec.n = points[p].n;
        rec.snr_db = points[p].snr_db;
        rec.bw_eff = bandwidth_efficiency(cfg.frames(), rec.n);
        rec.trials = cfg.trials;
        double mse_sum = 0.0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const TrialResult& r = results[p * cfg.trials + t];
            mse_sum += r.mse;
            rec.bit_errors += r.bit_errors;
            rec.bits += r.bits;
            rec.fade_events += r.fade_events;
            rec.trial_mse.push_back(r.mse);
            rec.trial_ber.push_back(r.ber());
        }
        rec.mse = mse_sum / static_cast<double>(cfg.trials);
        rec.ber = rec.bits == 0 ? 0.0 : static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits);
        rec.mse_se = detail::standard_error(rec.trial_mse);
        rec.ber_se = detail::standard_error(rec.trial_ber);
        out.records.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader = "sigma_c2,n,snr_db,mse,ber,bw_eff,trials,fade_events";

// Shortest round-trip decimal, padded to at least 6 significant digits.
inline std::string format_decimal(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (!std::isfinite(v))
        return s;

    std::size_t digits = 0;
    bool leading = true;
    for (char c : s) {
        if (c == 'e' || c == 'E')
            break;
        if (c < '0' || c > '9')
            continue;
        if (leading && c == '0')
            continue;
        leading = false;
        ++digits;
    }
    if (digits >= 6)
        return s;
    std::snprintf(buf, sizeof buf, "%#.6g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const SweepResult& result)
{
    os << kCsvHeader << '\n';
    for (const auto& r : result.records) {
        os << format_decimal(r.sigma_c2) << ',' << r.n << ',' << format_decimal(r.snr_db) << ','
           << format_decimal(r.mse) << ',' << format_decimal(r.ber) << ','
           << format_decimal(r.bw_eff) << ',' << r.trials << ',' << r.fade_events << '\n';
    }
}

inline std::string to_csv(const SweepResult& result)
{
    std::ostringstream os;
    write_csv(os, result);
    return os.str();
}

inline void emit_results(const SweepResult& result, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(f, result);
    f.flush();
    if (!f)
        throw std::runtime_error("failed writing results to '" + path + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("not a number: '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t parse_unsigned(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("not a non-negative integer: '" + std::string(s) + "'");
    return v;
}

} // namespace detail

inline SweepResult parse_csv(std::string_view text)
{
    SweepResult out;
    bool header = true;
    for (auto line : detail::split(text, '\n')) {
        if (line.empty())
            continue;
        if (header) {
            if (line != kCsvHeader)
                throw InputError("unexpected CSV header '" + std::string(line) + "'");
            header = false;
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 8)
            throw InputError("expected 8 fields in '" + std::string(line) + "'");
        SweepRecord r;
        r.sigma_c2 = detail::parse_double(f[0]);
        r.n = detail::parse_unsigned(f[1]);
        r.snr_db = detail::parse_double(f[2]);
        r.mse = detail::parse_double(f[3]);
        r.ber = detail::parse_double(f[4]);
        r.bw_eff = detail::parse_double(f[5]);
        r.trials = detail::parse_unsigned(f[6]);
        r.fade_events = detail::parse_unsigned(f[7]);
        out.records.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dumps

inline void write_taps(std::ostream& os, const FilterCoefficients& f)
{
    for (double v : f.taps)
        os << format_decimal(v) << '\n';
}

inline void write_transmux_csv(std::ostream& os, const TransmuxTable& t)
{
    os << "dm,dn,re,im\n";
    for (int dm = -t.span; dm <= t.span; ++dm)
        for (int dn = -t.span; dn <= t.span; ++dn) {
            const Complex v = t.at(dm, dn);
            os << dm << ',' << dn << ',' << format_decimal(v.real()) << ','
               << format_decimal(v.imag()) << '\n';
        }
}

// ---------------------------------------------------------------------------
// Configuration

// "64,128" or multiples of N such as "1N,2N,5N".
inline std::vector<std::size_t> parse_redundancy_list(std::string_view text, std::size_t N)
{
    std::vector<std::size_t> out;
    for (auto item : detail::split(text, ',')) {
        if (item.empty())
            continue;
        if (item.back() == 'N' || item.back() == 'n') {
            item.remove_suffix(1);
            const std::uint64_t mult = item.empty() ? 1 : detail::parse_unsigned(item);
            out.push_back(static_cast<std::size_t>(mult) * N);
        } else {
            out.push_back(detail::parse_unsigned(item));
        }
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view text)
{
    std::vector<double> out;
    for (auto item : detail::split(text, ','))
        if (!item.empty())
            out.push_back(detail::parse_double(item));
    return out;
}

// key=value lines, '#' starts a comment. Redundancy given as multiples of N is
// resolved against the final N, so key order does not matter.
inline void apply_config_text(SimConfig& cfg, std::string_view text)
{
    std::string redundancy_text;
    for (auto raw : detail::split(text, '\n')) {
        auto line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InputError("config line without '=': '" + std::string(line) + "'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto value = detail::trim(line.substr(eq + 1));

        if (key == "preset") {
            if (value != "paper")
                throw ConfigError("unknown preset '" + std::string(value) + "'");
            cfg = SimConfig::paper();
        } else if (key == "N" || key == "subcarriers") {
            cfg.N = detail::parse_unsigned(value);
        } else if (key == "K" || key == "frames") {
            cfg.K = detail::parse_unsigned(value);
        } else if (key == "n" || key == "redundancy") {
            redundancy_text = value;
        } else if (key == "Lh" || key == "taps") {
            cfg.Lh = detail::parse_unsigned(value);
        } else if (key == "b" || key == "overlap") {
            cfg.overlap_factor = detail::parse_unsigned(value);
        } else if (key == "sigma_c2" || key == "sigma-c2") {
            cfg.sigma_c2 = parse_double_list(value);
        } else if (key == "snr_db" || key == "snr-db") {
            cfg.snr_db = parse_double_list(value);
        } else if (key == "trials") {
            cfg.trials = detail::parse_unsigned(value);
        } else if (key == "seed") {
            cfg.seed = detail::parse_unsigned(value);
        } else if (key == "estimator_mode" || key == "estimator-mode") {
            cfg.mode = parse_estimator_mode(value);
        } else if (key == "basis") {
            cfg.basis = parse_basis_kind(value);
        } else if (key == "perfect_csi" || key == "perfect-csi") {
            cfg.perfect_csi = value == "1" || value == "true" || value == "yes";
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (!redundancy_text.empty())
        cfg.redundancy = parse_redundancy_list(redundancy_text, cfg.N);
}

inline void apply_config_file(SimConfig& cfg, const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(cfg, ss.str());
}

} // namespace affine_fbmc
