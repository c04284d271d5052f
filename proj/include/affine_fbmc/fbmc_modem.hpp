// fbmc_modem.hpp - FBMC/OQAM synthesis, analysis and transmultiplexer response
//
// Basis function for subcarrier m and OQAM instant n:
//
//   chi_{m,n}[k] = theta_{m,n} * exp(j*2*pi*m*(k - c)/N) * p[k - n*N/2]
//
// with theta_{m,n} = exp(j*(pi/2*(m+n) - pi*m*n)) in {+-1, +-j} and
// c = (Lp - 1)/2 the symmetry centre of p. Referencing the carrier to the
// filter centre keeps every off-grid inner product purely imaginary for a
// symmetric pulse of even length.
//
// Two implementations are provided: direct sums (synthesize_direct /
// analyze_direct), which define the transform, and FbmcModem, a polyphase
// path that replaces the per-instant N x Lp product with one length-N FFT.
#pragma once

#include "affine_fbmc/common.hpp"
#include "affine_fbmc/prototype_filter.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace affine_fbmc {

struct BasisFunctionSpec {
    FilterCoefficients filter;
    std::size_t N = 0;

    explicit BasisFunctionSpec(FilterCoefficients f) : filter(std::move(f)), N(filter.subcarriers)
    {
        if (N < 2 || N % 2 != 0)
            throw ConfigError("subcarrier count must be even and >= 2");
        if (filter.taps.empty())
            throw ConfigError("empty prototype filter");
    }

    std::size_t filter_length() const { return filter.taps.size(); }
    std::size_t hop() const { return N / 2; }

    // Number of samples produced by synthesizing `instants` OQAM instants.
    std::size_t signal_length(std::size_t instants) const
    {
        return instants == 0 ? 0 : (instants - 1) * hop() + filter_length();
    }
};

// theta_{m,n} = j^(m+n) * (-1)^(m*n), exact for any integer m, n.
inline Complex oqam_phase(long long m, long long n)
{
    static constexpr Complex kPowersOfJ[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const long long q = (((m + n) % 4) + 4) % 4;
    const bool flip = ((m * n) % 2) != 0;
    const Complex v = kPowersOfJ[q];
    return flip ? -v : v;
}

namespace detail {

// exp(j*pi*t/N) for t in [0, 2N).
inline std::vector<Complex> half_turn_table(std::size_t N)
{
    std::vector<Complex> t(2 * N);
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = std::polar(1.0, kPi * static_cast<double>(i) / static_cast<double>(N));
    return t;
}

inline std::size_t wrap_index(long long v, std::size_t modulus)
{
    const auto m = static_cast<long long>(modulus);
    return static_cast<std::size_t>(((v % m) + m) % m);
}

} // namespace detail

// Value of chi_{m,n}[k]; zero outside the filter support.
inline Complex basis_value(const BasisFunctionSpec& spec, long long m, long long n, long long k)
{
    const auto N = static_cast<long long>(spec.N);
    const auto Lp = static_cast<long long>(spec.filter_length());
    const long long u = k - n * N / 2;
    if (u < 0 || u >= Lp)
        return {0.0, 0.0};
    // 2*pi*m*(k - c)/N = pi * m * (2k - Lp + 1) / N
    const long long t = m * (2 * k - Lp + 1);
    const double angle = kPi * static_cast<double>(detail::wrap_index(t, 2 * spec.N))
                         / static_cast<double>(N);
    return oqam_phase(m, n) * std::polar(1.0, angle) * spec.filter.taps[static_cast<std::size_t>(u)];
}

// Reference synthesis: s[k] = sum_{m,n} z_{m,n} chi_{m,n}[k].
inline Samples synthesize_direct(const RealMatrix& Z, const BasisFunctionSpec& spec)
{
    if (Z.rows() != static_cast<Eigen::Index>(spec.N))
        throw InputError("grid has " + std::to_string(Z.rows()) + " rows, expected N = "
                         + std::to_string(spec.N));
    const auto T = static_cast<std::size_t>(Z.cols());
    const std::size_t Lp = spec.filter_length();
    Samples s(spec.signal_length(T), Complex{});
    const auto table = detail::half_turn_table(spec.N);

    for (std::size_t n = 0; n < T; ++n) {
        const std::size_t start = n * spec.hop();
        for (std::size_t m = 0; m < spec.N; ++m) {
            const double z = Z(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
            if (z == 0.0)
                continue;
            const Complex a = z * oqam_phase(static_cast<long long>(m), static_cast<long long>(n));
            for (std::size_t u = 0; u < Lp; ++u) {
                const long long k = static_cast<long long>(start + u);
                const long long t = static_cast<long long>(m) * (2 * k - static_cast<long long>(Lp) + 1);
                s[start + u] += a * table[detail::wrap_index(t, 2 * spec.N)] * spec.filter.taps[u];
            }
        }
    }
    return s;
}

// Reference analysis: y_{m,n} = sum_k y[k] conj(chi_{m,n}[k]); y is zero-padded as needed.
inline ComplexMatrix analyze_direct(std::span<const Complex> y, const BasisFunctionSpec& spec,
                                    std::size_t instants)
{
    const std::size_t Lp = spec.filter_length();
    const auto table = detail::half_turn_table(spec.N);
    ComplexMatrix out(static_cast<Eigen::Index>(spec.N), static_cast<Eigen::Index>(instants));

    for (std::size_t n = 0; n < instants; ++n) {
        const std::size_t start = n * spec.hop();
        for (std::size_t m = 0; m < spec.N; ++m) {
            Complex acc{};
            for (std::size_t u = 0; u < Lp && start + u < y.size(); ++u) {
                const long long k = static_cast<long long>(start + u);
                const long long t = static_cast<long long>(m) * (2 * k - static_cast<long long>(Lp) + 1);
                acc += y[start + u] * std::conj(table[detail::wrap_index(t, 2 * spec.N)])
                       * spec.filter.taps[u];
            }
            out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
                acc * std::conj(oqam_phase(static_cast<long long>(m), static_cast<long long>(n)));
        }
    }
    return out;
}

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex mtx;
    return mtx;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* plan) const
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
};

using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

inline FftwPlan make_plan(std::size_t size, int sign)
{
    std::vector<Complex> buf(size);
    std::lock_guard lock(fftw_planner_mutex());
    auto* io = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(size), io, io, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr)
        throw NumericalError("FFTW failed to create a plan of size " + std::to_string(size));
    return FftwPlan(p);
}

} // namespace detail

// Polyphase synthesis/analysis. Immutable after construction; safe to share
// between threads (FFTW new-array execution is reentrant).
class FbmcModem {
public:
    explicit FbmcModem(BasisFunctionSpec spec)
        : spec_(std::move(spec)),
          table_(detail::half_turn_table(spec_.N)),
          forward_(detail::make_plan(spec_.N, FFTW_FORWARD)),
          backward_(detail::make_plan(spec_.N, FFTW_BACKWARD))
    {
    }

    const BasisFunctionSpec& spec() const { return spec_; }
    std::size_t subcarriers() const { return spec_.N; }

    Samples synthesize(const RealMatrix& Z) const
    {
        const std::size_t N = spec_.N;
        if (Z.rows() != static_cast<Eigen::Index>(N))
            throw InputError("grid has " + std::to_string(Z.rows()) + " rows, expected N = "
                             + std::to_string(N));
        const auto T = static_cast<std::size_t>(Z.cols());
        const std::size_t Lp = spec_.filter_length();
        const auto& p = spec_.filter.taps;
        Samples s(spec_.signal_length(T), Complex{});
        std::vector<Complex> buf(N);

        for (std::size_t n = 0; n < T; ++n) {
            const long long offset = instant_offset(n);
            for (std::size_t m = 0; m < N; ++m) {
                const double z = Z(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
                buf[m] = z * oqam_phase(static_cast<long long>(m), static_cast<long long>(n))
                         * table_[detail::wrap_index(static_cast<long long>(m) * offset, 2 * N)];
            }
            execute(backward_, buf);
            const std::size_t start = n * spec_.hop();
            for (std::size_t u = 0; u < Lp; ++u)
                s[start + u] += p[u] * buf[u % N];
        }
        return s;
    }

    ComplexMatrix analyze(std::span<const Complex> y, std::size_t instants) const
    {
        const std::size_t N = spec_.N;
        const std::size_t Lp = spec_.filter_length();
        const auto& p = spec_.filter.taps;
        ComplexMatrix out(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(instants));
        std::vector<Complex> buf(N);

        for (std::size_t n = 0; n < instants; ++n) {
            std::fill(buf.begin(), buf.end(), Complex{});
            const std::size_t start = n * spec_.hop();
            for (std::size_t u = 0; u < Lp && start + u < y.size(); ++u)
                buf[u % N] += y[start + u] * p[u];
            execute(forward_, buf);
            const long long offset = instant_offset(n);
            for (std::size_t m = 0; m < N; ++m) {
                const Complex rot = table_[detail::wrap_index(static_cast<long long>(m) * offset, 2 * N)];
                out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
                    buf[m] * std::conj(rot)
                    * std::conj(oqam_phase(static_cast<long long>(m), static_cast<long long>(n)));
            }
        }
        return out;
    }

private:
    // Carrier phase at the first sample of instant n, in units of pi/N per subcarrier:
    // 2*pi*m*(n*N/2 - c)/N = pi*m*(n*N - Lp + 1)/N.
    long long instant_offset(std::size_t n) const
    {
        return static_cast<long long>(n * spec_.N) - static_cast<long long>(spec_.filter_length()) + 1;
    }

    static void execute(const detail::FftwPlan& plan, std::vector<Complex>& buf)
    {
        auto* io = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_execute_dft(plan.get(), io, io);
    }

    BasisFunctionSpec spec_;
    std::vector<Complex> table_;
    detail::FftwPlan forward_;
    detail::FftwPlan backward_;
};

// xi(dm, dn) = sum_k chi_{m+dm, n+dn}[k] * conj(chi_{m,n}[k]) around a reference point (m, n).
struct TransmuxTable {
    int span = 0;
    long long ref_m = 0;
    long long ref_n = 0;
    std::vector<Complex> entries; // row-major over dm, then dn, each in [-span, span]

    Complex at(int dm, int dn) const
    {
        const int w = 2 * span + 1;
        return entries[static_cast<std::size_t>((dm + span) * w + (dn + span))];
    }

    // First-order neighbourhood (the eight adjacent points).
    static bool in_first_order_neighbourhood(int dm, int dn)
    {
        return (dm != 0 || dn != 0) && std::abs(dm) <= 1 && std::abs(dn) <= 1;
    }
};

inline Complex basis_inner_product(const BasisFunctionSpec& spec, long long m, long long n,
                                   long long m_ref, long long n_ref)
{
    const auto hop = static_cast<long long>(spec.hop());
    const auto Lp = static_cast<long long>(spec.filter_length());
    const long long lo = std::max(n, n_ref) * hop;
    const long long hi = std::min(n, n_ref) * hop + Lp;
    Complex acc{};
    for (long long k = lo; k < hi; ++k)
        acc += basis_value(spec, m, n, k) * std::conj(basis_value(spec, m_ref, n_ref, k));
    return acc;
}

inline TransmuxTable transmux_response(const BasisFunctionSpec& spec, int span,
                                       long long ref_m = 0, long long ref_n = 0)
{
    if (span < 1)
        throw ConfigError("transmultiplexer span must be >= 1");
    TransmuxTable t;
    t.span = span;
    t.ref_m = ref_m;
    t.ref_n = ref_n;
    t.entries.reserve(static_cast<std::size_t>((2 * span + 1) * (2 * span + 1)));
    for (int dm = -span; dm <= span; ++dm)
        for (int dn = -span; dn <= span; ++dn)
            t.entries.push_back(basis_inner_product(spec, ref_m + dm, ref_n + dn, ref_m, ref_n));
    return t;
}

} // namespace affine_fbmc
