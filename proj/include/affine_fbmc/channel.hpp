// channel.hpp - frequency-selective Rayleigh channel and AWGN
#pragma once

#include "affine_fbmc/common.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>

namespace affine_fbmc {

using Rng = std::mt19937_64;

struct ChannelRealization {
    Samples taps;      // h[0 .. Lh-1]
    ComplexVector cfr; // H_m = sum_q h[q] exp(-j 2 pi m q / N)

    std::size_t tap_count() const { return taps.size(); }
};

inline ComplexVector frequency_response(std::span<const Complex> taps, std::size_t N)
{
    ComplexVector H(static_cast<Eigen::Index>(N));
    for (std::size_t m = 0; m < N; ++m) {
        Complex acc{};
        for (std::size_t q = 0; q < taps.size(); ++q) {
            const std::size_t t = (m * q) % N;
            acc += taps[q] * std::polar(1.0, -2.0 * kPi * static_cast<double>(t) / static_cast<double>(N));
        }
        H(static_cast<Eigen::Index>(m)) = acc;
    }
    return H;
}

inline ChannelRealization make_channel(Samples taps, std::size_t N)
{
    if (taps.empty() || taps.size() > N)
        throw ConfigError("channel needs 1..N taps, got " + std::to_string(taps.size()));
    ChannelRealization ch;
    ch.cfr = frequency_response(taps, N);
    ch.taps = std::move(taps);
    return ch;
}

// Circularly-symmetric complex Gaussian, total variance `variance`.
inline Complex complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    const double re = dist(rng);
    const double im = dist(rng);
    return {re, im};
}

// i.i.d. Rayleigh taps with a uniform power delay profile, total expected power 1.
inline ChannelRealization draw_channel(std::size_t Lh, std::size_t N, Rng& rng)
{
    if (Lh == 0 || Lh > N)
        throw ConfigError("tap count Lh = " + std::to_string(Lh) + " must lie in [1, N = "
                          + std::to_string(N) + "]");
    Samples taps(Lh);
    const double per_tap = 1.0 / static_cast<double>(Lh);
    for (auto& h : taps)
        h = complex_gaussian(rng, per_tap);
    return make_channel(std::move(taps), N);
}

// y = s * h (full linear convolution) + noise of variance noise_var per complex sample.
inline Samples apply(std::span<const Complex> s, const ChannelRealization& ch, double noise_var,
                     Rng& rng)
{
    if (!(noise_var >= 0.0))
        throw ConfigError("noise variance must be non-negative");
    if (s.empty())
        return {};
    const auto& h = ch.taps;
    Samples y(s.size() + h.size() - 1, Complex{});
    for (std::size_t k = 0; k < s.size(); ++k)
        for (std::size_t q = 0; q < h.size(); ++q)
            y[k + q] += s[k] * h[q];
    if (noise_var > 0.0) {
        for (auto& v : y)
            v += complex_gaussian(rng, noise_var);
    }
    return y;
}

inline double mean_power(std::span<const Complex> s)
{
    if (s.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto& v : s)
        acc += std::norm(v);
    return acc / static_cast<double>(s.size());
}

// sigma_eta^2 = P_signal / 10^(snr/10); +inf dB disables noise.
inline double noise_variance_for_snr(double signal_power, double snr_db)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

} // namespace affine_fbmc
