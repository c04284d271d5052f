#include "catch_amalgamated.hpp"

#include "affine_fbmc/channel.hpp"

#include <cmath>
#include <numbers>

using namespace affine_fbmc;

namespace {

// Brute-force N-point DFT of the zero-padded taps in long double.
std::vector<std::complex<long double>> dft_zero_padded(const Samples& taps, std::size_t N)
{
    std::vector<std::complex<long double>> padded(N);
    for (std::size_t q = 0; q < taps.size(); ++q)
        padded[q] = {taps[q].real(), taps[q].imag()};
    std::vector<std::complex<long double>> out(N);
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t k = 0; k < N; ++k)
            out[m] += padded[k]
                      * std::polar(1.0L, -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m * k)
                                             / static_cast<long double>(N));
    return out;
}

} // namespace

TEST_CASE("draw_channel - single tap is flat")
{
    Rng rng(1);
    const auto ch = draw_channel(1, 64, rng);
    REQUIRE(ch.tap_count() == 1);
    for (Eigen::Index m = 1; m < ch.cfr.size(); ++m)
        CHECK(std::abs(std::abs(ch.cfr(m)) - std::abs(ch.cfr(0))) < 1e-14);
}

TEST_CASE("draw_channel - reproducible for a fixed seed")
{
    Rng a(99), b(99);
    const auto c1 = draw_channel(12, 256, a);
    const auto c2 = draw_channel(12, 256, b);
    CHECK(c1.taps == c2.taps);
    CHECK(c1.cfr == c2.cfr);
}

TEST_CASE("draw_channel - unit expected power")
{
    Rng rng(2024);
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto ch = draw_channel(12, 64, rng);
        for (const auto& h : ch.taps)
            acc += std::norm(h);
    }
    CHECK(std::abs(acc / draws - 1.0) < 0.03);
}

TEST_CASE("draw_channel - CFR matches a brute-force DFT")
{
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto ch = draw_channel(1 + static_cast<std::size_t>(i % 12), 64, rng);
        const auto ref = dft_zero_padded(ch.taps, 64);
        for (Eigen::Index m = 0; m < 64; ++m) {
            const auto& r = ref[static_cast<std::size_t>(m)];
            CHECK(std::abs(ch.cfr(m) - Complex(static_cast<double>(r.real()), static_cast<double>(r.imag()))) < 1e-12);
        }
    }
}

TEST_CASE("draw_channel - Lh out of range")
{
    Rng rng(1);
    CHECK_THROWS_AS(draw_channel(17, 16, rng), ConfigError);
    CHECK_THROWS_AS(draw_channel(0, 16, rng), ConfigError);
}

TEST_CASE("apply - identity channel without noise")
{
    Rng rng(1);
    const auto ch = make_channel({Complex(1.0, 0.0)}, 8);
    const Samples s{{1, 2}, {-3, 0.5}, {0, 0}, {4, -4}};
    CHECK(apply(s, ch, 0.0, rng) == s);
}

TEST_CASE("apply - impulse returns the taps")
{
    Rng rng(5);
    const auto ch = draw_channel(12, 64, rng);
    Samples s(1, Complex(1.0, 0.0));
    const auto y = apply(s, ch, 0.0, rng);
    REQUIRE(y.size() == 12);
    CHECK(y == ch.taps);
}

TEST_CASE("apply - noise variance")
{
    Rng rng(77);
    const auto ch = make_channel({Complex(1.0, 0.0)}, 4);
    const Samples s(100000, Complex{});
    const auto y = apply(s, ch, 4.0, rng);
    double acc = 0.0;
    Complex mean{};
    for (const auto& v : y) {
        acc += std::norm(v);
        mean += v;
    }
    CHECK(std::abs(acc / static_cast<double>(y.size()) - 4.0) < 0.1);
    CHECK(std::abs(mean / static_cast<double>(y.size())) < 0.03);
}

TEST_CASE("apply - linear when noise is disabled")
{
    Rng rng(8);
    const auto ch = draw_channel(7, 32, rng);
    std::normal_distribution<double> g;
    Samples s1(50), s2(50), mix(50);
    const Complex a(0.3, -1.2), b(-2.0, 0.4);
    for (std::size_t i = 0; i < 50; ++i) {
        s1[i] = {g(rng), g(rng)};
        s2[i] = {g(rng), g(rng)};
        mix[i] = a * s1[i] + b * s2[i];
    }
    const auto y1 = apply(s1, ch, 0.0, rng);
    const auto y2 = apply(s2, ch, 0.0, rng);
    const auto ym = apply(mix, ch, 0.0, rng);
    REQUIRE(ym.size() == 56);
    for (std::size_t i = 0; i < ym.size(); ++i)
        CHECK(std::abs(ym[i] - (a * y1[i] + b * y2[i])) < 1e-12);
}

TEST_CASE("apply - negative noise variance is rejected")
{
    Rng rng(1);
    const auto ch = make_channel({Complex(1.0, 0.0)}, 4);
    const Samples s(4);
    CHECK_THROWS_AS(apply(s, ch, -1.0, rng), ConfigError);
}

TEST_CASE("noise_variance_for_snr")
{
    CHECK(noise_variance_for_snr(2.0, 0.0) == 2.0);
    CHECK(std::abs(noise_variance_for_snr(1.0, 10.0) - 0.1) < 1e-15);
    CHECK(noise_variance_for_snr(1.0, std::numeric_limits<double>::infinity()) == 0.0);
}
