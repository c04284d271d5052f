#include "catch_amalgamated.hpp"

#include "affine_fbmc/fbmc_modem.hpp"

#include <cmath>
#include <random>

using namespace affine_fbmc;

namespace {

// Reference values computed with 30-digit arithmetic by direct inner products
// of the basis functions (N = 64, b = 4, reference point (0, 0)).
constexpr double kXi01 = 0.56444783103985855;
constexpr double kXi10 = 0.23927669486587826;
constexpr double kXi11 = 0.2057996220436037;
constexpr double kXi12 = 0.12497373375412451;
constexpr double kXi02Real = -0.00020349027184277341;
constexpr double kXi22Real = -0.00013042519563310916;

BasisFunctionSpec spec_for(std::size_t N) { return BasisFunctionSpec(design_phydyas(N, 4)); }

RealMatrix impulse(std::size_t N, std::size_t T, Eigen::Index m, Eigen::Index n)
{
    RealMatrix z = RealMatrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(T));
    z(m, n) = 1.0;
    return z;
}

double max_diff(const Samples& a, const Samples& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("oqam_phase - values in {+-1, +-j}")
{
    for (long long m = -5; m < 9; ++m) {
        for (long long n = -5; n < 9; ++n) {
            const Complex v = oqam_phase(m, n);
            const double ref = kPi / 2 * static_cast<double>(m + n) - kPi * static_cast<double>(m * n);
            CHECK(std::abs(v - std::polar(1.0, ref)) < 1e-12);
            CHECK((v.real() == 0.0 || v.imag() == 0.0));
            CHECK(std::abs(v) == 1.0);
        }
    }
}

TEST_CASE("synthesize - single DC impulse reproduces the prototype")
{
    const auto spec = spec_for(16);
    const FbmcModem modem(spec);
    const auto s = modem.synthesize(impulse(16, 4, 0, 0));
    REQUIRE(s.size() == spec.signal_length(4));
    REQUIRE(s.size() == 3 * 8 + 64);
    for (std::size_t k = 0; k < spec.filter_length(); ++k)
        CHECK(std::abs(s[k] - Complex(spec.filter[k], 0.0)) < 1e-12);
    for (std::size_t k = spec.filter_length(); k < s.size(); ++k)
        CHECK(std::abs(s[k]) < 1e-12);
}

TEST_CASE("synthesize - impulse at (1, 1)")
{
    // theta_{1,1} = 1; carrier referenced to the filter centre c = (Lp - 1)/2.
    const std::size_t N = 16;
    const auto spec = spec_for(N);
    const FbmcModem modem(spec);
    const auto s = modem.synthesize(impulse(N, 3, 1, 1));
    CHECK(oqam_phase(1, 1) == Complex(1.0, 0.0));
    const double c = (static_cast<double>(spec.filter_length()) - 1.0) / 2.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        Complex expected{};
        if (k >= N / 2 && k < N / 2 + spec.filter_length())
            expected = std::polar(1.0, 2.0 * kPi * (static_cast<double>(k) - c) / N) * spec.filter[k - N / 2];
        CHECK(std::abs(s[k] - expected) < 1e-12);
    }
}

TEST_CASE("synthesize - one grid impulse has unit energy")
{
    const FbmcModem modem(spec_for(32));
    for (auto [m, n] : {std::pair{0, 0}, std::pair{5, 3}, std::pair{31, 6}}) {
        double e = 0.0;
        for (const auto& v : modem.synthesize(impulse(32, 8, m, n)))
            e += std::norm(v);
        CHECK(std::abs(e - 1.0) < 1e-12);
    }
}

TEST_CASE("synthesize - row-count mismatch")
{
    const FbmcModem modem(spec_for(16));
    CHECK_THROWS_AS(modem.synthesize(RealMatrix::Zero(8, 4)), InputError);
    CHECK_THROWS_AS(synthesize_direct(RealMatrix::Zero(8, 4), spec_for(16)), InputError);
}

TEST_CASE("polyphase path matches the direct sums")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (std::size_t N : {4u, 16u, 64u, 6u}) {
        const auto spec = BasisFunctionSpec(design_phydyas(N, 4));
        const FbmcModem modem(spec);
        const std::size_t T = 9;
        RealMatrix Z(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(T));
        for (Eigen::Index i = 0; i < Z.size(); ++i)
            Z(i) = g(rng);
        const auto fast = modem.synthesize(Z);
        const auto slow = synthesize_direct(Z, spec);
        REQUIRE(fast.size() == slow.size());
        CHECK(max_diff(fast, slow) < 1e-9);

        Samples y(spec.signal_length(T) + 5);
        for (auto& v : y)
            v = Complex(g(rng), g(rng));
        const auto Yf = modem.analyze(y, T);
        const auto Yd = analyze_direct(y, spec, T);
        CHECK((Yf - Yd).cwiseAbs().maxCoeff() < 1e-9);

        // Short input is zero padded identically.
        y.resize(spec.signal_length(T) / 2);
        CHECK((modem.analyze(y, T) - analyze_direct(y, spec, T)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("analyze - impulse at (0,0) seen at (0,0) and (0,1)")
{
    const FbmcModem modem(spec_for(64));
    const auto s = modem.synthesize(impulse(64, 4, 0, 0));
    const auto Y = modem.analyze(s, 4);
    CHECK(std::abs(Y(0, 0) - Complex(1.0, 0.0)) < 1e-10);
    CHECK(std::abs(Y(0, 1).real()) < 1e-12);
    CHECK(std::abs(Y(0, 1).imag()) > 0.1);
}

TEST_CASE("analyze - all-zero input")
{
    const FbmcModem modem(spec_for(16));
    const Samples y(200, Complex{});
    CHECK(modem.analyze(y, 6).cwiseAbs().maxCoeff() == 0.0);
    CHECK(modem.analyze(Samples{}, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transmux_response - golden values for PHYDYAS at N = 64")
{
    const auto t = transmux_response(spec_for(64), 2);
    CHECK(std::abs(t.at(0, 0) - Complex(1.0, 0.0)) < 1e-10);
    CHECK(std::abs(t.at(0, 1) - Complex(0.0, kXi01)) < 1e-12);
    CHECK(std::abs(t.at(1, 0) - Complex(0.0, kXi10)) < 1e-12);
    CHECK(std::abs(t.at(1, 1) - Complex(0.0, kXi11)) < 1e-12);
    CHECK(std::abs(t.at(1, -1) - Complex(0.0, kXi11)) < 1e-12);
    CHECK(std::abs(t.at(1, 2) - Complex(0.0, kXi12)) < 1e-12);
    CHECK(std::abs(t.at(0, 2) - Complex(kXi02Real, 0.0)) < 1e-12);
    CHECK(std::abs(t.at(2, 2) - Complex(kXi22Real, 0.0)) < 1e-12);
    CHECK(std::abs(t.at(2, 2)) < 0.05);
}

TEST_CASE("transmux_response - off-grid entries are purely imaginary unless both offsets are even")
{
    // The phase leaves a real component only when dm and dn are both even; there
    // the real part is the filter's residual (near-perfect reconstruction),
    // about 2e-4 for PHYDYAS.
    for (auto [rm, rn] : {std::pair{0LL, 0LL}, std::pair{3LL, 5LL}, std::pair{6LL, 1LL}}) {
        const auto t = transmux_response(spec_for(32), 3, rm, rn);
        for (int dm = -3; dm <= 3; ++dm) {
            for (int dn = -3; dn <= 3; ++dn) {
                if (dm == 0 && dn == 0)
                    continue;
                const double re = std::abs(t.at(dm, dn).real());
                if (dm % 2 != 0 || dn % 2 != 0)
                    CHECK(re < 1e-12);
                else
                    CHECK(re < 3e-4);
            }
        }
    }
}

TEST_CASE("transmux_response - analysis of one basis function gives the table slice")
{
    const std::size_t N = 16;
    const auto spec = spec_for(N);
    const FbmcModem modem(spec);
    const Eigen::Index m0 = 5, n0 = 4;
    const auto Y = modem.analyze(modem.synthesize(impulse(N, 10, m0, n0)), 10);
    const auto t = transmux_response(spec, 2, m0, n0);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            CHECK(std::abs(Y(m0 + a, n0 + b) - std::conj(t.at(a, b))) < 1e-10);
}

TEST_CASE("transmux_response - span must be positive")
{
    CHECK_THROWS_AS(transmux_response(spec_for(16), 0), ConfigError);
}

TEST_CASE("real reconstruction over an ideal channel")
{
    // Re{analyze(synthesize(Z))} = Z up to the filter's real ISI/ICI residual.
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> sign(0, 1);
    const std::size_t N = 32, T = 20;
    const FbmcModem modem(spec_for(N));
    RealMatrix Z(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(T));
    for (Eigen::Index i = 0; i < Z.size(); ++i)
        Z(i) = sign(rng) ? 1.0 : -1.0;
    const auto Y = modem.analyze(modem.synthesize(Z), T);
    const double err = (Y.real() - Z).cwiseAbs().maxCoeff();
    CHECK(err < 2e-3);
    CHECK(err > 1e-6); // PHYDYAS is not perfectly orthogonal
}
