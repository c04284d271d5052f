// prototype_filter.hpp - PHYDYAS prototype filter design and validation
//
// The PHYDYAS filter is specified by K = 4 frequency samples H0..H3 and
// reconstructed in time by a cosine sum. Taps are sampled at half-integer
// positions so that the filter is symmetric about (Lp-1)/2 for Lp = b*N.
#pragma once

#include "affine_fbmc/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace affine_fbmc {

struct FilterCoefficients {
    std::vector<double> taps;
    std::size_t overlap_factor = 0;
    std::size_t subcarriers = 0;

    std::size_t length() const { return taps.size(); }
    double operator[](std::size_t k) const { return taps[k]; }
};

struct ValidationReport {
    double energy = 0.0;
    double max_symmetry_deviation = 0.0;
    bool length_ok = false;
    bool energy_ok = false;
    bool symmetry_ok = false;
    std::vector<std::string> failures;

    bool passed() const { return length_ok && energy_ok && symmetry_ok; }
};

inline constexpr double kFilterEnergyTolerance = 1e-12;

// PHYDYAS frequency coefficients for overlap factor 4.
inline constexpr double kPhydyasH1 = 0.97195983;
inline constexpr double kPhydyasH2 = 0.70710678118654752440; // 1/sqrt(2)
inline constexpr double kPhydyasH3 = 0.23514695;

inline FilterCoefficients design_phydyas(std::size_t subcarriers, std::size_t overlap_factor = 4)
{
    if (subcarriers < 2 || subcarriers % 2 != 0)
        throw ConfigError("PHYDYAS design requires an even subcarrier count >= 2, got "
                          + std::to_string(subcarriers));
    if (overlap_factor != 4)
        throw ConfigError("unsupported overlap factor " + std::to_string(overlap_factor)
                          + " (only 4 is supported)");

    const double h[4] = {1.0, kPhydyasH1, kPhydyasH2, kPhydyasH3};
    const std::size_t len = overlap_factor * subcarriers;
    const double L = static_cast<double>(len);

    FilterCoefficients f;
    f.overlap_factor = overlap_factor;
    f.subcarriers = subcarriers;
    f.taps.assign(len, 0.0);

    // Even length: evaluate the first half and mirror it.
    for (std::size_t k = 0; k < len / 2; ++k) {
        const double t = static_cast<double>(k) + 0.5;
        double v = h[0];
        for (int l = 1; l < 4; ++l) {
            const double sign = (l % 2 == 0) ? 1.0 : -1.0;
            v += 2.0 * sign * h[l] * std::cos(2.0 * kPi * l * t / L);
        }
        f.taps[k] = v;
        f.taps[len - 1 - k] = v;
    }

    double energy = 0.0;
    for (double v : f.taps)
        energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : f.taps)
        v *= scale;
    return f;
}

inline ValidationReport validate(const FilterCoefficients& f)
{
    ValidationReport r;
    const std::size_t len = f.taps.size();

    r.length_ok = len > 0 && len == f.overlap_factor * f.subcarriers;
    if (!r.length_ok)
        r.failures.push_back("length " + std::to_string(len) + " != b*N = "
                             + std::to_string(f.overlap_factor * f.subcarriers));

    for (double v : f.taps)
        r.energy += v * v;
    r.energy_ok = std::abs(r.energy - 1.0) <= kFilterEnergyTolerance;
    if (!r.energy_ok)
        r.failures.push_back("energy " + std::to_string(r.energy) + " != 1");

    for (std::size_t k = 0; k < len; ++k)
        r.max_symmetry_deviation =
            std::max(r.max_symmetry_deviation, std::abs(f.taps[k] - f.taps[len - 1 - k]));
    r.symmetry_ok = r.max_symmetry_deviation == 0.0;
    if (!r.symmetry_ok)
        r.failures.push_back("asymmetric taps, max deviation "
                             + std::to_string(r.max_symmetry_deviation));
    return r;
}

} // namespace affine_fbmc
