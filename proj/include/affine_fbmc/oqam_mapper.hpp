// oqam_mapper.hpp - bits <-> Gray QPSK <-> real OQAM grid
//
// Layout: complex symbol s(m, n) lives on subcarrier m and complex frame n.
// Bits fill subcarriers first, then frames; each complex symbol consumes two
// consecutive bits (b1 -> real part, b0 -> imaginary part).
#pragma once

#include "affine_fbmc/common.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace affine_fbmc {

using Bits = std::vector<std::uint8_t>;
using ComplexSymbolGrid = ComplexMatrix; // N x K/2
using RealOqamGrid = RealMatrix;         // N x K

inline const double kQpskAmplitude = 1.0 / std::sqrt(2.0);

// bits.size() must be N*K: two bits per symbol on an N x K/2 grid.
inline ComplexSymbolGrid qpsk_modulate(std::span<const std::uint8_t> bits, std::size_t subcarriers,
                                       std::size_t frames)
{
    if (frames % 2 != 0)
        throw InputError("OQAM frame count K must be even, got " + std::to_string(frames));
    if (bits.size() != subcarriers * frames)
        throw InputError("expected " + std::to_string(subcarriers * frames) + " bits, got "
                         + std::to_string(bits.size()));

    const auto rows = static_cast<Eigen::Index>(subcarriers);
    const auto cols = static_cast<Eigen::Index>(frames / 2);
    ComplexSymbolGrid s(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index n = 0; n < cols; ++n) {
        for (Eigen::Index m = 0; m < rows; ++m, i += 2) {
            const double re = bits[i] ? -kQpskAmplitude : kQpskAmplitude;
            const double im = bits[i + 1] ? -kQpskAmplitude : kQpskAmplitude;
            s(m, n) = Complex(re, im);
        }
    }
    return s;
}

inline Bits qpsk_demodulate(const ComplexSymbolGrid& s)
{
    Bits bits;
    bits.reserve(static_cast<std::size_t>(s.size()) * 2);
    for (Eigen::Index n = 0; n < s.cols(); ++n) {
        for (Eigen::Index m = 0; m < s.rows(); ++m) {
            bits.push_back(s(m, n).real() < 0.0 ? 1 : 0);
            bits.push_back(s(m, n).imag() < 0.0 ? 1 : 0);
        }
    }
    return bits;
}

// Even subcarriers send Re first then Im; odd subcarriers swap the order.
inline RealOqamGrid oqam_stagger(const ComplexSymbolGrid& s)
{
    RealOqamGrid x(s.rows(), 2 * s.cols());
    for (Eigen::Index n = 0; n < s.cols(); ++n) {
        for (Eigen::Index m = 0; m < s.rows(); ++m) {
            const Complex v = s(m, n);
            const bool even = (m % 2) == 0;
            x(m, 2 * n) = even ? v.real() : v.imag();
            x(m, 2 * n + 1) = even ? v.imag() : v.real();
        }
    }
    return x;
}

inline ComplexSymbolGrid oqam_destagger(const RealOqamGrid& x)
{
    if (x.cols() % 2 != 0)
        throw InputError("cannot destagger an odd number of OQAM frames ("
                         + std::to_string(x.cols()) + ")");
    ComplexSymbolGrid s(x.rows(), x.cols() / 2);
    for (Eigen::Index n = 0; n < s.cols(); ++n) {
        for (Eigen::Index m = 0; m < s.rows(); ++m) {
            if (m % 2 == 0)
                s(m, n) = Complex(x(m, 2 * n), x(m, 2 * n + 1));
            else
                s(m, n) = Complex(x(m, 2 * n + 1), x(m, 2 * n));
        }
    }
    return s;
}

} // namespace affine_fbmc
