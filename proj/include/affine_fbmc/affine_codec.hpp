// affine_codec.hpp - orthogonal basis, precoder/training/estimator/detector
// matrices and affine precoding Z = sigma_s * X * P + sigma_c * C.
//
// All four matrices are carved from disjoint row blocks of one orthogonal
// matrix Phi of order M = K + n:
//   C = sqrt(M)       * Phi[0, N)          (N x M)   training
//   P = sqrt(M / K)   * Phi[N, N + K)      (K x M)   precoder
//   E = Phi[0, N)^T / sqrt(M)              (M x N)   estimator
//   D = P^T (P P^T)^-1                     (M x K)   detector
// which gives PD = I, PE = 0, CE = I, CD = 0.
#pragma once

#include "affine_fbmc/common.hpp"
#include "affine_fbmc/oqam_mapper.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

namespace affine_fbmc {

enum class BasisKind { Dct, Hadamard };

inline std::string_view to_string(BasisKind kind)
{
    return kind == BasisKind::Dct ? "dct" : "hadamard";
}

inline BasisKind parse_basis_kind(std::string_view text)
{
    if (text == "dct")
        return BasisKind::Dct;
    if (text == "hadamard")
        return BasisKind::Hadamard;
    throw ConfigError("unknown basis kind '" + std::string(text) + "' (expected dct or hadamard)");
}

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Rows of the returned matrix form an orthonormal basis of R^size.
inline RealMatrix build_orthogonal_basis(std::size_t size, BasisKind kind)
{
    if (size < 2)
        throw ConfigError("orthogonal basis size must be >= 2, got " + std::to_string(size));
    const auto M = static_cast<Eigen::Index>(size);
    RealMatrix phi(M, M);

    if (kind == BasisKind::Dct) {
        // Orthonormal DCT-II.
        const double m = static_cast<double>(size);
        for (Eigen::Index r = 0; r < M; ++r) {
            const double scale = std::sqrt((r == 0 ? 1.0 : 2.0) / m);
            for (Eigen::Index c = 0; c < M; ++c)
                phi(r, c) = scale * std::cos(kPi * static_cast<double>(r)
                                             * (2.0 * static_cast<double>(c) + 1.0) / (2.0 * m));
        }
        return phi;
    }

    if (!is_power_of_two(size))
        throw ConfigError("Hadamard basis requires a power-of-two size, got "
                          + std::to_string(size));
    // Sylvester construction: H(r, c) = (-1)^popcount(r & c).
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    for (Eigen::Index r = 0; r < M; ++r)
        for (Eigen::Index c = 0; c < M; ++c)
            phi(r, c) = (__builtin_popcountll(static_cast<unsigned long long>(r & c)) % 2 ? -scale
                                                                                          : scale);
    return phi;
}

struct AffineMatrixSet {
    RealMatrix phi;
    RealMatrix P;
    RealMatrix C;
    RealMatrix E;
    RealMatrix D;
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t n = 0;

    std::size_t frame_instants() const { return K + n; }
};

inline AffineMatrixSet derive_matrices(const RealMatrix& phi, std::size_t N, std::size_t K,
                                       std::size_t n)
{
    if (n < N)
        throw ConfigError("redundancy n = " + std::to_string(n) + " must be >= N = "
                          + std::to_string(N));
    if (N == 0 || K == 0)
        throw ConfigError("N and K must be positive");
    const std::size_t size = K + n;
    if (phi.rows() != static_cast<Eigen::Index>(size) || phi.cols() != phi.rows())
        throw InputError("basis is " + detail::dims(phi.rows(), phi.cols()) + ", expected "
                         + detail::dims(static_cast<Eigen::Index>(size),
                                        static_cast<Eigen::Index>(size)));

    const auto Ni = static_cast<Eigen::Index>(N);
    const auto Ki = static_cast<Eigen::Index>(K);
    const double M = static_cast<double>(size);

    AffineMatrixSet set;
    set.phi = phi;
    set.N = N;
    set.K = K;
    set.n = n;
    set.P = std::sqrt(M / static_cast<double>(K)) * phi.middleRows(Ni, Ki);
    set.C = std::sqrt(M) * phi.topRows(Ni);
    set.E = phi.topRows(Ni).transpose() / std::sqrt(M);

    const RealMatrix gram = set.P * set.P.transpose();
    Eigen::LLT<RealMatrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("P P^T is not positive definite; basis is not orthogonal");
    set.D = llt.solve(set.P).transpose();
    return set;
}

inline AffineMatrixSet make_affine_matrices(std::size_t N, std::size_t K, std::size_t n,
                                            BasisKind kind = BasisKind::Dct)
{
    if (n < N)
        throw ConfigError("redundancy n = " + std::to_string(n) + " must be >= N = "
                          + std::to_string(N));
    return derive_matrices(build_orthogonal_basis(K + n, kind), N, K, n);
}

// Max absolute deviation of each defining relation of an AffineMatrixSet.
struct IdentityResiduals {
    double phi_orthogonal = 0.0; // Phi^T Phi = I
    double pd = 0.0;             // P D = I_K
    double pe = 0.0;             // P E = 0
    double ce = 0.0;             // C E = I_N
    double cd = 0.0;             // C D = 0
    double cc = 0.0;             // C C^T = M I_N
    double pp = 0.0;             // P P^T = (M/K) I_K
    double ee = 0.0;             // E^T E = (1/M) I_N
    double dd = 0.0;             // D^T D = (K/M) I_K

    double max() const
    {
        return std::max({phi_orthogonal, pd, pe, ce, cd, cc, pp, ee, dd});
    }
};

inline IdentityResiduals identity_residuals(const AffineMatrixSet& s)
{
    const auto Ni = static_cast<Eigen::Index>(s.N);
    const auto Ki = static_cast<Eigen::Index>(s.K);
    const auto Mi = static_cast<Eigen::Index>(s.frame_instants());
    const double M = static_cast<double>(s.frame_instants());
    const double K = static_cast<double>(s.K);
    auto dev = [](const RealMatrix& a, const RealMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); };

    IdentityResiduals r;
    r.phi_orthogonal = dev(s.phi.transpose() * s.phi, RealMatrix::Identity(Mi, Mi));
    r.pd = dev(s.P * s.D, RealMatrix::Identity(Ki, Ki));
    r.pe = dev(s.P * s.E, RealMatrix::Zero(Ki, Ni));
    r.ce = dev(s.C * s.E, RealMatrix::Identity(Ni, Ni));
    r.cd = dev(s.C * s.D, RealMatrix::Zero(Ni, Ki));
    r.cc = dev(s.C * s.C.transpose(), M * RealMatrix::Identity(Ni, Ni));
    r.pp = dev(s.P * s.P.transpose(), (M / K) * RealMatrix::Identity(Ki, Ki));
    r.ee = dev(s.E.transpose() * s.E, (1.0 / M) * RealMatrix::Identity(Ni, Ni));
    r.dd = dev(s.D.transpose() * s.D, (K / M) * RealMatrix::Identity(Ki, Ki));
    return r;
}

struct PrecodedGrid {
    RealMatrix Z; // N x (K + n)
    double sigma_s2 = 1.0;
    double sigma_c2 = 0.0;

    double sigma_s() const { return std::sqrt(sigma_s2); }
    double sigma_c() const { return std::sqrt(sigma_c2); }
};

inline PrecodedGrid precode(const RealOqamGrid& X, const AffineMatrixSet& m, double sigma_c2)
{
    if (!(sigma_c2 >= 0.0 && sigma_c2 <= 1.0))
        throw ConfigError("training power sigma_c2 must lie in [0, 1], got "
                          + std::to_string(sigma_c2));
    if (X.rows() != m.C.rows() || X.cols() != m.P.rows())
        throw InputError("data grid is " + detail::dims(X.rows(), X.cols()) + ", expected "
                         + detail::dims(m.C.rows(), m.P.rows()));

    PrecodedGrid g;
    g.sigma_c2 = sigma_c2;
    g.sigma_s2 = 1.0 - sigma_c2;
    g.Z = g.sigma_s() * (X * m.P) + g.sigma_c() * m.C;
    return g;
}

} // namespace affine_fbmc
