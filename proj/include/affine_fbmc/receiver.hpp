// receiver.hpp - LS channel estimation through E and detection through D
#pragma once

#include "affine_fbmc/affine_codec.hpp"
#include "affine_fbmc/channel.hpp"
#include "affine_fbmc/common.hpp"
#include "affine_fbmc/oqam_mapper.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

namespace affine_fbmc {

enum class EstimatorMode {
    Raw,        // diag(Y E): keeps the sigma_c scale of the training
    Normalized, // diag(Y E) / sigma_c
};

inline std::string_view to_string(EstimatorMode mode)
{
    return mode == EstimatorMode::Raw ? "raw" : "normalized";
}

inline EstimatorMode parse_estimator_mode(std::string_view text)
{
    if (text == "raw")
        return EstimatorMode::Raw;
    if (text == "normalized")
        return EstimatorMode::Normalized;
    throw ConfigError("unknown estimator mode '" + std::string(text)
                      + "' (expected raw or normalized)");
}

struct ChannelEstimate {
    ComplexVector hhat; // diagonal of the N x N estimate
    EstimatorMode mode = EstimatorMode::Raw;
};

inline ChannelEstimate perfect_estimate(const ChannelRealization& truth)
{
    return {truth.cfr, EstimatorMode::Normalized};
}

// Only the diagonal of Y E is formed; off-diagonal terms are discarded.
inline ChannelEstimate estimate_ls(const ComplexMatrix& Y, const AffineMatrixSet& m,
                                   EstimatorMode mode, double sigma_c)
{
    if (Y.rows() != m.E.cols() || Y.cols() != m.E.rows())
        throw InputError("received grid is " + detail::dims(Y.rows(), Y.cols()) + ", expected "
                         + detail::dims(m.E.cols(), m.E.rows()));
    if (mode == EstimatorMode::Normalized && !(sigma_c > 0.0))
        throw ConfigError("normalized LS estimation needs sigma_c > 0 (no training present)");

    ChannelEstimate est;
    est.mode = mode;
    est.hhat.resize(Y.rows());
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
        est.hhat(i) = m.E.col(i).cast<Complex>().dot(Y.row(i).transpose()); // E is real, conj is a no-op
    if (mode == EstimatorMode::Normalized)
        est.hhat /= sigma_c;
    return est;
}

// (1/N) sum_m |H_m - Hhat_m|^2 for a single realization.
inline double channel_mse(const ChannelEstimate& est, const ChannelRealization& truth)
{
    if (est.hhat.size() != truth.cfr.size())
        throw InputError("estimate has " + std::to_string(est.hhat.size())
                         + " subcarriers, channel has " + std::to_string(truth.cfr.size()));
    return (truth.cfr - est.hhat).squaredNorm() / static_cast<double>(truth.cfr.size());
}

inline constexpr double kDeepFadeThreshold = 1e-12;

struct DetectionResult {
    RealOqamGrid x_hat;           // N x K
    std::size_t fade_events = 0;  // subcarriers hit by the deep-fade guard
};

// X_hat = Re{ Hhat^-1 Y D }.
inline DetectionResult detect(const ComplexMatrix& Y, const AffineMatrixSet& m,
                              const ChannelEstimate& est)
{
    if (Y.cols() != m.D.rows() || est.hhat.size() != Y.rows())
        throw InputError("received grid is " + detail::dims(Y.rows(), Y.cols())
                         + ", detector expects " + std::to_string(m.D.rows()) + " columns and "
                         + std::to_string(est.hhat.size()) + " rows");

    // Real GEMMs on the two components; D is real.
    const RealMatrix yd_re = Y.real() * m.D;
    const RealMatrix yd_im = Y.imag() * m.D;

    DetectionResult r;
    r.x_hat.resize(Y.rows(), m.D.cols());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        Complex h = est.hhat(i);
        if (std::abs(h) < kDeepFadeThreshold) {
            h = std::abs(h) > 0.0 ? h / std::abs(h) * kDeepFadeThreshold : Complex(kDeepFadeThreshold);
            ++r.fade_events;
        }
        const Complex g = 1.0 / h;
        // Re{g * (a + j b)} = Re(g) a - Im(g) b
        r.x_hat.row(i) = g.real() * yd_re.row(i) - g.imag() * yd_im.row(i);
    }
    return r;
}

} // namespace affine_fbmc
