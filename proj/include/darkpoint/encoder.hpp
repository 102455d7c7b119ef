#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <optional>

#include "darkpoint/coords.hpp"
#include "darkpoint/heatmap.hpp"

namespace darkpoint {

enum class NormMode {
    Density,  ///< amplitude 1 / (2 pi sigma^2), a unit-mass density sample
    PeakOne,  ///< amplitude 1 at the continuous centre
};

/// Gaussian target configuration. A biased target snaps the centre to the
/// pixel grid with the embedded quantisation mode before rendering; an
/// unbiased target renders at the exact sub-pixel centre.
struct EncoderConfig {
    double sigma = 2.0;                           ///< std deviation, heatmap px
    std::optional<QuantMode> bias = std::nullopt; ///< engaged => biased encoding
    NormMode norm = NormMode::PeakOne;

    static EncoderConfig biased(QuantMode mode, double sigma, NormMode norm = NormMode::PeakOne) {
        return EncoderConfig{sigma, mode, norm};
    }
    static EncoderConfig unbiased(double sigma, NormMode norm = NormMode::PeakOne) {
        return EncoderConfig{sigma, std::nullopt, norm};
    }

    void validate() const {
        if (!std::isfinite(sigma) || sigma <= 0.0)
            throw ConfigError("invalid config: sigma must be finite and > 0");
    }
};

/// Samples amp * exp(-((x - u)^2 + (y - v)^2) / (2 sigma^2)) at every pixel
/// of a w x h grid. No truncation window is applied; centres outside the
/// grid are legal and render the visible tail. The rendered values are
/// computed in double and narrowed to Scalar on storage.
template <typename Scalar = double>
HeatmapT<Scalar> render(const HeatmapCoord& center, Index w, Index h, const EncoderConfig& cfg,
                        DownsampleRatio lambda = DownsampleRatio(1.0)) {
    cfg.validate();
    if (w < 3 || h < 3)
        throw ConfigError("heatmap too small: need at least 3x3, got " + std::to_string(w) +
                          "x" + std::to_string(h));

    const Vec2 c = cfg.bias ? quantise(center, *cfg.bias).vec() : center.vec();
    const double amp =
        cfg.norm == NormMode::Density ? 1.0 / (2.0 * std::numbers::pi * cfg.sigma * cfg.sigma)
                                      : 1.0;
    const double half_inv_s2 = 0.5 / (cfg.sigma * cfg.sigma);

    const Eigen::ArrayXd dx2 = (Eigen::ArrayXd::LinSpaced(w, 0.0, double(w - 1)) - c.x()).square();
    const Eigen::ArrayXd dy2 = (Eigen::ArrayXd::LinSpaced(h, 0.0, double(h - 1)) - c.y()).square();

    Eigen::ArrayXXd values =
        amp * ((dx2.transpose().replicate(h, 1) + dy2.replicate(1, w)) * -half_inv_s2).exp();
    return HeatmapT<Scalar>(values.cast<Scalar>(), lambda);
}

/// Full encoding path for a ground-truth keypoint in image space: downscale
/// by lambda, then render (quantising first iff the config is biased).
template <typename Scalar = double>
HeatmapT<Scalar> encode_keypoint(const ImageCoord& g, DownsampleRatio lambda, Index w, Index h,
                                 const EncoderConfig& cfg) {
    return render<Scalar>(downscale(g, lambda), w, h, cfg, lambda);
}

}  // namespace darkpoint
