#pragma once

#include <Eigen/Core>

#include <cmath>

#include "darkpoint/errors.hpp"

namespace darkpoint {

using Vec2 = Eigen::Vector2d;

struct image_space_tag {};
struct heatmap_space_tag {};

/// Continuous 2D pixel coordinate tagged (at compile time) with the space it
/// lives in. u is horizontal (column direction), v is vertical (row
/// direction). Integer (i, j) names the centre of pixel (i, j); there is no
/// half-pixel offset anywhere in the pipeline.
template <typename SpaceTag>
class SubpixelCoord {
public:
    SubpixelCoord(double u, double v) : uv_(u, v) {
        if (!uv_.allFinite())
            throw ConfigError("invalid coordinate: components must be finite");
    }
    explicit SubpixelCoord(const Vec2& uv) : SubpixelCoord(uv.x(), uv.y()) {}

    double u() const { return uv_.x(); }
    double v() const { return uv_.y(); }
    const Vec2& vec() const { return uv_; }

    bool operator==(const SubpixelCoord&) const = default;

private:
    Vec2 uv_;
};

using ImageCoord = SubpixelCoord<image_space_tag>;
using HeatmapCoord = SubpixelCoord<heatmap_space_tag>;

enum class QuantMode { Floor, Ceil, Round };

/// Factor by which the heatmap is smaller than the image. Any positive real,
/// not just integers, so resolution sweeps are possible.
class DownsampleRatio {
public:
    explicit DownsampleRatio(double value) : value_(value) {
        if (!std::isfinite(value) || value <= 0.0)
            throw ConfigError("invalid config: downsample ratio must be finite and > 0");
    }
    double value() const { return value_; }

    bool operator==(const DownsampleRatio&) const = default;

private:
    double value_;
};

inline HeatmapCoord downscale(const ImageCoord& g, DownsampleRatio lambda) {
    return HeatmapCoord(g.u() / lambda.value(), g.v() / lambda.value());
}

inline ImageCoord upscale(const HeatmapCoord& p, DownsampleRatio lambda) {
    return ImageCoord(p.u() * lambda.value(), p.v() * lambda.value());
}

/// Round mode maps halves away from zero (std::round semantics), so 2.5 -> 3
/// and -2.5 -> -3.
inline double quantise(double x, QuantMode mode) {
    switch (mode) {
        case QuantMode::Floor: return std::floor(x);
        case QuantMode::Ceil: return std::ceil(x);
        case QuantMode::Round: return std::round(x);
    }
    throw ConfigError("invalid config: unknown quantisation mode");
}

inline HeatmapCoord quantise(const HeatmapCoord& p, QuantMode mode) {
    return HeatmapCoord(quantise(p.u(), mode), quantise(p.v(), mode));
}

inline const char* to_string(QuantMode mode) {
    switch (mode) {
        case QuantMode::Floor: return "floor";
        case QuantMode::Ceil: return "ceil";
        case QuantMode::Round: return "round";
    }
    return "?";
}

}  // namespace darkpoint
