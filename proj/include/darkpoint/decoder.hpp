#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>

#include "darkpoint/coords.hpp"
#include "darkpoint/heatmap.hpp"

namespace darkpoint {

// Activations are clamped to this floor before taking logs, so predicted
// heatmaps with zeros or negative entries never produce -inf/NaN.
inline constexpr double kLogFloor = 1e-10;
// A Hessian whose |det| falls below this is treated as singular.
inline constexpr double kHessianDetEps = 1e-12;
// Taylor offsets larger than one pixel per component contradict the argmax
// and are rejected.
inline constexpr double kMaxTaylorOffset = 1.0;

struct NoShift {};
struct StandardShift {};

/// Log-domain Taylor re-localisation around the argmax, optionally preceded
/// by Gaussian modulation (smoothing) of the heatmap.
struct Dark {
    double sigma_k = 2.0;   ///< modulation kernel std deviation, heatmap px
    bool modulate = false;  ///< smooth before refining
};

using DecodeStrategy = std::variant<NoShift, StandardShift, Dark>;

enum class Fallback { None, BorderMax, SingularHessian, NonMaximizingOffset };

inline const char* to_string(Fallback f) {
    switch (f) {
        case Fallback::None: return "none";
        case Fallback::BorderMax: return "border-max";
        case Fallback::SingularHessian: return "singular-hessian";
        case Fallback::NonMaximizingOffset: return "non-maximizing-offset";
    }
    return "?";
}

struct DecodeResult {
    ImageCoord coord;           ///< heatmap_coord mapped back to image space
    HeatmapCoord heatmap_coord;
    double confidence = 0.0;    ///< max activation of the (unmodulated) input
    Fallback fallback = Fallback::None;
};

/// Integer pixel with the maximal activation and its value. Ties break to
/// the smallest row-major index; non-finite entries are skipped.
template <typename Scalar>
std::pair<Pixel, double> argmax(const HeatmapT<Scalar>& h) {
    const Scalar* data = h.grid().data();
    const Index n = h.size();
    Index best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        const double v = double(data[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best < 0)
        throw ConfigError("invalid heatmap: no finite activation");
    return {Pixel{best % h.width(), best / h.width()}, best_value};
}

/// Highest-activation 4-connected in-grid neighbour of m. Ties break in the
/// fixed candidate order left, right, up, down.
template <typename Scalar>
Pixel second_max_neighbor(const HeatmapT<Scalar>& h, Pixel m) {
    const Pixel candidates[4] = {
        {m.x - 1, m.y}, {m.x + 1, m.y}, {m.x, m.y - 1}, {m.x, m.y + 1}};
    Pixel best{};
    double best_value = 0.0;
    bool found = false;
    for (const Pixel& p : candidates) {
        if (!h.contains(p)) continue;
        const double v = double(h.at(p));
        if (!found || v > best_value) {
            best = p;
            best_value = v;
            found = true;
        }
    }
    return best;  // W, H >= 3 guarantees at least two candidates
}

template <typename Scalar>
DecodeResult decode_no_shift(const HeatmapT<Scalar>& h) {
    const auto [m, value] = argmax(h);
    const HeatmapCoord hc(double(m.x), double(m.y));
    return {upscale(hc, h.lambda()), hc, value, Fallback::None};
}

/// Argmax offset by a quarter pixel toward the second max activation.
template <typename Scalar>
DecodeResult decode_standard_shift(const HeatmapT<Scalar>& h) {
    const auto [m, value] = argmax(h);
    const Pixel s = second_max_neighbor(h, m);
    const Vec2 step(double(s.x - m.x), double(s.y - m.y));
    const HeatmapCoord hc(Vec2(double(m.x), double(m.y)) + 0.25 * step);
    return {upscale(hc, h.lambda()), hc, value, Fallback::None};
}

/// Separable Gaussian smoothing (half-width ceil(3 sigma_k), edge
/// replication) followed by an affine rescale so the result spans the
/// input's min/max again. A constant input comes back unchanged. The input
/// heatmap is never mutated.
template <typename Scalar>
HeatmapT<Scalar> modulate(const HeatmapT<Scalar>& h, double sigma_k) {
    if (!std::isfinite(sigma_k) || sigma_k <= 0.0)
        throw ConfigError("invalid config: modulation sigma must be finite and > 0");

    const Index radius = Index(std::ceil(3.0 * sigma_k));
    Eigen::ArrayXd kernel(2 * radius + 1);
    for (Index i = -radius; i <= radius; ++i)
        kernel[i + radius] = std::exp(-double(i * i) / (2.0 * sigma_k * sigma_k));
    kernel /= kernel.sum();

    const Index w = h.width(), ht = h.height();
    const Eigen::ArrayXXd in = h.grid().template cast<double>();
    Eigen::ArrayXXd rows(ht, w), out(ht, w);
    for (Index y = 0; y < ht; ++y)
        for (Index x = 0; x < w; ++x) {
            double acc = 0.0;
            for (Index k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] * in(y, std::clamp(x + k, Index(0), w - 1));
            rows(y, x) = acc;
        }
    for (Index y = 0; y < ht; ++y)
        for (Index x = 0; x < w; ++x) {
            double acc = 0.0;
            for (Index k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] * rows(std::clamp(y + k, Index(0), ht - 1), x);
            out(y, x) = acc;
        }

    const double in_min = in.minCoeff(), in_max = in.maxCoeff();
    const double out_min = out.minCoeff(), out_max = out.maxCoeff();
    if (!(out_max - out_min > 0.0))
        return h;
    out = (out - out_min) * ((in_max - in_min) / (out_max - out_min)) + in_min;
    return HeatmapT<Scalar>(out.cast<Scalar>(), h.lambda());
}

struct TaylorRefinement {
    Fallback status = Fallback::None;      ///< None, SingularHessian or NonMaximizingOffset
    std::optional<HeatmapCoord> coord;     ///< engaged iff status == None
};

/// Sub-pixel maximum estimate mu = m - H^-1 g, where g and H are the
/// central-difference gradient and Hessian of the log-heatmap at the argmax
/// pixel m. The stencils are exact on quadratics, so an exact Gaussian is
/// recovered to numerical precision. Requires m strictly interior.
template <typename Scalar>
TaylorRefinement taylor_refine(const HeatmapT<Scalar>& h, Pixel m) {
    if (!h.is_interior(m))
        throw ConfigError("taylor_refine requires an interior argmax pixel");

    double d[3][3];  // d[row offset + 1][col offset + 1] = log of clamped activation
    for (Index oy = -1; oy <= 1; ++oy)
        for (Index ox = -1; ox <= 1; ++ox)
            d[oy + 1][ox + 1] = std::log(std::max(double(h.at(m.x + ox, m.y + oy)), kLogFloor));

    const double gx = 0.5 * (d[1][2] - d[1][0]);
    const double gy = 0.5 * (d[2][1] - d[0][1]);
    const double dxx = d[1][2] - 2.0 * d[1][1] + d[1][0];
    const double dyy = d[2][1] - 2.0 * d[1][1] + d[0][1];
    const double dxy = 0.25 * (d[2][2] - d[0][2] - d[2][0] + d[0][0]);

    Eigen::Matrix2d hess;
    hess << dxx, dxy, dxy, dyy;
    const double det = hess.determinant();
    const bool negative_definite = dxx < 0.0 && det > 0.0;
    if (std::abs(det) < kHessianDetEps || !negative_definite)
        return {Fallback::SingularHessian, std::nullopt};

    const Vec2 offset = -(hess.inverse() * Vec2(gx, gy));
    if (offset.cwiseAbs().maxCoeff() > kMaxTaylorOffset)
        return {Fallback::NonMaximizingOffset, std::nullopt};

    return {Fallback::None, HeatmapCoord(double(m.x) + offset.x(), double(m.y) + offset.y())};
}

/// Distribution-aware decoding: optional modulation, argmax, Taylor
/// re-localisation, upscale. Degenerate cases (border argmax, singular or
/// indefinite Hessian, oversized offset) fall back to the standard-shift
/// coordinate of the unmodulated input, with the branch recorded in the
/// fallback tag. Confidence always reads from the unmodulated input.
template <typename Scalar>
DecodeResult decode_dark(const HeatmapT<Scalar>& h, const Dark& cfg) {
    std::optional<HeatmapT<Scalar>> smoothed;
    if (cfg.modulate) smoothed = modulate(h, cfg.sigma_k);
    const HeatmapT<Scalar>& work = smoothed ? *smoothed : h;

    const double confidence = argmax(h).second;

    Fallback fallback;
    const Pixel m = argmax(work).first;
    if (work.is_border(m)) {
        fallback = Fallback::BorderMax;
    } else {
        const TaylorRefinement refined = taylor_refine(work, m);
        if (refined.status == Fallback::None) {
            const HeatmapCoord hc = *refined.coord;
            return {upscale(hc, h.lambda()), hc, confidence, Fallback::None};
        }
        fallback = refined.status;
    }

    DecodeResult shifted = decode_standard_shift(h);
    shifted.confidence = confidence;
    shifted.fallback = fallback;
    return shifted;
}

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
}  // namespace detail

template <typename Scalar>
DecodeResult decode(const HeatmapT<Scalar>& h, const DecodeStrategy& strategy) {
    return std::visit(detail::overloaded{
                          [&](const NoShift&) { return decode_no_shift(h); },
                          [&](const StandardShift&) { return decode_standard_shift(h); },
                          [&](const Dark& dark) { return decode_dark(h, dark); },
                      },
                      strategy);
}

}  // namespace darkpoint
