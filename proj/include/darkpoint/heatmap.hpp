#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>

#include "darkpoint/coords.hpp"
#include "darkpoint/errors.hpp"

namespace darkpoint {

using Eigen::Index;

/// Integer pixel location; x is the column, y the row.
struct Pixel {
    Index x = 0;
    Index y = 0;

    bool operator==(const Pixel&) const = default;
};

/// Dense grid of activations plus the downsampling ratio it was produced at.
/// Storage is row-major so data()[y * width + x] matches the on-disk layout.
/// Values are immutable through the const interface; all decode operations
/// take const references and may run concurrently on a shared heatmap.
template <typename Scalar = double>
class HeatmapT {
public:
    using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    HeatmapT(Grid grid, DownsampleRatio lambda) : grid_(std::move(grid)), lambda_(lambda) {
        if (width() < 3 || height() < 3)
            throw ConfigError("heatmap too small: need at least 3x3, got " +
                              std::to_string(width()) + "x" + std::to_string(height()));
    }

    static HeatmapT constant(Index w, Index h, Scalar value, DownsampleRatio lambda) {
        return HeatmapT(Grid::Constant(h, w, value), lambda);
    }

    Index width() const { return grid_.cols(); }
    Index height() const { return grid_.rows(); }
    Index size() const { return grid_.size(); }
    DownsampleRatio lambda() const { return lambda_; }

    Scalar at(Index x, Index y) const { return grid_(y, x); }
    Scalar& at(Index x, Index y) { return grid_(y, x); }
    Scalar at(Pixel p) const { return grid_(p.y, p.x); }

    const Grid& grid() const { return grid_; }
    Grid& grid() { return grid_; }

    bool contains(Pixel p) const {
        return p.x >= 0 && p.x < width() && p.y >= 0 && p.y < height();
    }
    bool is_border(Pixel p) const {
        return p.x == 0 || p.y == 0 || p.x == width() - 1 || p.y == height() - 1;
    }
    bool is_interior(Pixel p) const { return contains(p) && !is_border(p); }

    template <typename Other>
    HeatmapT<Other> cast() const {
        return HeatmapT<Other>(grid_.template cast<Other>(), lambda_);
    }

private:
    Grid grid_;
    DownsampleRatio lambda_;
};

using Heatmap = HeatmapT<double>;
using HeatmapF = HeatmapT<float>;

}  // namespace darkpoint
