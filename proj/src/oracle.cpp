#include "darkpoint/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace darkpoint {

namespace {

// Local argmax scan; the oracle deliberately reimplements even this so it
// shares nothing with the decoder path it is checking.
Pixel grid_argmax(const Heatmap& h) {
    const double* data = h.grid().data();
    Index best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < h.size(); ++i)
        if (data[i] > best_value) {
            best_value = data[i];
            best = i;
        }
    if (best < 0) throw ConfigError("invalid heatmap: no finite activation");
    return {best % h.width(), best / h.width()};
}

// Best centre on the grid {origin + k*step : |k| <= half_steps}^2 under the
// least-squares objective. For a candidate centre c the optimal template
// amplitude is <h, G_c> / <G_c, G_c>, which leaves <h, G_c>^2 / <G_c, G_c>
// to maximize. The template is separable, so per column offset cu we take
// one matrix-vector product R(:, cu) = grid * gx_cu and then score every
// (cu, cv) pair with a dot product against gy_cv.
Vec2 grid_search(const Heatmap& h, double sigma, const Vec2& origin, int half_steps,
                 double step) {
    const Index w = h.width(), ht = h.height();
    const int n = 2 * half_steps + 1;
    const double half_inv_s2 = 0.5 / (sigma * sigma);
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(w, 0.0, double(w - 1));
    const Eigen::ArrayXd ys = Eigen::ArrayXd::LinSpaced(ht, 0.0, double(ht - 1));
    const Eigen::MatrixXd grid = h.grid().matrix();

    Eigen::MatrixXd row_dots(ht, n);     // R(:, j) = grid * gx for candidate j
    Eigen::VectorXd gx_norm2(n);
    Eigen::MatrixXd gys(ht, n);
    Eigen::VectorXd gy_norm2(n);
    for (int j = 0; j < n; ++j) {
        const double cu = origin.x() + double(j - half_steps) * step;
        const double cv = origin.y() + double(j - half_steps) * step;
        const Eigen::VectorXd gx = (-(xs - cu).square() * half_inv_s2).exp().matrix();
        const Eigen::VectorXd gy = (-(ys - cv).square() * half_inv_s2).exp().matrix();
        row_dots.col(j) = grid * gx;
        gx_norm2[j] = gx.squaredNorm();
        gys.col(j) = gy;
        gy_norm2[j] = gy.squaredNorm();
    }

    Vec2 best = origin;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const double corr = gys.col(l).dot(row_dots.col(j));
            const double score = corr * corr / (gx_norm2[j] * gy_norm2[l]);
            if (score > best_score) {
                best_score = score;
                best = Vec2(origin.x() + double(j - half_steps) * step,
                            origin.y() + double(l - half_steps) * step);
            }
        }
    return best;
}

}  // namespace

HeatmapCoord oracle_localize(const Heatmap& h, double sigma_assumed) {
    if (!std::isfinite(sigma_assumed) || sigma_assumed <= 0.0)
        throw ConfigError("invalid config: oracle sigma must be finite and > 0");
    const Pixel m = grid_argmax(h);
    const Vec2 start(double(m.x), double(m.y));
    const Vec2 coarse = grid_search(h, sigma_assumed, start, 150, 0.01);   // +-1.5 px
    const Vec2 fine = grid_search(h, sigma_assumed, coarse, 10, 0.001);    // +-0.01 px
    return HeatmapCoord(fine);
}

}  // namespace darkpoint
