#include <doctest.h>

#include <cmath>
#include <numbers>

#include "darkpoint/encoder.hpp"
#include "darkpoint/rng.hpp"

using namespace darkpoint;

namespace {

// Test-side brute force: scan every pixel, ties to the smallest row-major
// index.
Pixel brute_argmax(const Heatmap& h) {
    Pixel best{0, 0};
    double best_value = -std::numeric_limits<double>::infinity();
    for (Index y = 0; y < h.height(); ++y)
        for (Index x = 0; x < h.width(); ++x)
            if (h.at(x, y) > best_value) {
                best_value = h.at(x, y);
                best = {x, y};
            }
    return best;
}

}  // namespace

TEST_CASE("density render matches the closed form at and near the centre") {
    const Heatmap h = render(HeatmapCoord(3.0, 4.0), 16, 12,
                             EncoderConfig::unbiased(2.0, NormMode::Density));
    const double peak = 1.0 / (8.0 * std::numbers::pi);
    CHECK(h.at(3, 4) == doctest::Approx(peak).epsilon(1e-12));
    CHECK(h.at(3, 4) == doctest::Approx(0.0397887).epsilon(1e-5));

    const double one_off = std::exp(-0.125) / (8.0 * std::numbers::pi);
    CHECK(h.at(4, 4) == doctest::Approx(one_off).epsilon(1e-12));
    CHECK(h.at(4, 4) == doctest::Approx(0.0351140).epsilon(1e-5));
}

TEST_CASE("peak-one render of a sub-pixel centre peaks at the nearest pixel") {
    const Heatmap h = render(HeatmapCoord(2.3, 3.7), 16, 12, EncoderConfig::unbiased(2.0));
    CHECK(brute_argmax(h) == Pixel{2, 4});
    // The continuous maximum of 1 sits between pixels, so no sample reaches it.
    CHECK(h.at(2, 4) < 1.0);
    CHECK(h.at(2, 4) > 0.9);
}

TEST_CASE("encode_keypoint composes downscale, quantise and render") {
    const DownsampleRatio lambda(4.0);

    SUBCASE("biased round snaps the centre to (2, 4)") {
        const Heatmap biased = encode_keypoint(ImageCoord(9.2, 14.8), lambda, 16, 12,
                                               EncoderConfig::biased(QuantMode::Round, 2.0));
        const Heatmap direct = render(HeatmapCoord(2.0, 4.0), 16, 12,
                                      EncoderConfig::unbiased(2.0), lambda);
        CHECK((biased.grid() == direct.grid()).all());
        CHECK(biased.lambda().value() == 4.0);
    }

    SUBCASE("unbiased keeps the exact centre (2.3, 3.7)") {
        const Heatmap unbiased = encode_keypoint(ImageCoord(9.2, 14.8), lambda, 16, 12,
                                                 EncoderConfig::unbiased(2.0));
        const Heatmap direct = render(HeatmapCoord(2.3, 3.7), 16, 12,
                                      EncoderConfig::unbiased(2.0), lambda);
        CHECK((unbiased.grid() == direct.grid()).all());
    }

    SUBCASE("integral downscaled centres make both modes identical") {
        const Heatmap biased = encode_keypoint(ImageCoord(8.0, 16.0), lambda, 16, 12,
                                               EncoderConfig::biased(QuantMode::Round, 2.0));
        const Heatmap unbiased = encode_keypoint(ImageCoord(8.0, 16.0), lambda, 16, 12,
                                                 EncoderConfig::unbiased(2.0));
        CHECK((biased.grid() == unbiased.grid()).all());
    }
}

TEST_CASE("centres outside the grid render their visible tail") {
    const Heatmap h = render(HeatmapCoord(-2.5, 20.0), 16, 12, EncoderConfig::unbiased(3.0));
    CHECK(h.grid().isFinite().all());
    CHECK((h.grid() > 0.0).all());
    // the hottest pixel is the grid point nearest the off-grid centre
    CHECK(brute_argmax(h) == Pixel{0, 11});
}

TEST_CASE("render rejects invalid configurations") {
    CHECK_THROWS_AS(render(HeatmapCoord(1.0, 1.0), 2, 12, EncoderConfig::unbiased(2.0)),
                    ConfigError);
    CHECK_THROWS_AS(render(HeatmapCoord(1.0, 1.0), 16, 2, EncoderConfig::unbiased(2.0)),
                    ConfigError);
    CHECK_THROWS_AS(render(HeatmapCoord(1.0, 1.0), 16, 12, EncoderConfig::unbiased(0.0)),
                    ConfigError);
    CHECK_THROWS_AS(render(HeatmapCoord(1.0, 1.0), 16, 12, EncoderConfig::unbiased(-1.0)),
                    ConfigError);
}

TEST_CASE("property: integer-centre renders are mirror symmetric") {
    SplitMix64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const Index w = 9 + Index(rng.next() % 8);
        const Index h = 9 + Index(rng.next() % 8);
        const Index cx = 3 + Index(rng.next() % uint64_t(w - 6));
        const Index cy = 3 + Index(rng.next() % uint64_t(h - 6));
        const double sigma = rng.uniform(0.5, 4.0);
        const Heatmap hm = render(HeatmapCoord(double(cx), double(cy)), w, h,
                                  EncoderConfig::unbiased(sigma));
        const Index reach = std::min({cx, cy, w - 1 - cx, h - 1 - cy});
        for (Index d = 1; d <= reach; ++d) {
            CHECK(hm.at(cx - d, cy) == hm.at(cx + d, cy));
            CHECK(hm.at(cx, cy - d) == hm.at(cx, cy + d));
        }
    }
}

TEST_CASE("property: activation strictly decreases with squared distance") {
    SplitMix64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const double cx = rng.uniform(2.0, 13.0);
        const double cy = rng.uniform(2.0, 9.0);
        // sigma >= 0.8 keeps the far tail above the subnormal range on this
        // grid, so strict comparisons stay meaningful
        const double sigma = rng.uniform(0.8, 4.0);
        const Heatmap hm = render(HeatmapCoord(cx, cy), 16, 12, EncoderConfig::unbiased(sigma));
        const Pixel a{Index(rng.next() % 16), Index(rng.next() % 12)};
        const Pixel b{Index(rng.next() % 16), Index(rng.next() % 12)};
        const auto dist2 = [&](Pixel p) {
            const double dx = double(p.x) - cx, dy = double(p.y) - cy;
            return dx * dx + dy * dy;
        };
        if (dist2(a) + 1e-9 < dist2(b)) CHECK(hm.at(a) > hm.at(b));
    }
}

TEST_CASE("property: peak-one renders stay in (0, 1], hitting 1 only on grid centres") {
    SplitMix64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const bool integral = (i % 2) == 0;
        double cx = rng.uniform(1.0, 14.0), cy = rng.uniform(1.0, 10.0);
        if (integral) {
            cx = std::round(cx);
            cy = std::round(cy);
        }
        const Heatmap hm =
            render(HeatmapCoord(cx, cy), 16, 12, EncoderConfig::unbiased(rng.uniform(0.8, 3.0)));
        CHECK((hm.grid() > 0.0).all());
        CHECK((hm.grid() <= 1.0).all());
        const bool attains_one = (hm.grid() == 1.0).any();
        CHECK(attains_one == integral);
    }
}

TEST_CASE("property: biased and unbiased renders agree on integral centres") {
    SplitMix64 rng(4);
    const QuantMode modes[] = {QuantMode::Floor, QuantMode::Ceil, QuantMode::Round};
    for (int i = 0; i < 200; ++i) {
        const DownsampleRatio lambda(double(1 + Index(rng.next() % 8)));
        const double u = double(2 + Index(rng.next() % 12)) * lambda.value();
        const double v = double(2 + Index(rng.next() % 8)) * lambda.value();
        const QuantMode mode = modes[rng.next() % 3];
        const Heatmap biased = encode_keypoint(ImageCoord(u, v), lambda, 16, 12,
                                               EncoderConfig::biased(mode, 2.0));
        const Heatmap unbiased =
            encode_keypoint(ImageCoord(u, v), lambda, 16, 12, EncoderConfig::unbiased(2.0));
        CHECK((biased.grid() == unbiased.grid()).all());
    }
}
