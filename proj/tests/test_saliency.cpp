#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "infosal/errors.hpp"
#include "infosal/saliency.hpp"
#include "test_support.hpp"

namespace infosal {
namespace {

using testing::max_abs;
using testing::max_abs_diff;
using testing::moving_square;
using testing::planted_patch_image;
using testing::random_plane;
using testing::smooth_texture;

void expect_normalized(const ImagePlane& m) {
    EXPECT_GE(m.min(), 0.0);
    EXPECT_LE(m.max(), 1.0);
    for (double v : m.values()) ASSERT_TRUE(std::isfinite(v));
}

// Whether some pixel holding the map maximum satisfies `inside`.
template <class Pred>
bool argmax_where(const ImagePlane& m, Pred inside) {
    const double top = m.max();
    for (std::size_t y = 0; y < m.height(); ++y) {
        for (std::size_t x = 0; x < m.width(); ++x) {
            if (m(x, y) == top && inside(x, y)) return true;
        }
    }
    return false;
}

TEST(Neighborhood, LayoutAndRoles) {
    const ImagePlane p = random_plane(40, 40, 1);
    const SampleMatrix m = extract_neighborhood(p, 16, 16, 8);
    ASSERT_EQ(m.n_samples(), 64u);
    ASSERT_EQ(m.n_dims(), 5u);
    const std::vector<DimRole> expect = {DimRole::surround, DimRole::surround, DimRole::surround,
                                         DimRole::surround, DimRole::center};
    EXPECT_EQ(m.roles(), expect);
    for (std::size_t j = 0; j < 8; ++j) {
        for (std::size_t i = 0; i < 8; ++i) {
            const std::size_t s = j * 8 + i;
            EXPECT_EQ(m(s, 0), p(16 + i, 8 + j));   // north
            EXPECT_EQ(m(s, 1), p(16 + i, 24 + j));  // south
            EXPECT_EQ(m(s, 2), p(8 + i, 16 + j));   // west
            EXPECT_EQ(m(s, 3), p(24 + i, 16 + j));  // east
            EXPECT_EQ(m(s, 4), p(16 + i, 16 + j));  // center
        }
    }
}

TEST(Neighborhood, EightNeighbourVariant) {
    const ImagePlane p = random_plane(40, 40, 2);
    const SampleMatrix m = extract_neighborhood8(p, 16, 16, 8);
    ASSERT_EQ(m.n_dims(), 9u);
    EXPECT_EQ(m(0, 4), p(8, 8));     // north-west
    EXPECT_EQ(m(0, 7), p(24, 24));   // south-east
    EXPECT_EQ(m(0, 8), p(16, 16));   // center
    EXPECT_EQ(m.roles().back(), DimRole::center);
}

TEST(Neighborhood, MirroredAtBorders) {
    const ImagePlane p = random_plane(20, 20, 3);
    const SampleMatrix m = extract_neighborhood(p, 0, 0, 7);
    for (std::size_t k = 0; k < 5; ++k) {
        for (double v : m.column(k)) EXPECT_TRUE(std::isfinite(v));
    }
    // The north block of the top-left patch reflects rows 0..6.
    bool found = false;
    for (double v : m.column(0)) found = found || v == p(0, 0);
    EXPECT_TRUE(found);
}

TEST(Neighborhood, ConstantAndErrors) {
    const ImagePlane flat(30, 30, 0.4);
    const SampleMatrix m = extract_neighborhood(flat, 7, 7, 7);
    for (std::size_t k = 0; k < 5; ++k) {
        for (double v : m.column(k)) EXPECT_EQ(v, 0.4);
    }
    EXPECT_THROW(extract_neighborhood(flat, 0, 0, 5), AdmissibilityError);
    EXPECT_THROW(extract_neighborhood(flat, 0, 0, 0), InputError);
}

TEST(Spatial, DefaultPatchSizes) {
    EXPECT_EQ(default_patch_size(Method::kld), 7u);
    EXPECT_EQ(default_patch_size(Method::con), 8u);
}

TEST(Spatial, ConstantImageGivesZeroMap) {
    for (Method method : {Method::kld, Method::con}) {
        SpatialOptions o;
        o.method = method;
        const SaliencyMap s = spatial_saliency(ImagePlane(64, 48, 0.3), o);
        EXPECT_EQ(s.width(), 64u);
        EXPECT_EQ(s.height(), 48u);
        EXPECT_EQ(max_abs(s.values), 0.0);
    }
}

TEST(Spatial, MapIsNormalizedAndTileConstant) {
    const ImagePlane img = smooth_texture(67, 45, 0.8, 5);
    for (Method method : {Method::kld, Method::con}) {
        for (bool pca : {false, true}) {
            SpatialOptions o;
            o.method = method;
            o.pca = pca;
            const SaliencyMap s = spatial_saliency(img, o);
            ASSERT_EQ(s.width(), 67u);
            ASSERT_EQ(s.height(), 45u);
            expect_normalized(s.values);
            EXPECT_EQ(s.values.max(), 1.0);
            EXPECT_EQ(s.values.min(), 0.0);
            const std::size_t p = default_patch_size(method);
            for (std::size_t y = 0; y < 45; ++y) {
                for (std::size_t x = 0; x < 67; ++x) {
                    EXPECT_EQ(s.values(x, y), s.values((x / p) * p, (y / p) * p));
                }
            }
        }
    }
}

TEST(Spatial, PlantedPatchIsArgmax) {
    const std::size_t x0 = 100;
    const std::size_t y0 = 60;
    const std::size_t sq = 12;
    const ImagePlane img = planted_patch_image(240, 180, sq, x0, y0);
    for (Method method : {Method::kld, Method::con}) {
        SpatialOptions o;
        o.method = method;
        const SaliencyMap s = spatial_saliency(img, o);
        EXPECT_TRUE(argmax_where(s.values, [&](std::size_t x, std::size_t y) {
            return x >= x0 && x < x0 + sq && y >= y0 && y < y0 + sq;
        })) << to_string(method);
    }
}

TEST(Spatial, AffineIntensityInvarianceForKld) {
    const ImagePlane img = smooth_texture(96, 80, 0.9, 11);
    ImagePlane scaled = img;
    for (double& v : scaled.values()) v = 3.5 * v + 12.0;
    for (Preprocess pre : {Preprocess::msf, Preprocess::msf_denoised}) {
        SpatialOptions o;
        o.preprocess = pre;
        EXPECT_LE(max_abs_diff(spatial_saliency(img, o).values, spatial_saliency(scaled, o).values), 1e-6);
    }
}

TEST(Spatial, ScoresGridShape) {
    SpatialOptions o;
    o.patch_size = 8;
    const PatchScores s = spatial_patch_scores(random_plane(50, 33, 4), o);
    EXPECT_EQ(s.cols, 7u);
    EXPECT_EQ(s.rows, 5u);
    EXPECT_EQ(s.scores.size(), 35u);
    EXPECT_EQ(s.degenerate.size(), 35u);
    const ImagePlane b = broadcast_scores(s);
    EXPECT_EQ(b.width(), 50u);
    EXPECT_EQ(b(49, 32), s.at(6, 4));
}

TEST(Spatial, DegeneratePatchesTakeGridMinimum) {
    // Left half flat, right half textured.
    ImagePlane img = smooth_texture(128, 64, 0.9, 12);
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x < 48; ++x) img(x, y) = 0.5;
    }
    SpatialOptions o;
    o.preprocess = Preprocess::msf;
    const PatchScores s = spatial_patch_scores(spatial_features(img, o.preprocess), o);
    double lowest = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        if (!s.degenerate[i]) lowest = std::min(lowest, s.scores[i]);
        any = any || s.degenerate[i];
    }
    ASSERT_TRUE(any);
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        if (s.degenerate[i]) EXPECT_EQ(s.scores[i], lowest);
    }
}

TEST(Spatial, NormalizeMinMax) {
    EXPECT_EQ(max_abs(normalize_min_max(ImagePlane(4, 4, -2.0))), 0.0);
    ImagePlane r(3, 1);
    r(0, 0) = -1.0;
    r(1, 0) = 0.0;
    r(2, 0) = 3.0;
    const ImagePlane n = normalize_min_max(r);
    EXPECT_EQ(n(0, 0), 0.0);
    EXPECT_EQ(n(1, 0), 0.25);
    EXPECT_EQ(n(2, 0), 1.0);
}

TEST(Spatial, Errors) {
    SpatialOptions o;
    o.patch_size = 5;
    EXPECT_THROW(spatial_saliency(random_plane(40, 40, 1), o), AdmissibilityError);
    o = {};
    o.resolution = -1.0;
    EXPECT_THROW(spatial_saliency(random_plane(40, 40, 1), o), InputError);
    EXPECT_THROW(spatial_saliency(ImagePlane{}), InputError);
}

FrameStack static_stack(std::size_t t) {
    FrameStack s;
    s.frames.assign(t, smooth_texture(64, 48, 0.9, 8));
    return s;
}

TEST(Temporal, StaticSceneGivesZeroMap) {
    for (Method method : {Method::kld, Method::con}) {
        TemporalOptions o;
        o.method = method;
        const SaliencyMap s = temporal_saliency(static_stack(8), o);
        EXPECT_EQ(s.kind, MapKind::temporal);
        EXPECT_EQ(max_abs(s.values), 0.0);
    }
}

TEST(Temporal, FrameCountMustMatch) {
    EXPECT_THROW(temporal_saliency(static_stack(7)), InputError);
    TemporalOptions o;
    o.frames = 6;
    EXPECT_NO_THROW(temporal_saliency(static_stack(6), o));
}

TEST(Temporal, MovingSquareArgmaxOnTrail) {
    const auto fixture = moving_square();
    // KLD is blind to amplitude, so the band-pass halo of the square (about
    // one patch wide) can outscore the square itself.
    for (Method method : {Method::kld, Method::con}) {
        for (bool denoise : {true, false}) {
            TemporalOptions o;
            o.method = method;
            o.denoise = denoise;
            const std::size_t margin = method == Method::kld ? default_patch_size(method) : 0;
            const SaliencyMap s = temporal_saliency(fixture.stack, o);
            expect_normalized(s.values);
            EXPECT_TRUE(argmax_where(s.values, [&](std::size_t x, std::size_t y) {
                return fixture.on_trail(x, y, margin);
            })) << to_string(method) << " denoise=" << denoise;
        }
    }
}

TEST(Spatiotemporal, MovingSquareArgmaxOnTrail) {
    const auto fixture = moving_square();
    for (Method method : {Method::kld, Method::con}) {
        TemporalOptions o;
        o.method = method;
        const SaliencyMap s = spatiotemporal_saliency(fixture.stack, o);
        EXPECT_TRUE(argmax_where(s.values, [&](std::size_t x, std::size_t y) { return fixture.on_trail(x, y); }))
            << to_string(method);
    }
}

TEST(Temporal, ShrinkageLowersBackground) {
    const auto fixture = moving_square(8, 0.05);
    auto background_mean = [&](bool denoise) {
        TemporalOptions o;
        o.denoise = denoise;
        const SaliencyMap s = temporal_saliency(fixture.stack, o);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t y = 0; y < s.height(); ++y) {
            for (std::size_t x = 0; x < s.width(); ++x) {
                if (fixture.on_trail(x, y)) continue;
                sum += s.values(x, y);
                ++n;
            }
        }
        return sum / static_cast<double>(n);
    };
    EXPECT_LT(background_mean(true), background_mean(false));
}

TEST(Spatiotemporal, StaticSceneEqualsSpatial) {
    const FrameStack stack = static_stack(8);
    for (Method method : {Method::kld, Method::con}) {
        TemporalOptions t;
        t.method = method;
        SpatialOptions s;
        s.method = method;
        const SaliencyMap st = spatiotemporal_saliency(stack, t);
        EXPECT_EQ(st.kind, MapKind::spatiotemporal);
        EXPECT_LE(max_abs_diff(st.values, spatial_saliency(stack.latest(), s).values), 1e-12);
    }
}

TEST(Spatiotemporal, MovingSquareIsNormalized) {
    const auto fixture = moving_square();
    const SaliencyMap s = spatiotemporal_saliency(fixture.stack);
    expect_normalized(s.values);
    EXPECT_EQ(s.values.max(), 1.0);
}

TEST(BiasRatio, RangeAndFlatImage) {
    EXPECT_EQ(bias_ratio(ImagePlane(70, 70, 0.5), 7), 0.0);
    const double r = bias_ratio(smooth_texture(140, 112, 0.6, 2), 7);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
}

}  // namespace
}  // namespace infosal
