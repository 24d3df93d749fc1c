#include "infosal/saliency.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "infosal/errors.hpp"
#include "infosal/wavelet.hpp"

namespace infosal {

std::string_view to_string(Method m) { return m == Method::con ? "CON" : "KLD"; }

std::string_view to_string(MapKind k) {
    switch (k) {
        case MapKind::spatial: return "spatial";
        case MapKind::temporal: return "temporal";
        case MapKind::spatiotemporal: return "spatiotemporal";
    }
    return "unknown";
}

std::size_t default_patch_size(Method m) { return m == Method::kld ? 7 : 8; }

namespace {

// Half-sample symmetric reflection into [0, n): -1 -> 0, n -> n-1.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    i %= period;
    if (i < 0) i += period;
    const auto ni = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(i < ni ? i : period - 1 - i);
}

struct Offset {
    std::ptrdiff_t dx;
    std::ptrdiff_t dy;
};

constexpr std::array<Offset, 5> kFourNeighbours{{{0, -1}, {0, 1}, {-1, 0}, {1, 0}, {0, 0}}};
constexpr std::array<Offset, 9> kEightNeighbours{
    {{0, -1}, {0, 1}, {-1, 0}, {1, 0}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1}, {0, 0}}};

template <std::size_t K>
SampleMatrix gather(const ImagePlane& plane, std::size_t x, std::size_t y, std::size_t p,
                    const std::array<Offset, K>& offsets) {
    if (plane.empty()) throw InputError("cannot extract patches from an empty plane");
    if (p == 0) throw InputError("patch size must be positive");
    SampleMatrix m(p * p, K);
    const auto pp = static_cast<std::ptrdiff_t>(p);
    // Reflected source columns and rows for tile offsets -1, 0, +1.
    std::vector<std::size_t> xs(3 * p);
    std::vector<std::size_t> ys(3 * p);
    for (std::size_t i = 0; i < 3 * p; ++i) {
        const auto shift = static_cast<std::ptrdiff_t>(i) - pp;
        xs[i] = reflect(static_cast<std::ptrdiff_t>(x) + shift, plane.width());
        ys[i] = reflect(static_cast<std::ptrdiff_t>(y) + shift, plane.height());
    }
    for (std::size_t d = 0; d < K; ++d) {
        auto col = m.column(d);
        const std::size_t* row_x = xs.data() + (offsets[d].dx + 1) * pp;
        const std::size_t* col_y = ys.data() + (offsets[d].dy + 1) * pp;
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < p; ++i) col[j * p + i] = plane(row_x[i], col_y[j]);
        }
    }
    std::vector<DimRole> roles(K, DimRole::surround);
    roles.back() = DimRole::center;
    m.set_roles(std::move(roles));
    return m;
}

bool all_extents_below(const SampleMatrix& m, const std::vector<std::size_t>& dims, double floor) {
    for (std::size_t d : dims) {
        const auto col = m.column(d);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        if (*hi - *lo > floor) return false;
    }
    return true;
}

EstimatorOptions with_floor(EstimatorOptions e, double resolution, double input_range) {
    if (!(resolution >= 0.0) || !std::isfinite(resolution)) {
        throw InputError("feature resolution must be finite and non-negative");
    }
    e.min_extent = std::max(e.min_extent, resolution * input_range);
    return e;
}

double range_of(const ImagePlane& p) { return p.empty() ? 0.0 : p.max() - p.min(); }

double score(const SampleMatrix& samples, Method method, const EstimatorOptions& options) {
    return method == Method::kld ? estimate_kl_divergence(samples, options)
                                 : estimate_conditional_entropy(samples, options);
}

std::size_t resolve_patch_size(std::size_t requested, Method method) {
    return requested == 0 ? default_patch_size(method) : requested;
}

PatchScores empty_grid(std::size_t width, std::size_t height, std::size_t p) {
    PatchScores g;
    g.width = width;
    g.height = height;
    g.patch_size = p;
    g.cols = (width + p - 1) / p;
    g.rows = (height + p - 1) / p;
    g.scores.assign(g.cols * g.rows, 0.0);
    g.degenerate.assign(g.cols * g.rows, 0);
    return g;
}

// Replaces the eight surround dims by their leading principal components,
// capped so that N >= 2^(k+1) still holds.
SampleMatrix reduce_surround(const SampleMatrix& nine) {
    const std::size_t n = nine.n_samples();
    SampleMatrix surround(n, 8);
    for (std::size_t d = 0; d < 8; ++d) {
        std::copy_n(nine.column(d).begin(), n, surround.column(d).begin());
    }
    const std::size_t cap = std::max<std::size_t>(1, partition_max_depth(n) - 1);
    const PcaModel model = pca_fit(surround, kPcaTargetEnergy, cap);
    const SampleMatrix coords = pca_project(model, surround);
    const std::size_t k = coords.n_dims();
    SampleMatrix out(n, k + 1);
    for (std::size_t d = 0; d < k; ++d) {
        std::copy_n(coords.column(d).begin(), n, out.column(d).begin());
    }
    std::copy_n(nine.column(8).begin(), n, out.column(k).begin());
    std::vector<DimRole> roles(k + 1, DimRole::surround);
    roles.back() = DimRole::center;
    out.set_roles(std::move(roles));
    return out;
}

// A patch with no spread in any dim has entropy -inf; the lowest finite score
// in the grid stands in for it so that normalization stays meaningful.
void fill_degenerate(PatchScores& grid) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.scores.size(); ++i) {
        if (!grid.degenerate[i]) lowest = std::min(lowest, grid.scores[i]);
    }
    if (!std::isfinite(lowest)) lowest = 0.0;
    for (std::size_t i = 0; i < grid.scores.size(); ++i) {
        if (grid.degenerate[i]) grid.scores[i] = lowest;
    }
}

}  // namespace

SampleMatrix extract_neighborhood(const ImagePlane& plane, std::size_t x, std::size_t y,
                                  std::size_t patch_size) {
    if (patch_size == 0) throw InputError("patch size must be positive");
    if (patch_size * patch_size < (std::size_t{1} << kFourNeighbours.size())) {
        throw AdmissibilityError("patch size " + std::to_string(patch_size) +
                                 " gives fewer than 32 samples for 5 dimensions");
    }
    return gather(plane, x, y, patch_size, kFourNeighbours);
}

SampleMatrix extract_neighborhood8(const ImagePlane& plane, std::size_t x, std::size_t y,
                                   std::size_t patch_size) {
    if (patch_size == 0) throw InputError("patch size must be positive");
    if (patch_size * patch_size < 16) {
        throw AdmissibilityError("patch size " + std::to_string(patch_size) +
                                 " is too small for the eight-neighbour context");
    }
    return gather(plane, x, y, patch_size, kEightNeighbours);
}

ImagePlane spatial_features(const ImagePlane& plane, Preprocess preprocess) {
    return preprocess == Preprocess::msf_denoised ? msf_denoised(plane) : msf_filter(plane);
}

PatchScores spatial_patch_scores(const ImagePlane& features, const SpatialOptions& options,
                                 double input_range) {
    features.validate();
    const std::size_t p = resolve_patch_size(options.patch_size, options.method);
    PatchScores grid = empty_grid(features.width(), features.height(), p);
    const EstimatorOptions estimator = with_floor(options.estimator, options.resolution, input_range);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const std::size_t i = r * grid.cols + c;
            SampleMatrix samples = options.pca ? extract_neighborhood8(features, c * p, r * p, p)
                                               : extract_neighborhood(features, c * p, r * p, p);
            std::vector<std::size_t> all(samples.n_dims());
            for (std::size_t d = 0; d < all.size(); ++d) all[d] = d;
            if (all_extents_below(samples, all, estimator.min_extent)) {
                grid.degenerate[i] = 1;
                continue;
            }
            if (options.pca) samples = reduce_surround(samples);
            grid.scores[i] = score(samples, options.method, estimator);
        }
    }
    fill_degenerate(grid);
    return grid;
}

TemporalFeatures temporal_features(const FrameStack& stack, bool denoise) {
    stack.validate();
    FrameStack filtered;
    filtered.period = stack.period;
    filtered.frames.reserve(stack.size());
    for (const auto& f : stack.frames) filtered.frames.push_back(msf_filter(f));

    TemporalFeatures out;
    double lo = stack.latest().min();
    double hi = stack.latest().max();
    for (const auto& f : stack.frames) {
        lo = std::min(lo, f.min());
        hi = std::max(hi, f.max());
    }
    out.input_range = hi - lo;
    out.context = dct_temporal_decorrelate(filtered);
    out.latest = denoise ? msf_denoised(stack.latest()) : filtered.frames.back();

    const std::size_t t = stack.size();
    const std::size_t w = stack.latest().width();
    const std::size_t h = stack.latest().height();
    // Raw-frame combination whose MSF equals the feature-domain plane; the MSF
    // is linear and per-frame.
    auto combine = [&](const std::vector<double>& weights) {
        ImagePlane raw(w, h);
        auto dst = raw.values();
        for (std::size_t i = 0; i < t; ++i) {
            const auto src = stack.frames[i].values();
            for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += weights[i] * src[p];
        }
        return raw;
    };
    auto basis_vector = [&](std::size_t index) {
        std::vector<double> unit(t, 0.0);
        unit[index] = 1.0;
        return idct_ii(unit);
    };

    // Center: the latest frame minus its share of the top-energy basis (the
    // temporal mean for a mostly static scene).
    const auto& energy = out.context.basis_energy;
    const std::size_t top = static_cast<std::size_t>(
        std::max_element(energy.begin(), energy.end()) - energy.begin());
    std::vector<double> center_weights = basis_vector(top);
    const double at_latest = center_weights[t - 1];
    for (double& v : center_weights) v *= -at_latest;
    center_weights[t - 1] += 1.0;
    const ImagePlane center_raw = combine(center_weights);
    out.center = denoise ? msf_denoised(center_raw) : msf_filter(center_raw);

    if (denoise) {
        // Rebuilding each retained plane from the raw frames lets the shrinkage
        // see the finest-level noise.
        for (std::size_t b = 0; b < out.context.n_bases(); ++b) {
            out.context.planes[b] = msf_denoised(combine(basis_vector(out.context.basis_index[b])));
        }
    }
    return out;
}

PatchScores temporal_patch_scores(const TemporalFeatures& features, const TemporalOptions& options) {
    const std::size_t p = resolve_patch_size(options.patch_size, options.method);
    const auto& context = features.context;
    const std::size_t k = context.n_bases();
    const std::size_t dims = k + 1;
    if (dims >= 63 || p * p < (std::size_t{1} << dims)) {
        throw AdmissibilityError("patch size " + std::to_string(p) + " gives too few samples for " +
                                 std::to_string(dims) + " temporal dimensions");
    }
    PatchScores grid = empty_grid(features.center.width(), features.center.height(), p);
    const EstimatorOptions estimator =
        with_floor(options.estimator, options.resolution, features.input_range);
    std::vector<std::size_t> all(dims);
    for (std::size_t d = 0; d < dims; ++d) all[d] = d;
    std::vector<DimRole> roles(dims, DimRole::surround);
    roles.back() = DimRole::center;

    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const std::size_t i = r * grid.cols + c;
            SampleMatrix samples(p * p, dims);
            for (std::size_t j = 0; j < p; ++j) {
                const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(r * p + j), grid.height);
                for (std::size_t q = 0; q < p; ++q) {
                    const std::size_t sx =
                        reflect(static_cast<std::ptrdiff_t>(c * p + q), grid.width);
                    for (std::size_t d = 0; d < k; ++d) samples(j * p + q, d) = context.planes[d](sx, sy);
                    samples(j * p + q, k) = features.center(sx, sy);
                }
            }
            if (all_extents_below(samples, all, estimator.min_extent)) {
                grid.degenerate[i] = 1;
                continue;
            }
            samples.set_roles(roles);
            grid.scores[i] = score(samples, options.method, estimator);
        }
    }
    fill_degenerate(grid);
    return grid;
}

ImagePlane broadcast_scores(const PatchScores& scores) {
    ImagePlane out(scores.width, scores.height);
    for (std::size_t y = 0; y < scores.height; ++y) {
        for (std::size_t x = 0; x < scores.width; ++x) {
            out(x, y) = scores.at(x / scores.patch_size, y / scores.patch_size);
        }
    }
    return out;
}

ImagePlane normalize_min_max(const ImagePlane& raw) {
    ImagePlane out(raw.width(), raw.height());
    if (raw.empty()) return out;
    const double lo = raw.min();
    const double hi = raw.max();
    if (!(hi > lo)) return out;
    const double span = hi - lo;
    auto src = raw.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = std::clamp((src[i] - lo) / span, 0.0, 1.0);
    }
    return out;
}

SaliencyMap spatial_saliency(const ImagePlane& plane, const SpatialOptions& options) {
    const ImagePlane features = spatial_features(plane, options.preprocess);
    const PatchScores scores = spatial_patch_scores(features, options, range_of(plane));
    return {normalize_min_max(broadcast_scores(scores)), options.method, MapKind::spatial};
}

namespace {

void require_frame_count(const FrameStack& stack, std::size_t frames) {
    if (stack.size() != frames) {
        throw InputError("expected " + std::to_string(frames) + " frames, got " +
                         std::to_string(stack.size()));
    }
}

}  // namespace

SaliencyMap temporal_saliency(const FrameStack& stack, const TemporalOptions& options) {
    require_frame_count(stack, options.frames);
    const TemporalFeatures features = temporal_features(stack, options.denoise);
    const PatchScores scores = temporal_patch_scores(features, options);
    return {normalize_min_max(broadcast_scores(scores)), options.method, MapKind::temporal};
}

SaliencyMap spatiotemporal_saliency(const FrameStack& stack, const TemporalOptions& options) {
    require_frame_count(stack, options.frames);
    const TemporalFeatures features = temporal_features(stack, options.denoise);
    PatchScores combined = temporal_patch_scores(features, options);

    SpatialOptions spatial;
    spatial.method = options.method;
    spatial.patch_size = options.patch_size;
    spatial.preprocess = options.denoise ? Preprocess::msf_denoised : Preprocess::msf;
    spatial.estimator = options.estimator;
    spatial.resolution = options.resolution;
    // The latest frame's spatial feature is already computed with the same
    // preprocessing.
    const PatchScores spatial_scores =
        spatial_patch_scores(features.latest, spatial, range_of(stack.latest()));
    for (std::size_t i = 0; i < combined.scores.size(); ++i) {
        combined.scores[i] += spatial_scores.scores[i];
    }
    return {normalize_min_max(broadcast_scores(combined)), options.method,
            MapKind::spatiotemporal};
}

double bias_ratio(const ImagePlane& plane, std::size_t patch_size, Preprocess preprocess,
                  const EstimatorOptions& estimator) {
    SpatialOptions options;
    options.method = Method::kld;
    options.patch_size = patch_size;
    options.preprocess = preprocess;
    options.estimator = estimator;
    const PatchScores scores =
        spatial_patch_scores(spatial_features(plane, preprocess), options, range_of(plane));
    std::size_t negative = 0;
    for (std::size_t i = 0; i < scores.scores.size(); ++i) {
        if (!scores.degenerate[i] && scores.scores[i] < 0.0) ++negative;
    }
    return static_cast<double>(negative) / static_cast<double>(scores.scores.size());
}

}  // namespace infosal
