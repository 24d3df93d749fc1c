#pragma once

// Center-surround saliency from conditional entropy (CON) or KL divergence
// (KLD) of co-located pixels in a patch and its neighbours.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "infosal/decorrelate.hpp"
#include "infosal/image.hpp"
#include "infosal/kdp_entropy.hpp"

namespace infosal {

enum class Method { con, kld };
enum class MapKind { spatial, temporal, spatiotemporal };
enum class Preprocess { msf, msf_denoised };

std::string_view to_string(Method m);
std::string_view to_string(MapKind k);

// 7 for KLD, 8 for CON.
std::size_t default_patch_size(Method m);

inline constexpr std::size_t kDefaultFrames = 8;
inline constexpr double kPcaTargetEnergy = 0.998;

struct SaliencyMap {
    ImagePlane values;  // in [0, 1]
    Method method = Method::kld;
    MapKind kind = MapKind::spatial;

    std::size_t width() const noexcept { return values.width(); }
    std::size_t height() const noexcept { return values.height(); }
};

// Raw per-patch scores on the non-overlapping tiling of a width x height
// plane. Tiles on the right and bottom edges may extend past the plane.
struct PatchScores {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t patch_size = 0;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::vector<double> scores;          // row-major, rows x cols
    // 1 where the patch had no spread in any dim; such patches take the lowest
    // score of the grid.
    std::vector<std::uint8_t> degenerate;

    double at(std::size_t col, std::size_t row) const { return scores[row * cols + col]; }
};

// Samples are the P*P co-located pixels of the patch at (x, y) and its four
// neighbours one patch away, dims ordered [north, south, west, east, center]
// and tagged surround x4, center. Reads outside the plane are mirrored.
SampleMatrix extract_neighborhood(const ImagePlane& plane, std::size_t x, std::size_t y,
                                  std::size_t patch_size);

// Eight-neighbour variant: [N, S, W, E, NW, NE, SW, SE, center].
SampleMatrix extract_neighborhood8(const ImagePlane& plane, std::size_t x, std::size_t y,
                                   std::size_t patch_size);

// One grey level of a full-range 8-bit input.
inline constexpr double kFeatureResolution = 1.0 / 255.0;

struct SpatialOptions {
    Method method = Method::kld;
    std::size_t patch_size = 0;  // 0 selects default_patch_size(method)
    Preprocess preprocess = Preprocess::msf_denoised;
    // Eight-neighbour context reduced by per-patch PCA.
    bool pca = false;
    EstimatorOptions estimator{};
    // Feature spreads below this fraction of the input's dynamic range count
    // as flat (raises estimator.min_extent).
    double resolution = kFeatureResolution;
};

struct TemporalOptions {
    Method method = Method::kld;
    std::size_t patch_size = 0;
    bool denoise = true;
    std::size_t frames = kDefaultFrames;
    EstimatorOptions estimator{};
    double resolution = kFeatureResolution;
};

ImagePlane spatial_features(const ImagePlane& plane, Preprocess preprocess);

// Scores of an already preprocessed feature plane; `input_range` is the
// max - min of the plane the features came from.
PatchScores spatial_patch_scores(const ImagePlane& features, const SpatialOptions& options,
                                 double input_range = 1.0);

// Retained DCT planes (surround), the latest frame with its top-energy
// temporal component removed (center), and the latest frame's plain spatial
// feature.
struct TemporalFeatures {
    TemporalFeatureStack context;
    ImagePlane center;
    ImagePlane latest;
    double input_range = 1.0;  // max - min over all frames
};

TemporalFeatures temporal_features(const FrameStack& stack, bool denoise);
PatchScores temporal_patch_scores(const TemporalFeatures& features, const TemporalOptions& options);

// Broadcast each patch score to the in-bounds pixels of its tile.
ImagePlane broadcast_scores(const PatchScores& scores);

// Global min-max to [0, 1]; a constant plane maps to all zeros.
ImagePlane normalize_min_max(const ImagePlane& raw);

SaliencyMap spatial_saliency(const ImagePlane& plane, const SpatialOptions& options = {});
SaliencyMap temporal_saliency(const FrameStack& stack, const TemporalOptions& options = {});

// Raw spatial scores of the latest frame plus raw temporal scores, then one
// normalization.
SaliencyMap spatiotemporal_saliency(const FrameStack& stack, const TemporalOptions& options = {});

// Fraction of patches whose raw KL estimate is negative. Degenerate patches
// count in the denominator only.
double bias_ratio(const ImagePlane& plane, std::size_t patch_size,
                  Preprocess preprocess = Preprocess::msf_denoised,
                  const EstimatorOptions& estimator = {});

}  // namespace infosal
