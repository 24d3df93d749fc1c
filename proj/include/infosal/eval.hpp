#pragma once

// Scores for saliency maps against eye fixations and class-importance maps.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infosal/image.hpp"

namespace infosal {

struct Fixation {
    std::size_t frame = 0;
    double x = 0.0;
    double y = 0.0;
    std::optional<std::string> subject;
};

struct FixationSet {
    std::vector<Fixation> records;

    FixationSet for_frame(std::size_t frame) const;
    // Distinct subjects in first-appearance order; untagged records are skipped.
    std::vector<std::string> subjects() const;
    FixationSet for_subject(const std::string& subject) const;
    std::size_t max_frame() const;
};

// Pixel containing a fixation; throws InputError when it lies outside a
// width x height frame.
struct Pixel {
    std::size_t x = 0;
    std::size_t y = 0;
};
Pixel fixation_pixel(const Fixation& f, std::size_t width, std::size_t height);

inline constexpr std::size_t kRocLevels = 256;
inline constexpr std::size_t kDefaultNsvRadius = 16;
inline constexpr std::size_t kDefaultRandomCount = 100;
inline constexpr double kDefaultDecayLength = 25.0;

// Points are ordered by threshold, from the lowest (everything positive,
// (1, 1)) to a final threshold above 1 (nothing positive, (0, 0)).
struct RocCurve {
    std::vector<double> false_positive_rate;
    std::vector<double> true_positive_rate;
    std::vector<double> thresholds;

    std::size_t size() const noexcept { return thresholds.size(); }
};

// Positives are the distinct fixation pixels of `frame`, negatives all other
// pixels; a pixel is predicted positive when its value >= threshold. The
// thresholds are k/255 for k = 0..255, then +infinity.
RocCurve roc_curve(const ImagePlane& map, const FixationSet& fixations, std::size_t frame);

// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

// Leave-one-subject-out AUC of a map built from the other subjects' fixations
// with kernel exp(-d / decay_length), averaged over subjects.
double intersubject_roc(std::span<const FixationSet> subjects, std::size_t frame,
                        std::size_t width, std::size_t height,
                        double decay_length = kDefaultDecayLength);

// Fixation map of `fixations` in `frame`: max-normalized sum of exp(-d / decay).
ImagePlane fixation_density_map(const FixationSet& fixations, std::size_t frame,
                                std::size_t width, std::size_t height, double decay_length);

// Maximum of the map over the square window of half-width `radius` around
// the fixation, clipped to the map.
double nsv(const ImagePlane& map, const Fixation& fixation, std::size_t radius);

// Mean NSV at the human fixations of `frame` minus the mean NSV at
// `n_random` uniformly drawn pixels. Reproducible for a given seed.
double cas(const ImagePlane& map, const FixationSet& fixations, std::size_t frame,
           std::size_t radius, std::size_t n_random, std::uint64_t seed);

// Pearson-style normalized cross-correlation in [-1, 1]. Throws
// UndefinedError when both inputs are constant; returns 0 when exactly one is.
double normxcorr(const ImagePlane& map, const ImagePlane& importance);

struct ClassImportance {
    std::string name;
    int importance = 0;
};
using ImportanceTable = std::map<int, ClassImportance>;

struct LabelMap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<int> class_ids;  // row-major
};

inline constexpr double kImportanceScale = 32.0;

// Road-scene class importance ranks 1..32, keyed by class id == rank.
const ImportanceTable& default_importance_table();

// importance(class) / 32 per pixel. Throws InputError naming an unknown id.
ImagePlane importance_from_labels(const LabelMap& labels, const ImportanceTable& table);

}  // namespace infosal
