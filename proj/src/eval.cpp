#include "infosal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "infosal/errors.hpp"

namespace infosal {

FixationSet FixationSet::for_frame(std::size_t frame) const {
    FixationSet out;
    for (const auto& r : records) {
        if (r.frame == frame) out.records.push_back(r);
    }
    return out;
}

std::vector<std::string> FixationSet::subjects() const {
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (r.subject && std::find(out.begin(), out.end(), *r.subject) == out.end()) {
            out.push_back(*r.subject);
        }
    }
    return out;
}

FixationSet FixationSet::for_subject(const std::string& subject) const {
    FixationSet out;
    for (const auto& r : records) {
        if (r.subject == subject) out.records.push_back(r);
    }
    return out;
}

std::size_t FixationSet::max_frame() const {
    std::size_t m = 0;
    for (const auto& r : records) m = std::max(m, r.frame);
    return m;
}

Pixel fixation_pixel(const Fixation& f, std::size_t width, std::size_t height) {
    if (!(f.x >= 0.0 && f.y >= 0.0 && f.x < static_cast<double>(width) &&
          f.y < static_cast<double>(height))) {
        throw InputError("fixation (" + std::to_string(f.x) + ", " + std::to_string(f.y) +
                         ") in frame " + std::to_string(f.frame) + " lies outside the " +
                         std::to_string(width) + "x" + std::to_string(height) + " map");
    }
    return {static_cast<std::size_t>(f.x), static_cast<std::size_t>(f.y)};
}

namespace {

// Largest k in [0, 255] with k/255 <= v, or -1 when v < 0.
int threshold_level(double v) {
    constexpr double top = static_cast<double>(kRocLevels - 1);
    if (!(v >= 0.0)) return -1;
    int k = static_cast<int>(std::min(std::floor(v * top), top));
    while (k < static_cast<int>(kRocLevels) - 1 && static_cast<double>(k + 1) / top <= v) ++k;
    while (k >= 0 && static_cast<double>(k) / top > v) --k;
    return k;
}

}  // namespace

RocCurve roc_curve(const ImagePlane& map, const FixationSet& fixations, std::size_t frame) {
    map.validate();
    const FixationSet here = fixations.for_frame(frame);
    if (here.records.empty()) {
        throw InputError("no fixations in frame " + std::to_string(frame));
    }
    std::vector<std::uint8_t> positive(map.size(), 0);
    for (const auto& f : here.records) {
        const Pixel p = fixation_pixel(f, map.width(), map.height());
        positive[p.y * map.width() + p.x] = 1;
    }

    // hist[k + 1] counts pixels whose level is k (level -1 in slot 0).
    std::vector<std::size_t> pos_hist(kRocLevels + 1, 0);
    std::vector<std::size_t> neg_hist(kRocLevels + 1, 0);
    std::size_t n_pos = 0;
    const auto values = map.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto slot = static_cast<std::size_t>(threshold_level(values[i]) + 1);
        if (positive[i]) {
            ++pos_hist[slot];
            ++n_pos;
        } else {
            ++neg_hist[slot];
        }
    }
    const std::size_t n_neg = values.size() - n_pos;

    RocCurve curve;
    // Pixels at or above threshold k/255 are those with level >= k.
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::vector<std::pair<std::size_t, std::size_t>> counts(kRocLevels);
    for (std::size_t k = kRocLevels; k-- > 0;) {
        tp += pos_hist[k + 1];
        fp += neg_hist[k + 1];
        counts[k] = {tp, fp};
    }
    auto rate = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    for (std::size_t k = 0; k < kRocLevels; ++k) {
        curve.thresholds.push_back(static_cast<double>(k) / static_cast<double>(kRocLevels - 1));
        curve.true_positive_rate.push_back(rate(counts[k].first, n_pos));
        curve.false_positive_rate.push_back(rate(counts[k].second, n_neg));
    }
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    curve.true_positive_rate.push_back(0.0);
    curve.false_positive_rate.push_back(0.0);
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.size() < 2) throw InputError("ROC curve needs at least two points");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double dx = curve.false_positive_rate[i - 1] - curve.false_positive_rate[i];
        area += dx * 0.5 * (curve.true_positive_rate[i - 1] + curve.true_positive_rate[i]);
    }
    return std::abs(area);
}

ImagePlane fixation_density_map(const FixationSet& fixations, std::size_t frame,
                                std::size_t width, std::size_t height, double decay_length) {
    if (!(decay_length > 0.0)) throw InputError("decay length must be positive");
    ImagePlane density(width, height);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& f : fixations.for_frame(frame).records) {
        const Pixel p = fixation_pixel(f, width, height);
        if (!seen.insert({p.x, p.y}).second) continue;
        for (std::size_t y = 0; y < height; ++y) {
            const double dy = static_cast<double>(y) - static_cast<double>(p.y);
            for (std::size_t x = 0; x < width; ++x) {
                const double dx = static_cast<double>(x) - static_cast<double>(p.x);
                density(x, y) += std::exp(-std::hypot(dx, dy) / decay_length);
            }
        }
    }
    const double top = density.max();
    if (top > 0.0) {
        for (double& v : density.values()) v /= top;
    }
    return density;
}

double intersubject_roc(std::span<const FixationSet> subjects, std::size_t frame,
                        std::size_t width, std::size_t height, double decay_length) {
    if (subjects.size() < 2) throw InputError("inter-subject ROC needs at least two subjects");
    double total = 0.0;
    std::size_t scored = 0;
    for (std::size_t held = 0; held < subjects.size(); ++held) {
        if (subjects[held].for_frame(frame).records.empty()) continue;
        FixationSet others;
        for (std::size_t s = 0; s < subjects.size(); ++s) {
            if (s == held) continue;
            const auto frame_records = subjects[s].for_frame(frame).records;
            others.records.insert(others.records.end(), frame_records.begin(),
                                  frame_records.end());
        }
        if (others.records.empty()) continue;
        const ImagePlane map = fixation_density_map(others, frame, width, height, decay_length);
        total += auc(roc_curve(map, subjects[held], frame));
        ++scored;
    }
    if (scored == 0) {
        throw InputError("frame " + std::to_string(frame) +
                         " has fewer than two subjects with fixations");
    }
    return total / static_cast<double>(scored);
}

double nsv(const ImagePlane& map, const Fixation& fixation, std::size_t radius) {
    const Pixel p = fixation_pixel(fixation, map.width(), map.height());
    const std::size_t x0 = p.x >= radius ? p.x - radius : 0;
    const std::size_t y0 = p.y >= radius ? p.y - radius : 0;
    const std::size_t x1 = std::min(map.width() - 1, p.x + radius);
    const std::size_t y1 = std::min(map.height() - 1, p.y + radius);
    double best = map(x0, y0);
    for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) best = std::max(best, map(x, y));
    }
    return best;
}

namespace {

// Unbiased index in [0, n) from raw 64-bit engine output, so results do not
// depend on the standard library's distribution implementation.
std::size_t uniform_index(std::mt19937_64& engine, std::size_t n) {
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = engine();
    while (draw >= limit) draw = engine();
    return static_cast<std::size_t>(draw % range);
}

// Mean taken relative to the first value; exact for a constant sequence.
double shifted_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x - v.front();
    return v.front() + acc / static_cast<double>(v.size());
}

}  // namespace

double cas(const ImagePlane& map, const FixationSet& fixations, std::size_t frame,
           std::size_t radius, std::size_t n_random, std::uint64_t seed) {
    map.validate();
    if (n_random == 0) throw InputError("CAS needs at least one random fixation");
    const FixationSet here = fixations.for_frame(frame);
    if (here.records.empty()) throw InputError("no fixations in frame " + std::to_string(frame));

    std::vector<double> human;
    human.reserve(here.records.size());
    for (const auto& f : here.records) human.push_back(nsv(map, f, radius));

    std::mt19937_64 engine(seed);
    std::vector<double> chance;
    chance.reserve(n_random);
    for (std::size_t i = 0; i < n_random; ++i) {
        Fixation f;
        f.frame = frame;
        f.x = static_cast<double>(uniform_index(engine, map.width()));
        f.y = static_cast<double>(uniform_index(engine, map.height()));
        chance.push_back(nsv(map, f, radius));
    }
    return shifted_mean(human) - shifted_mean(chance);
}

double normxcorr(const ImagePlane& map, const ImagePlane& importance) {
    if (!map.same_shape(importance)) {
        throw InputError("saliency map and importance map differ in shape");
    }
    map.validate();
    importance.validate();
    const double ma = map.mean();
    const double mb = importance.mean();
    const auto a = map.values();
    const auto b = importance.values();
    double num = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        num += da * db;
        saa += da * da;
        sbb += db * db;
    }
    // Tested on the values, since a rounded mean leaves a tiny residual.
    const bool flat_a = map.min() == map.max();
    const bool flat_b = importance.min() == importance.max();
    if (flat_a && flat_b) {
        throw UndefinedError("normalized cross-correlation of two constant maps is undefined");
    }
    if (flat_a || flat_b) return 0.0;
    return std::clamp(num / std::sqrt(saa * sbb), -1.0, 1.0);
}

const ImportanceTable& default_importance_table() {
    static const ImportanceTable table = [] {
        const std::pair<int, const char*> rows[] = {
            {32, "Child"},        {31, "Pedestrian"},      {30, "Animal"},
            {29, "Bicyclist"},    {28, "MotorcycleScooter"}, {27, "CartLuggagePram"},
            {26, "Car"},          {25, "SUVPickupTruck"},  {24, "Truck_Bus"},
            {23, "Train"},        {22, "Misc"},            {21, "LaneMkgsNonDriv"},
            {20, "LaneMkgsDriv"}, {19, "RoadShoulder"},    {18, "Road"},
            {17, "TrafficLight"}, {16, "SignSymbol"},      {15, "TrafficCone"},
            {14, "Column_Pole"},  {13, "Sidewalk"},        {12, "Bridge"},
            {11, "ParkingBlock"}, {10, "Misc_Text"},       {9, "Building"},
            {8, "Fence"},         {7, "Wall"},             {6, "Tree"},
            {5, "VegetationMisc"}, {4, "Void"},            {3, "Archway"},
            {2, "Tunnel"},        {1, "Sky"},
        };
        ImportanceTable t;
        for (const auto& [imp, name] : rows) t[imp] = {name, imp};
        return t;
    }();
    return table;
}

ImagePlane importance_from_labels(const LabelMap& labels, const ImportanceTable& table) {
    if (labels.class_ids.size() != labels.width * labels.height) {
        throw InputError("label map size does not match its dimensions");
    }
    ImagePlane out(labels.width, labels.height);
    auto dst = out.values();
    for (std::size_t i = 0; i < labels.class_ids.size(); ++i) {
        const auto it = table.find(labels.class_ids[i]);
        if (it == table.end()) {
            throw InputError("class id " + std::to_string(labels.class_ids[i]) +
                             " is not in the importance table");
        }
        dst[i] = static_cast<double>(it->second.importance) / kImportanceScale;
    }
    return out;
}

}  // namespace infosal
