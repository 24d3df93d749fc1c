#include "infosal/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "infosal/errors.hpp"

namespace infosal {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {}

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != width_ * height_) {
        throw InputError("plane value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(width_) + "x" +
                         std::to_string(height_));
    }
}

void ImagePlane::validate() const {
    if (width_ == 0 || height_ == 0) throw InputError("plane has a zero dimension");
    for (double v : values_) {
        if (!std::isfinite(v)) throw InputError("plane contains a non-finite value");
    }
}

double ImagePlane::mean() const {
    if (values_.empty()) return 0.0;
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

double ImagePlane::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ImagePlane::max() const { return *std::max_element(values_.begin(), values_.end()); }

void FrameStack::validate() const {
    if (frames.empty()) throw InputError("frame stack is empty");
    for (const auto& f : frames) {
        f.validate();
        if (!f.same_shape(frames.front())) throw InputError("frames differ in shape");
    }
}

}  // namespace infosal
