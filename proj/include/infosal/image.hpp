#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infosal {

// Row-major 2-D grid of doubles.
class ImagePlane {
public:
    ImagePlane() = default;
    ImagePlane(std::size_t width, std::size_t height, double fill = 0.0);
    ImagePlane(std::size_t width, std::size_t height, std::vector<double> values);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    double operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> row(std::size_t y) noexcept { return {values_.data() + y * width_, width_}; }
    std::span<const double> row(std::size_t y) const noexcept {
        return {values_.data() + y * width_, width_};
    }

    bool same_shape(const ImagePlane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    // Throws InputError on a zero dimension or any non-finite value.
    void validate() const;

    double mean() const;
    double min() const;
    double max() const;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> values_;
};

// Time-ordered frames, oldest first; the last frame is "now".
struct FrameStack {
    std::vector<ImagePlane> frames;
    double period = 1.0;

    std::size_t size() const noexcept { return frames.size(); }
    const ImagePlane& latest() const { return frames.back(); }

    // At least one frame, all frames the same shape.
    void validate() const;
};

}  // namespace infosal
