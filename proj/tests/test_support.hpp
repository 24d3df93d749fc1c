#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infosal/image.hpp"
#include "infosal/kdp_entropy.hpp"

namespace infosal::testing {

inline std::filesystem::path test_data_dir() { return INFOSAL_TEST_DATA; }
inline std::filesystem::path shipped_data_dir() { return INFOSAL_SHIPPED_DATA; }

inline ImagePlane random_plane(std::size_t w, std::size_t h, std::uint64_t seed, double lo = 0.0,
                               double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ImagePlane p(w, h);
    for (double& v : p.values()) v = u(rng);
    return p;
}

// 3x3 box-smoothed uniform noise around 0.5 with the given amplitude,
// quantized to 8 bits.
inline ImagePlane smooth_texture(std::size_t w, std::size_t h, double amplitude, std::uint64_t seed) {
    const ImagePlane noise = random_plane(w, h, seed);
    ImagePlane out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const auto xx = static_cast<std::size_t>(
                        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(x) + dx, 0,
                                                   static_cast<std::ptrdiff_t>(w) - 1));
                    const auto yy = static_cast<std::size_t>(
                        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(y) + dy, 0,
                                                   static_cast<std::ptrdiff_t>(h) - 1));
                    acc += noise(xx, yy);
                    ++n;
                }
            }
            out(x, y) = std::round((0.5 + amplitude * (acc / n - 0.5)) * 255.0) / 255.0;
        }
    }
    return out;
}

// smooth_texture background with a `square`-pixel patch of 2x2-block binary
// texture (0 or 1) at (x0, y0).
inline ImagePlane planted_patch_image(std::size_t w, std::size_t h, std::size_t square, std::size_t x0,
                                      std::size_t y0, std::uint64_t seed = 7, double background = 0.2) {
    ImagePlane img = smooth_texture(w, h, background, seed);
    std::mt19937_64 rng(seed + 1);
    std::bernoulli_distribution coin(0.5);
    const std::size_t blocks = (square + 1) / 2;
    std::vector<double> block(blocks * blocks);
    for (double& b : block) b = coin(rng) ? 1.0 : 0.0;
    for (std::size_t y = 0; y < square; ++y) {
        for (std::size_t x = 0; x < square; ++x) img(x0 + x, y0 + y) = block[(y / 2) * blocks + x / 2];
    }
    return img;
}

struct MovingSquare {
    FrameStack stack;
    std::size_t x0 = 60;
    std::size_t y0 = 80;
    std::size_t square = 12;
    std::size_t step = 4;

    // Trail bounding box grown by `margin` px on every side.
    bool on_trail(std::size_t x, std::size_t y, std::size_t margin = 0) const {
        return x + margin >= x0 && x < x0 + step * (stack.size() - 1) + square + margin &&
               y + margin >= y0 && y < y0 + square + margin;
    }
};

// A textured square moving `step` px right per frame over a static
// smooth_texture background, plus per-frame uniform noise of the given
// peak-to-peak amplitude. Frames are quantized to 8 bits.
inline MovingSquare moving_square(std::size_t frames = 8, double noise = 0.0, std::uint64_t seed = 3,
                                  std::size_t w = 256, std::size_t h = 192) {
    MovingSquare m;
    const ImagePlane background = smooth_texture(w, h, 0.2, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::bernoulli_distribution coin(0.5);
    const std::size_t blocks = (m.square + 1) / 2;
    std::vector<double> block(blocks * blocks);
    for (double& b : block) b = coin(rng) ? 0.9 : 0.1;
    for (std::size_t t = 0; t < frames; ++t) {
        ImagePlane f = background;
        const std::size_t left = m.x0 + m.step * t;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                double v = f(x, y);
                if (x >= left && x < left + m.square && y >= m.y0 && y < m.y0 + m.square) {
                    v = block[((y - m.y0) / 2) * blocks + (x - left) / 2];
                }
                v += noise * u(rng);
                f(x, y) = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
            }
        }
        m.stack.frames.push_back(std::move(f));
    }
    return m;
}

inline double max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

inline double max_abs(const ImagePlane& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double energy(const ImagePlane& a) {
    double e = 0.0;
    for (double v : a.values()) e += v * v;
    return e;
}

inline SampleMatrix columns_to_matrix(const std::vector<std::vector<double>>& cols) {
    SampleMatrix m(cols.front().size(), cols.size());
    for (std::size_t d = 0; d < cols.size(); ++d) {
        std::copy(cols[d].begin(), cols[d].end(), m.column(d).begin());
    }
    return m;
}

// Fixed-bin plug-in estimate of differential entropy: bins span the sample
// range in each dimension; H = -sum p log p + log(bin volume).
inline double histogram_entropy(const SampleMatrix& m, std::size_t bins_per_dim) {
    const std::size_t n = m.n_samples();
    const std::size_t d = m.n_dims();
    std::vector<double> lo(d);
    std::vector<double> width(d);
    double log_bin_volume = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const auto col = m.column(k);
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        lo[k] = *mn;
        width[k] = (*mx - *mn) / static_cast<double>(bins_per_dim);
        log_bin_volume += std::log(width[k]);
    }
    std::size_t cells = 1;
    for (std::size_t k = 0; k < d; ++k) cells *= bins_per_dim;
    std::vector<std::size_t> counts(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t index = 0;
        for (std::size_t k = 0; k < d; ++k) {
            auto b = static_cast<std::size_t>((m.column(k)[i] - lo[k]) / width[k]);
            b = std::min(b, bins_per_dim - 1);
            index = index * bins_per_dim + b;
        }
        ++counts[index];
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h + log_bin_volume;
}

}  // namespace infosal::testing
