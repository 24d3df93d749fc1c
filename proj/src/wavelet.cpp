#include "infosal/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "infosal/errors.hpp"

namespace infosal {

namespace {

// Lifting coefficients of the irreversible 9/7 filter pair.
constexpr double kAlpha = -1.586134342059924;
constexpr double kBeta = -0.052980118572961;
constexpr double kGamma = 0.882911075530934;
constexpr double kDelta = 0.443506852043971;
constexpr double kScale = 1.230174104914001;

// x[i] += a * (x[i-1] + x[i+1]) for i = first, first+2, ..., with whole-sample
// symmetric extension (x[-1] = x[1], x[n] = x[n-2]).
inline void lift(std::span<double> x, std::size_t first, double a) {
    const std::size_t n = x.size();
    std::size_t i = first;
    if (i == 0) {
        x[0] += a * 2.0 * x[1];
        i = 2;
    }
    for (; i + 1 < n; i += 2) x[i] += a * (x[i - 1] + x[i + 1]);
    if (i < n) x[i] += a * 2.0 * x[i - 1];
}

void forward_interleaved(std::span<double> x) {
    lift(x, 1, kAlpha);
    lift(x, 0, kBeta);
    lift(x, 1, kGamma);
    lift(x, 0, kDelta);
}

void inverse_interleaved(std::span<double> x) {
    lift(x, 0, -kDelta);
    lift(x, 1, -kGamma);
    lift(x, 0, -kBeta);
    lift(x, 1, -kAlpha);
}

std::size_t ceil_half(std::size_t n) { return (n + 1) / 2; }

ImagePlane sub_plane(const ImagePlane& src, std::size_t x0, std::size_t y0, std::size_t w,
                     std::size_t h) {
    ImagePlane out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) out(x, y) = src(x0 + x, y0 + y);
    }
    return out;
}

void put_plane(ImagePlane& dst, const ImagePlane& src, std::size_t x0, std::size_t y0) {
    for (std::size_t y = 0; y < src.height(); ++y) {
        for (std::size_t x = 0; x < src.width(); ++x) dst(x0 + x, y0 + y) = src(x, y);
    }
}

// One 2-D level in place over the w x h top-left region of `work`; the result
// is laid out as [LL HL; LH HH].
void analyze_level(ImagePlane& work, std::size_t w, std::size_t h) {
    std::vector<double> line(std::max(w, h));
    std::vector<double> low(ceil_half(std::max(w, h)));
    std::vector<double> high(std::max(w, h) / 2);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) line[x] = work(x, y);
        cdf97_analyze({line.data(), w}, {low.data(), ceil_half(w)}, {high.data(), w / 2});
        for (std::size_t x = 0; x < ceil_half(w); ++x) work(x, y) = low[x];
        for (std::size_t x = 0; x < w / 2; ++x) work(ceil_half(w) + x, y) = high[x];
    }
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < h; ++y) line[y] = work(x, y);
        cdf97_analyze({line.data(), h}, {low.data(), ceil_half(h)}, {high.data(), h / 2});
        for (std::size_t y = 0; y < ceil_half(h); ++y) work(x, y) = low[y];
        for (std::size_t y = 0; y < h / 2; ++y) work(x, ceil_half(h) + y) = high[y];
    }
}

void synthesize_level(ImagePlane& work, std::size_t w, std::size_t h) {
    std::vector<double> line(std::max(w, h));
    std::vector<double> low(ceil_half(std::max(w, h)));
    std::vector<double> high(std::max(w, h) / 2);
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < ceil_half(h); ++y) low[y] = work(x, y);
        for (std::size_t y = 0; y < h / 2; ++y) high[y] = work(x, ceil_half(h) + y);
        cdf97_synthesize({low.data(), ceil_half(h)}, {high.data(), h / 2}, {line.data(), h});
        for (std::size_t y = 0; y < h; ++y) work(x, y) = line[y];
    }
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ceil_half(w); ++x) low[x] = work(x, y);
        for (std::size_t x = 0; x < w / 2; ++x) high[x] = work(ceil_half(w) + x, y);
        cdf97_synthesize({low.data(), ceil_half(w)}, {high.data(), w / 2}, {line.data(), w});
        for (std::size_t x = 0; x < w; ++x) work(x, y) = line[x];
    }
}

// Mean of w^2 over the (2r+1)^2 window around each coefficient, clipped to
// the band.
ImagePlane local_second_moment(const ImagePlane& band, std::size_t radius) {
    const std::size_t w = band.width();
    const std::size_t h = band.height();
    std::vector<double> integral((w + 1) * (h + 1), 0.0);
    for (std::size_t y = 0; y < h; ++y) {
        double row = 0.0;
        for (std::size_t x = 0; x < w; ++x) {
            row += band(x, y) * band(x, y);
            integral[(y + 1) * (w + 1) + x + 1] = integral[y * (w + 1) + x + 1] + row;
        }
    }
    ImagePlane out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t y0 = y >= radius ? y - radius : 0;
        const std::size_t y1 = std::min(h, y + radius + 1);
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t x0 = x >= radius ? x - radius : 0;
            const std::size_t x1 = std::min(w, x + radius + 1);
            const double sum = integral[y1 * (w + 1) + x1] - integral[y0 * (w + 1) + x1] -
                               integral[y1 * (w + 1) + x0] + integral[y0 * (w + 1) + x0];
            out(x, y) = std::max(0.0, sum) / static_cast<double>((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

void shrink_band(ImagePlane& child, const ImagePlane* parent, double noise_sigma) {
    constexpr std::size_t kWindowRadius = 3;  // 7x7
    const ImagePlane moment = local_second_moment(child, kWindowRadius);
    const double noise_var = noise_sigma * noise_sigma;
    const double root3 = std::sqrt(3.0);
    for (std::size_t y = 0; y < child.height(); ++y) {
        for (std::size_t x = 0; x < child.width(); ++x) {
            const double w1 = child(x, y);
            double w2 = 0.0;
            if (parent != nullptr && !parent->empty()) {
                w2 = (*parent)(std::min(x / 2, parent->width() - 1),
                               std::min(y / 2, parent->height() - 1));
            }
            const double r = std::hypot(w1, w2);
            if (r == 0.0) {
                child(x, y) = 0.0;
                continue;
            }
            double threshold = 0.0;
            if (noise_var > 0.0) {
                const double sigma = std::sqrt(std::max(0.0, moment(x, y) - noise_var));
                threshold = sigma > 0.0 ? root3 * noise_var / sigma
                                        : std::numeric_limits<double>::infinity();
            }
            child(x, y) = w1 * std::max(0.0, r - threshold) / r;
        }
    }
}

}  // namespace

void cdf97_analyze(std::span<const double> signal, std::span<double> low,
                   std::span<double> high) {
    const std::size_t n = signal.size();
    if (n < 2) throw InputError("wavelet analysis needs at least 2 samples");
    if (low.size() != ceil_half(n) || high.size() != n / 2) {
        throw InputError("wavelet analysis output spans have the wrong size");
    }
    std::vector<double> x(signal.begin(), signal.end());
    forward_interleaved(x);
    for (std::size_t i = 0; i < low.size(); ++i) low[i] = x[2 * i] / kScale;
    for (std::size_t i = 0; i < high.size(); ++i) high[i] = x[2 * i + 1] * kScale;
}

void cdf97_synthesize(std::span<const double> low, std::span<const double> high,
                      std::span<double> signal) {
    const std::size_t n = signal.size();
    if (n < 2) throw InputError("wavelet synthesis needs at least 2 samples");
    if (low.size() != ceil_half(n) || high.size() != n / 2) {
        throw InputError("wavelet synthesis input spans have the wrong size");
    }
    for (std::size_t i = 0; i < low.size(); ++i) signal[2 * i] = low[i] * kScale;
    for (std::size_t i = 0; i < high.size(); ++i) signal[2 * i + 1] = high[i] / kScale;
    inverse_interleaved(signal);
}

WaveletPyramid cdf97_forward(const ImagePlane& plane, std::size_t levels) {
    plane.validate();
    if (levels == 0) throw InputError("wavelet decomposition needs at least one level");
    const std::size_t min_side = std::min(plane.width(), plane.height());
    if (levels >= 63 || min_side < (std::size_t{1} << levels)) {
        throw InputError("plane " + std::to_string(plane.width()) + "x" +
                         std::to_string(plane.height()) + " is too small for " +
                         std::to_string(levels) + " wavelet levels");
    }
    WaveletPyramid pyr;
    pyr.width = plane.width();
    pyr.height = plane.height();
    ImagePlane work = plane;
    std::size_t w = plane.width();
    std::size_t h = plane.height();
    for (std::size_t level = 0; level < levels; ++level) {
        analyze_level(work, w, h);
        const std::size_t lw = ceil_half(w);
        const std::size_t lh = ceil_half(h);
        pyr.details.push_back({sub_plane(work, 0, lh, lw, h / 2),
                               sub_plane(work, lw, 0, w / 2, lh),
                               sub_plane(work, lw, lh, w / 2, h / 2)});
        w = lw;
        h = lh;
    }
    pyr.approx = sub_plane(work, 0, 0, w, h);
    return pyr;
}

ImagePlane cdf97_inverse(const WaveletPyramid& pyramid) {
    const std::size_t levels = pyramid.levels();
    if (levels == 0) throw InputError("pyramid has no levels");
    std::vector<std::size_t> ws{pyramid.width};
    std::vector<std::size_t> hs{pyramid.height};
    for (std::size_t l = 0; l < levels; ++l) {
        if (ws.back() < 2 || hs.back() < 2) throw InputError("pyramid level too small");
        ws.push_back(ceil_half(ws.back()));
        hs.push_back(ceil_half(hs.back()));
    }
    auto check = [](const ImagePlane& p, std::size_t w, std::size_t h, const char* name) {
        if (p.width() != w || p.height() != h) {
            throw InputError(std::string("subband ") + name + " has inconsistent shape");
        }
    };
    check(pyramid.approx, ws[levels], hs[levels], "LL");
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& d = pyramid.details[l];
        check(d.lh, ws[l + 1], hs[l] / 2, "LH");
        check(d.hl, ws[l] / 2, hs[l + 1], "HL");
        check(d.hh, ws[l] / 2, hs[l] / 2, "HH");
    }

    ImagePlane work(pyramid.width, pyramid.height);
    put_plane(work, pyramid.approx, 0, 0);
    for (std::size_t l = levels; l-- > 0;) {
        const auto& d = pyramid.details[l];
        put_plane(work, d.lh, 0, hs[l + 1]);
        put_plane(work, d.hl, ws[l + 1], 0);
        put_plane(work, d.hh, ws[l + 1], hs[l + 1]);
        synthesize_level(work, ws[l], hs[l]);
    }
    return work;
}

double estimate_noise_sigma(const WaveletPyramid& pyramid) {
    if (pyramid.levels() == 0) throw InputError("pyramid has no levels");
    const auto values = pyramid.details[0].hh.values();
    if (values.empty()) return 0.0;
    std::vector<double> mags(values.size());
    std::transform(values.begin(), values.end(), mags.begin(),
                   [](double v) { return std::abs(v); });
    const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    return *mid / 0.6745;
}

namespace {

// Standard deviation of level-l coefficients (1-D, index l-1) produced by
// unit white noise. The lifting pair is normalized for unit DC gain rather
// than unit energy, so each band sees a different noise level.
struct NoiseGain {
    double low;
    double high;
};

std::vector<NoiseGain> white_noise_gains(std::size_t levels) {
    const std::size_t n = std::size_t{1} << (levels + 5);
    std::vector<NoiseGain> sums(levels, NoiseGain{0.0, 0.0});
    std::vector<double> x(n);
    std::vector<double> low;
    std::vector<double> high;
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(x.begin(), x.end(), 0.0);
        x[k] = 1.0;
        std::vector<double> cur = x;
        for (std::size_t l = 0; l < levels; ++l) {
            low.assign(ceil_half(cur.size()), 0.0);
            high.assign(cur.size() / 2, 0.0);
            cdf97_analyze(cur, low, high);
            const double a = low[low.size() / 2];
            const double b = high[high.size() / 2];
            sums[l].low += a * a;
            sums[l].high += b * b;
            cur = low;
        }
    }
    for (auto& g : sums) {
        g.low = std::sqrt(g.low);
        g.high = std::sqrt(g.high);
    }
    return sums;
}

}  // namespace

WaveletPyramid bivariate_shrink(const WaveletPyramid& pyramid,
                                std::optional<double> noise_sigma) {
    if (pyramid.levels() < 2) {
        throw InputError("bivariate shrinkage needs at least two levels");
    }
    const double sigma_n = noise_sigma.value_or(estimate_noise_sigma(pyramid));
    // sigma_n is in HH_1 units; carry it to each band through the ratio of
    // white-noise gains.
    const auto gains = white_noise_gains(pyramid.levels());
    const double hh1 = gains[0].high * gains[0].high;
    WaveletPyramid out = pyramid;
    // Parents are read from the unshrunk input.
    for (std::size_t l = 1; l < pyramid.levels(); ++l) {
        const bool has_parent = l + 1 < pyramid.levels();
        const DetailBands* parent = has_parent ? &pyramid.details[l + 1] : nullptr;
        auto& child = out.details[l];
        const double mixed = sigma_n * gains[l].low * gains[l].high / hh1;
        const double diag = sigma_n * gains[l].high * gains[l].high / hh1;
        shrink_band(child.lh, parent ? &parent->lh : nullptr, mixed);
        shrink_band(child.hl, parent ? &parent->hl : nullptr, mixed);
        shrink_band(child.hh, parent ? &parent->hh : nullptr, diag);
    }
    return out;
}

namespace {

// Symmetric extension at the borders leaves a small DC residue in a
// detail-only synthesis; the MSF promises a zero-mean output, so remove it.
ImagePlane remove_mean(ImagePlane p) {
    const double m = p.mean();
    for (double& v : p.values()) v -= m;
    return p;
}

void drop_dc_and_finest(WaveletPyramid& pyr) {
    auto zero = [](ImagePlane& p) { std::fill(p.values().begin(), p.values().end(), 0.0); };
    zero(pyr.approx);
    zero(pyr.details[0].lh);
    zero(pyr.details[0].hl);
    zero(pyr.details[0].hh);
}

}  // namespace

ImagePlane msf_filter(const ImagePlane& plane) {
    WaveletPyramid pyr = cdf97_forward(plane, kMsfLevels);
    drop_dc_and_finest(pyr);
    return remove_mean(cdf97_inverse(pyr));
}

ImagePlane msf_denoised(const ImagePlane& plane) {
    WaveletPyramid pyr = cdf97_forward(plane, kMsfLevels);
    const double sigma_n = estimate_noise_sigma(pyr);
    drop_dc_and_finest(pyr);
    return remove_mean(cdf97_inverse(bivariate_shrink(pyr, sigma_n)));
}

}  // namespace infosal
