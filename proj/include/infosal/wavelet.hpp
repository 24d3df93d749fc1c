#pragma once

// CDF 9/7 biorthogonal wavelet (lifting form), the medium-subband filter
// (MSF) built on it, and parent/child bivariate shrinkage.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "infosal/image.hpp"

namespace infosal {

// Number of decomposition levels used by the MSF: the approximation of level
// 3 and all level-1 details are discarded.
inline constexpr std::size_t kMsfLevels = 3;

// Detail subbands of one level. `hl` is high-pass along x and low-pass along
// y, `lh` the transpose, `hh` high-pass along both.
struct DetailBands {
    ImagePlane lh;
    ImagePlane hl;
    ImagePlane hh;
};

struct WaveletPyramid {
    std::size_t width = 0;   // of the analysed plane
    std::size_t height = 0;
    ImagePlane approx;                 // LL at the coarsest level
    std::vector<DetailBands> details;  // details[0] is level 1 (finest)

    std::size_t levels() const noexcept { return details.size(); }
};

// 1-D analysis of `signal` (size >= 2) into ceil(n/2) low-pass and floor(n/2)
// high-pass coefficients, with whole-sample symmetric extension.
void cdf97_analyze(std::span<const double> signal, std::span<double> low,
                   std::span<double> high);
void cdf97_synthesize(std::span<const double> low, std::span<const double> high,
                      std::span<double> signal);

// Rows then columns per level. Throws InputError when min(width, height) <
// 2^levels or levels == 0.
WaveletPyramid cdf97_forward(const ImagePlane& plane, std::size_t levels);
ImagePlane cdf97_inverse(const WaveletPyramid& pyramid);

// Robust noise estimate median(|HH_1|) / 0.6745.
double estimate_noise_sigma(const WaveletPyramid& pyramid);

// Bivariate shrinkage of levels 2..J against their parents one level coarser
// (level J uses a zero parent). Level-1 details pass through. When
// `noise_sigma` is empty it is estimated from HH_1 of `pyramid`. It is given
// in HH_1 units and rescaled per band by the white-noise gain of the filters.
WaveletPyramid bivariate_shrink(const WaveletPyramid& pyramid,
                                std::optional<double> noise_sigma = std::nullopt);

// Band-pass: 3-level analysis, zero LL_3 and the level-1 details, synthesize,
// subtract the residual mean.
ImagePlane msf_filter(const ImagePlane& plane);

// As msf_filter, with bivariate shrinkage of the surviving detail levels. The
// noise level is measured before the level-1 details are dropped.
ImagePlane msf_denoised(const ImagePlane& plane);

}  // namespace infosal
