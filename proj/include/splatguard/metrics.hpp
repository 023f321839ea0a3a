#pragma once

#include "splatguard/image.hpp"

#include <limits>

namespace splatguard {

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10*log10(1/MSE) over all samples of all channels. Returns kPsnrIdentical
/// when the images are equal.
double psnr(const Image& a, const Image& b);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM with a Gaussian window, evaluated at every position where the
/// window fits inside the image, averaged over the three channels.
/// Requires both images to be at least window x window.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

} // namespace splatguard
