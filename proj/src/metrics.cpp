#include "splatguard/metrics.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace splatguard {

double psnr(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw Error(ErrorKind::DimensionMismatch, "psnr: image sizes differ");
    std::vector<double> sq;
    sq.reserve(a.pixel_count() * 3);
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto pa = a.plane(c);
        const auto pb = b.plane(c);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = pa[i] - pb[i];
            sq.push_back(d * d);
        }
    }
    const double mse = pairwise_sum(sq) / static_cast<double>(sq.size());
    if (mse == 0.0) return kPsnrIdentical;
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const double c = (size - 1) / 2.0;
    double s = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - c;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        s += w[i];
    }
    for (double& v : w) v /= s;
    return w;
}

// Separable "valid" correlation: output is (W-k+1) x (H-k+1).
Plane filter_valid(const Plane& in, const std::vector<double>& k) {
    const int ks = static_cast<int>(k.size());
    const int ow = in.width - ks + 1;
    const int oh = in.height - ks + 1;
    Plane tmp(ow, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < ks; ++i) s += k[i] * in.at(x + i, y);
            tmp.at(x, y) = s;
        }
    }
    Plane out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < ks; ++i) s += k[i] * tmp.at(x, y + i);
            out.at(x, y) = s;
        }
    }
    return out;
}

double ssim_channel(const Plane& x, const Plane& y, const std::vector<double>& k, const SsimParams& p) {
    Plane xx(x.width, x.height), yy(x.width, x.height), xy(x.width, x.height);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx.data[i] = x.data[i] * x.data[i];
        yy.data[i] = y.data[i] * y.data[i];
        xy.data[i] = x.data[i] * y.data[i];
    }
    const Plane mx = filter_valid(x, k);
    const Plane my = filter_valid(y, k);
    const Plane sxx = filter_valid(xx, k);
    const Plane syy = filter_valid(yy, k);
    const Plane sxy = filter_valid(xy, k);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    std::vector<double> map(mx.size());
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double mux = mx.data[i];
        const double muy = my.data[i];
        const double vx = sxx.data[i] - mux * mux;
        const double vy = syy.data[i] - muy * muy;
        const double cov = sxy.data[i] - mux * muy;
        map[i] = ((2.0 * mux * muy + c1) * (2.0 * cov + c2)) / ((mux * mux + muy * muy + c1) * (vx + vy + c2));
    }
    return pairwise_sum(map) / static_cast<double>(map.size());
}

} // namespace

double ssim(const Image& a, const Image& b, const SsimParams& params) {
    if (!a.same_size(b)) throw Error(ErrorKind::DimensionMismatch, "ssim: image sizes differ");
    if (a.width() < params.window || a.height() < params.window) {
        throw Error(ErrorKind::TooSmall, "ssim needs at least " + std::to_string(params.window) + "x" +
                                             std::to_string(params.window) + " pixels");
    }
    const auto k = gaussian_window(params.window, params.sigma);
    std::array<double, Image::kChannels> per_channel{};
#pragma omp parallel for schedule(static)
    for (int c = 0; c < Image::kChannels; ++c) {
        per_channel[c] = ssim_channel(a.plane_copy(c), b.plane_copy(c), k, params);
    }
    return (per_channel[0] + per_channel[1] + per_channel[2]) / 3.0;
}

} // namespace splatguard
