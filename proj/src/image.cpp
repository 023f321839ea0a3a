#include "splatguard/image.hpp"

#include "splatguard/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace splatguard {

Plane::Plane(int w, int h, double fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

double clamp_unit(double v) noexcept {
    if (!(v >= 0.0)) return 0.0; // also catches NaN
    return v > 1.0 ? 1.0 : v;
}

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 2 || height < 2) {
        throw Error(ErrorKind::TooSmall,
                    "image must be at least 2x2, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    const double v = clamp_unit(fill);
    for (auto& p : planes_) p.assign(pixel_count(), v);
}

Image Image::from_planes(int width, int height, std::array<std::vector<double>, kChannels> planes) {
    Image img(width, height);
    for (int c = 0; c < kChannels; ++c) {
        if (planes[c].size() != img.pixel_count()) {
            throw Error(ErrorKind::DimensionMismatch, "plane " + std::to_string(c) + " has " +
                                                          std::to_string(planes[c].size()) + " samples, expected " +
                                                          std::to_string(img.pixel_count()));
        }
        for (double& s : planes[c]) s = clamp_unit(s);
        img.planes_[c] = std::move(planes[c]);
    }
    return img;
}

void Image::set(int c, int x, int y, double v) {
    planes_[c][static_cast<std::size_t>(y) * width_ + x] = clamp_unit(v);
}

Plane Image::plane_copy(int c) const {
    Plane p(width_, height_);
    p.data = planes_[c];
    return p;
}

double max_abs_diff(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff: image sizes differ");
    double m = 0.0;
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto pa = a.plane(c);
        const auto pb = b.plane(c);
        for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::abs(pa[i] - pb[i]));
    }
    return m;
}

double mean_abs_diff(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw Error(ErrorKind::DimensionMismatch, "mean_abs_diff: image sizes differ");
    double s = 0.0;
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto pa = a.plane(c);
        const auto pb = b.plane(c);
        for (std::size_t i = 0; i < pa.size(); ++i) s += std::abs(pa[i] - pb[i]);
    }
    return s / (3.0 * static_cast<double>(a.pixel_count()));
}

Plane to_gray(const Image& img) {
    Plane g(img.width(), img.height());
    const auto r = img.plane(0);
    const auto gr = img.plane(1);
    const auto b = img.plane(2);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = 0.299 * r[i] + 0.587 * gr[i] + 0.114 * b[i];
    return g;
}

Image quantize_8bit(const Image& img) {
    std::array<std::vector<double>, Image::kChannels> planes;
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto src = img.plane(c);
        planes[c].resize(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) planes[c][i] = std::floor(src[i] * 255.0 + 0.5) / 255.0;
    }
    return Image::from_planes(img.width(), img.height(), std::move(planes));
}

} // namespace splatguard
