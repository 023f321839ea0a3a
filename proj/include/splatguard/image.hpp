#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace splatguard {

/// Single-channel row-major raster of doubles. Unlike Image, values are not
/// range-restricted; wavelet coefficients and intermediate buffers live here.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0);

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

/// Planar RGB image with samples in [0,1]. Width and height are at least 2.
class Image {
public:
    static constexpr int kChannels = 3;

    Image(int width, int height, double fill = 0.0);

    /// Builds an image from three planes of width*height samples. Samples are
    /// clamped into [0,1]; NaN maps to 0.
    static Image from_planes(int width, int height, std::array<std::vector<double>, kChannels> planes);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    double at(int c, int x, int y) const { return planes_[c][static_cast<std::size_t>(y) * width_ + x]; }
    void set(int c, int x, int y, double v);

    std::span<const double> plane(int c) const { return planes_[c]; }
    Plane plane_copy(int c) const;

    bool same_size(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_;
    int height_;
    std::array<std::vector<double>, kChannels> planes_;
};

double clamp_unit(double v) noexcept;

/// Largest absolute per-sample difference across all channels.
double max_abs_diff(const Image& a, const Image& b);

/// Mean absolute per-sample difference across all channels.
double mean_abs_diff(const Image& a, const Image& b);

/// Luma (0.299R + 0.587G + 0.114B).
Plane to_gray(const Image& img);

/// Rounds every sample to the nearest multiple of 1/255 (round-half-up), the
/// same quantization an 8-bit PNG write applies.
Image quantize_8bit(const Image& img);

} // namespace splatguard
