// Serial reference for the Haar kernels. Written as the plain textbook loop
// so the parallel path in wavelet.cpp can be checked against it bit for bit.

#include "splatguard/wavelet.hpp"

#include <algorithm>

namespace splatguard::reference {

namespace {

double sample_replicated(const Image& img, int c, int x, int y) {
    return img.at(c, std::min(x, img.width() - 1), std::min(y, img.height() - 1));
}

} // namespace

Decomposition dwt2(const Image& img) {
    const int hw = (img.width() + 1) / 2;
    const int hh = (img.height() + 1) / 2;
    Decomposition d;
    for (int c = 0; c < Image::kChannels; ++c) {
        SubbandSet& s = d[c];
        s.ll = Plane(hw, hh);
        s.lh = Plane(hw, hh);
        s.hl = Plane(hw, hh);
        s.hh = Plane(hw, hh);
        s.orig_width = img.width();
        s.orig_height = img.height();
        for (int j = 0; j < hh; ++j) {
            for (int i = 0; i < hw; ++i) {
                const double a = sample_replicated(img, c, 2 * i, 2 * j);
                const double b = sample_replicated(img, c, 2 * i + 1, 2 * j);
                const double cc = sample_replicated(img, c, 2 * i, 2 * j + 1);
                const double dd = sample_replicated(img, c, 2 * i + 1, 2 * j + 1);
                s.ll.at(i, j) = (a + b + cc + dd) * 0.5;
                s.lh.at(i, j) = (a + b - cc - dd) * 0.5;
                s.hl.at(i, j) = (a - b + cc - dd) * 0.5;
                s.hh.at(i, j) = (a - b - cc + dd) * 0.5;
            }
        }
    }
    return d;
}

Image idwt2(const Decomposition& bands) {
    const int w = bands[0].orig_width;
    const int h = bands[0].orig_height;
    std::array<std::vector<double>, Image::kChannels> out;
    for (int c = 0; c < Image::kChannels; ++c) {
        const SubbandSet& s = bands[c];
        Plane full(2 * s.ll.width, 2 * s.ll.height);
        for (int j = 0; j < s.ll.height; ++j) {
            for (int i = 0; i < s.ll.width; ++i) {
                const double ll = s.ll.at(i, j);
                const double lh = s.lh.at(i, j);
                const double hl = s.hl.at(i, j);
                const double hh = s.hh.at(i, j);
                full.at(2 * i, 2 * j) = (ll + lh + hl + hh) * 0.5;
                full.at(2 * i + 1, 2 * j) = (ll + lh - hl - hh) * 0.5;
                full.at(2 * i, 2 * j + 1) = (ll - lh + hl - hh) * 0.5;
                full.at(2 * i + 1, 2 * j + 1) = (ll - lh - hl + hh) * 0.5;
            }
        }
        out[c].resize(static_cast<std::size_t>(w) * h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) out[c][static_cast<std::size_t>(y) * w + x] = full.at(x, y);
        }
    }
    return Image::from_planes(w, h, std::move(out));
}

Image filter_high_freq(const Image& img) {
    Decomposition d = reference::dwt2(img);
    for (auto& s : d) {
        std::fill(s.lh.data.begin(), s.lh.data.end(), 0.0);
        std::fill(s.hl.data.begin(), s.hl.data.end(), 0.0);
        std::fill(s.hh.data.begin(), s.hh.data.end(), 0.0);
    }
    return reference::idwt2(d);
}

} // namespace splatguard::reference
