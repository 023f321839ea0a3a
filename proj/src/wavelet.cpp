#include "splatguard/wavelet.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace splatguard {

std::string_view to_string(Subband b) {
    switch (b) {
    case Subband::LL: return "LL";
    case Subband::LH: return "LH";
    case Subband::HL: return "HL";
    case Subband::HH: return "HH";
    }
    return "?";
}

Subband subband_from_string(std::string_view s) {
    if (s == "LL" || s == "ll") return Subband::LL;
    if (s == "LH" || s == "lh") return Subband::LH;
    if (s == "HL" || s == "hl") return Subband::HL;
    if (s == "HH" || s == "hh") return Subband::HH;
    throw Error(ErrorKind::InvalidArgument, "unknown subband '" + std::string(s) + "'");
}

const Plane& SubbandSet::band(Subband b) const {
    switch (b) {
    case Subband::LL: return ll;
    case Subband::LH: return lh;
    case Subband::HL: return hl;
    case Subband::HH: return hh;
    }
    return ll;
}

Plane& SubbandSet::band(Subband b) {
    return const_cast<Plane&>(static_cast<const SubbandSet&>(*this).band(b));
}

namespace {

// Row pass over subband rows [y0, y1) of a width x height sample grid.
// Padding replicates the last column/row.
void forward_rows(const double* p, int width, int height, SubbandSet& s, int y0, int y1) {
    const int hw = s.ll.width;
    const int xmax = width - 1;
    const int ymax = height - 1;
    const auto at = [&](int x, int y) { return p[static_cast<std::size_t>(y) * width + x]; };
    for (int j = y0; j < y1; ++j) {
        const int ya = std::min(2 * j, ymax);
        const int yb = std::min(2 * j + 1, ymax);
        for (int i = 0; i < hw; ++i) {
            const int xa = std::min(2 * i, xmax);
            const int xb = std::min(2 * i + 1, xmax);
            const double a = at(xa, ya);
            const double b = at(xb, ya);
            const double c = at(xa, yb);
            const double d = at(xb, yb);
            s.ll.at(i, j) = (a + b + c + d) * 0.5;
            s.lh.at(i, j) = (a + b - c - d) * 0.5;
            s.hl.at(i, j) = (a - b + c - d) * 0.5;
            s.hh.at(i, j) = (a - b - c + d) * 0.5;
        }
    }
}

void inverse_rows(const SubbandSet& s, Plane& out, int y0, int y1) {
    const int hw = s.ll.width;
    for (int j = y0; j < y1; ++j) {
        for (int i = 0; i < hw; ++i) {
            const double ll = s.ll.at(i, j);
            const double lh = s.lh.at(i, j);
            const double hl = s.hl.at(i, j);
            const double hh = s.hh.at(i, j);
            const int x = 2 * i;
            const int y = 2 * j;
            const double a = (ll + lh + hl + hh) * 0.5;
            const double b = (ll + lh - hl - hh) * 0.5;
            const double c = (ll - lh + hl - hh) * 0.5;
            const double d = (ll - lh - hl + hh) * 0.5;
            // Padded samples fall outside the crop and are dropped.
            if (y < out.height) {
                out.at(x, y) = a;
                if (x + 1 < out.width) out.at(x + 1, y) = b;
            }
            if (y + 1 < out.height) {
                out.at(x, y + 1) = c;
                if (x + 1 < out.width) out.at(x + 1, y + 1) = d;
            }
        }
    }
}

SubbandSet alloc_bands(int w, int h) {
    const int hw = (w + 1) / 2;
    const int hh = (h + 1) / 2;
    SubbandSet s;
    s.ll = Plane(hw, hh);
    s.lh = Plane(hw, hh);
    s.hl = Plane(hw, hh);
    s.hh = Plane(hw, hh);
    s.orig_width = w;
    s.orig_height = h;
    return s;
}

void check_bands(const SubbandSet& s) {
    const auto same = [&](const Plane& p) { return p.width == s.ll.width && p.height == s.ll.height; };
    if (!same(s.lh) || !same(s.hl) || !same(s.hh)) {
        throw Error(ErrorKind::DimensionMismatch, "subband planes differ in size");
    }
    if (s.ll.width != (s.orig_width + 1) / 2 || s.ll.height != (s.orig_height + 1) / 2) {
        throw Error(ErrorKind::DimensionMismatch, "subband size does not match recorded original size");
    }
    if (s.ll.size() != static_cast<std::size_t>(s.ll.width) * s.ll.height) {
        throw Error(ErrorKind::DimensionMismatch, "subband plane storage has wrong length");
    }
}

Plane filter_plane(const Plane& p, int levels) {
    if (levels <= 0) return p;
    SubbandSet s = haar_forward(p);
    s.ll = filter_plane(s.ll, levels - 1);
    std::fill(s.lh.data.begin(), s.lh.data.end(), 0.0);
    std::fill(s.hl.data.begin(), s.hl.data.end(), 0.0);
    std::fill(s.hh.data.begin(), s.hh.data.end(), 0.0);
    return haar_inverse(s);
}

} // namespace

SubbandSet haar_forward(const Plane& p) {
    if (p.width < 1 || p.height < 1) throw Error(ErrorKind::TooSmall, "haar_forward on empty plane");
    SubbandSet s = alloc_bands(p.width, p.height);
    const int hh = s.ll.height;
#pragma omp parallel for schedule(static) if (hh >= 64)
    for (int j = 0; j < hh; ++j) forward_rows(p.data.data(), p.width, p.height, s, j, j + 1);
    return s;
}

Plane haar_inverse(const SubbandSet& s) {
    check_bands(s);
    Plane out(s.orig_width, s.orig_height);
    const int hh = s.ll.height;
#pragma omp parallel for schedule(static) if (hh >= 64)
    for (int j = 0; j < hh; ++j) inverse_rows(s, out, j, j + 1);
    return out;
}

Decomposition dwt2(const Image& img) {
    Decomposition d;
    for (int c = 0; c < Image::kChannels; ++c) d[c] = alloc_bands(img.width(), img.height());
    const int hh = d[0].ll.height;
    // Flattened channel x row loop: every iteration writes a disjoint row.
#pragma omp parallel for schedule(static)
    for (int k = 0; k < Image::kChannels * hh; ++k) {
        const int c = k / hh;
        const int j = k % hh;
        forward_rows(img.plane(c).data(), img.width(), img.height(), d[c], j, j + 1);
    }
    return d;
}

std::array<Plane, Image::kChannels> idwt2_planes(const Decomposition& bands) {
    std::array<Plane, Image::kChannels> out;
    for (int c = 0; c < Image::kChannels; ++c) {
        check_bands(bands[c]);
        if (bands[c].orig_width != bands[0].orig_width || bands[c].orig_height != bands[0].orig_height) {
            throw Error(ErrorKind::DimensionMismatch, "channels disagree on image size");
        }
        out[c] = Plane(bands[c].orig_width, bands[c].orig_height);
    }
    const int hh = bands[0].ll.height;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < Image::kChannels * hh; ++k) {
        const int c = k / hh;
        const int j = k % hh;
        inverse_rows(bands[c], out[c], j, j + 1);
    }
    return out;
}

Image idwt2(const Decomposition& bands) {
    auto planes = idwt2_planes(bands);
    std::array<std::vector<double>, Image::kChannels> data;
    for (int c = 0; c < Image::kChannels; ++c) data[c] = std::move(planes[c].data);
    return Image::from_planes(bands[0].orig_width, bands[0].orig_height, std::move(data));
}

Image filter_high_freq(const Image& img, int levels) {
    if (levels < 1) throw Error(ErrorKind::InvalidArgument, "wavelet level must be >= 1");
    if (levels == 1) {
        Decomposition d = dwt2(img);
        for (auto& s : d) {
            std::fill(s.lh.data.begin(), s.lh.data.end(), 0.0);
            std::fill(s.hl.data.begin(), s.hl.data.end(), 0.0);
            std::fill(s.hh.data.begin(), s.hh.data.end(), 0.0);
        }
        return idwt2(d);
    }
    std::array<std::vector<double>, Image::kChannels> data;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < Image::kChannels; ++c) data[c] = filter_plane(img.plane_copy(c), levels).data;
    return Image::from_planes(img.width(), img.height(), std::move(data));
}

EnergyReport energy_report(const Image& img) {
    const Decomposition d = dwt2(img);
    EnergyReport r;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < Image::kChannels * 4; ++k) {
        const int c = k / 4;
        const auto& plane = d[c].band(static_cast<Subband>(k % 4));
        std::vector<double> sq(plane.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = plane.data[i] * plane.data[i];
        r.energy[c][k % 4] = pairwise_sum(sq);
    }
    int live = 0;
    for (int c = 0; c < Image::kChannels; ++c) {
        const double total = r.energy[c][0] + r.energy[c][1] + r.energy[c][2] + r.energy[c][3];
        r.channel_zero[c] = total == 0.0;
        if (r.channel_zero[c]) continue;
        ++live;
        for (int b = 0; b < 4; ++b) r.per_channel[c][b] = r.energy[c][b] / total;
    }
    if (live == 0) throw Error(ErrorKind::ZeroEnergy, "energy_report on an all-zero image");
    for (int b = 0; b < 4; ++b) {
        double s = 0.0;
        for (int c = 0; c < Image::kChannels; ++c) s += r.per_channel[c][b];
        r.mean[b] = s / live;
    }
    return r;
}

SubbandVisualization subband_to_image(const std::array<Plane, Image::kChannels>& band) {
    const int w = band[0].width;
    const int h = band[0].height;
    for (const auto& p : band) {
        if (p.width != w || p.height != h || p.size() != static_cast<std::size_t>(w) * h) {
            throw Error(ErrorKind::DimensionMismatch, "subband planes differ in size");
        }
    }
    if (w < 2 || h < 2) throw Error(ErrorKind::TooSmall, "subband visualization needs a plane of at least 2x2");
    SubbandVisualization vis{Image(w, h), {}, {}};
    std::array<std::vector<double>, Image::kChannels> out;
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto [lo, hi] = std::minmax_element(band[c].data.begin(), band[c].data.end());
        vis.min[c] = *lo;
        vis.max[c] = *hi;
        const double range = *hi - *lo;
        out[c].resize(band[c].size());
        for (std::size_t i = 0; i < out[c].size(); ++i) {
            out[c][i] = range > 0.0 ? (band[c].data[i] - *lo) / range : 0.5;
        }
    }
    vis.image = Image::from_planes(w, h, std::move(out));
    return vis;
}

std::array<Plane, Image::kChannels> gather_band(const Decomposition& d, Subband b) {
    return {d[0].band(b), d[1].band(b), d[2].band(b)};
}

} // namespace splatguard
