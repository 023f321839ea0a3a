#pragma once

#include "splatguard/image.hpp"

#include <array>
#include <string_view>

namespace splatguard {

enum class Subband { LL = 0, LH = 1, HL = 2, HH = 3 };

std::string_view to_string(Subband b);
Subband subband_from_string(std::string_view s);

/// Level-1 Haar subbands of one channel. Each plane is ceil(w/2) x ceil(h/2);
/// orig_width/orig_height record the size before edge-replication padding.
struct SubbandSet {
    Plane ll, lh, hl, hh;
    int orig_width = 0;
    int orig_height = 0;

    const Plane& band(Subband b) const;
    Plane& band(Subband b);
};

using Decomposition = std::array<SubbandSet, Image::kChannels>;

/// Orthonormal single-level 2D Haar transform of one plane. For every
/// disjoint 2x2 block [[a,b],[c,d]]:
///   LL = (a+b+c+d)/2   LH = (a+b-c-d)/2   HL = (a-b+c-d)/2   HH = (a-b-c+d)/2
/// so LH responds to horizontal edges. Odd sizes are padded by edge replication.
SubbandSet haar_forward(const Plane& p);

/// Exact inverse of haar_forward, cropped to orig_width x orig_height. No clamping.
Plane haar_inverse(const SubbandSet& s);

Decomposition dwt2(const Image& img);

/// Inverse transform of all three channels, before the final clamp.
std::array<Plane, Image::kChannels> idwt2_planes(const Decomposition& bands);

/// Inverse transform; samples are clamped into [0,1] as the last step.
Image idwt2(const Decomposition& bands);

/// Removes all detail subbands: idwt2 of (LL, 0, 0, 0). With levels > 1 the
/// LL band is decomposed again and only the deepest LL is kept. At level 1
/// this equals replacing every 2x2 block with its mean.
Image filter_high_freq(const Image& img, int levels = 1);

struct EnergyReport {
    /// Fraction of coefficient energy per subband, indexed by Subband.
    std::array<std::array<double, 4>, Image::kChannels> per_channel{};
    std::array<double, 4> mean{};
    /// Raw sum of squared coefficients per channel and subband.
    std::array<std::array<double, 4>, Image::kChannels> energy{};
    /// Channels whose total energy is zero are excluded from the mean.
    std::array<bool, Image::kChannels> channel_zero{};
};

/// Energy of each level-1 subband over the total across the four subbands.
/// Throws ZeroEnergy for an all-zero image.
EnergyReport energy_report(const Image& img);

struct SubbandVisualization {
    Image image;
    std::array<double, Image::kChannels> min{};
    std::array<double, Image::kChannels> max{};
};

/// Per-channel min-max normalization of a subband triple into an Image at
/// subband resolution. A constant plane maps to 0.5. Planes must be at least 2x2.
SubbandVisualization subband_to_image(const std::array<Plane, Image::kChannels>& band);

/// Convenience: gathers one subband from every channel of a decomposition.
std::array<Plane, Image::kChannels> gather_band(const Decomposition& d, Subband b);

namespace reference {

// Straightforward single-threaded implementations kept for equivalence tests
// and benchmarks.
Decomposition dwt2(const Image& img);
Image idwt2(const Decomposition& bands);
Image filter_high_freq(const Image& img);

} // namespace reference

} // namespace splatguard
