#pragma once

#include "splatguard/image.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace splatguard {

struct Keypoint {
    int x = 0;
    int y = 0;
    double score = 0.0;
    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

using Descriptor = std::array<std::uint64_t, 4>; // 256 bits

struct KeypointSet {
    std::vector<Keypoint> points;
    std::vector<Descriptor> descriptors;
    std::string source_view;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

struct DetectorParams {
    double fast_threshold = 0.06;
    int max_keypoints = 500;
    double blur_sigma = 2.0;
};

/// FAST-9 corner test on a grayscale plane: true when at least 9 contiguous
/// pixels of the radius-3 Bresenham circle are all brighter than p + t or all
/// darker than p - t. Pixels closer than 3 to the border are never corners.
bool fast9_is_corner(const Plane& gray, int x, int y, double threshold);

/// Sum of (|I_circle - p| - t) over the circle pixels on the winning side;
/// 0 when the pixel is not a corner.
double fast9_score(const Plane& gray, int x, int y, double threshold);

/// Grayscale -> FAST-9 + 3x3 non-maximum suppression -> best max_keypoints by
/// score (ties by row, then column) -> 256-bit BRIEF on a sigma=2 Gaussian-
/// smoothed copy, sampling a fixed 31x31 pattern with edge clamping.
/// Requires at least 32x32; a flat image yields an empty set.
KeypointSet detect_and_describe(const Image& img, const DetectorParams& params = {});

int hamming(const Descriptor& a, const Descriptor& b) noexcept;

struct MatchParams {
    double ratio = 0.8;
};

/// Mutual nearest neighbours under Hamming distance. The ratio test
/// (best < second and best <= ratio * second) is applied in both directions,
/// so the result is symmetric. Pairs are (index in a, index in b), sorted by
/// index in a.
std::vector<std::pair<int, int>> match_pair(const KeypointSet& a, const KeypointSet& b, const MatchParams& params = {});

/// The BRIEF sampling pattern: 256 point pairs (x1, y1, x2, y2), offsets in [-15, 15].
struct BriefPair {
    std::int8_t x1, y1, x2, y2;
};
const std::array<BriefPair, 256>& brief_pattern();

} // namespace splatguard
