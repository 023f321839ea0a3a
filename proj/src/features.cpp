#include "splatguard/features.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace splatguard {

namespace {

constexpr std::array<std::array<int, 2>, 16> kCircle{{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

constexpr int kArc = 9;
constexpr int kBorder = 3;
constexpr int kPatchHalf = 15;

constexpr std::array<BriefPair, 256> make_brief_pattern() {
    std::array<BriefPair, 256> p{};
    unsigned long long state = 0xB121F;
    auto draw = [&state]() {
        return static_cast<std::int8_t>(static_cast<int>(splitmix64(state) % (2 * kPatchHalf + 1)) - kPatchHalf);
    };
    for (auto& pair : p) {
        pair.x1 = draw();
        pair.y1 = draw();
        pair.x2 = draw();
        pair.y2 = draw();
    }
    return p;
}

constexpr std::array<BriefPair, 256> kBriefPattern = make_brief_pattern();

// Returns +1 (bright arc), -1 (dark arc) or 0.
int segment_test(const Plane& g, int x, int y, double t) {
    if (x < kBorder || y < kBorder || x >= g.width - kBorder || y >= g.height - kBorder) return 0;
    const double p = g.at(x, y);
    std::array<int, 16> state{};
    for (int i = 0; i < 16; ++i) {
        const double v = g.at(x + kCircle[i][0], y + kCircle[i][1]);
        state[i] = v > p + t ? 1 : (v < p - t ? -1 : 0);
    }
    for (int sign : {1, -1}) {
        int run = 0;
        // Walk the circle twice so arcs that wrap around index 0 are counted.
        for (int i = 0; i < 32; ++i) {
            if (state[i % 16] == sign) {
                if (++run >= kArc) return sign;
            } else {
                run = 0;
            }
        }
    }
    return 0;
}

Plane gaussian_blur(const Plane& in, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double s = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        s += k[i + r];
    }
    for (double& v : k) v /= s;
    Plane tmp(in.width, in.height);
    Plane out(in.width, in.height);
    const auto cx = [&](int x) { return std::clamp(x, 0, in.width - 1); };
    const auto cy = [&](int y) { return std::clamp(y, 0, in.height - 1); };
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * in.at(cx(x + i), y);
            tmp.at(x, y) = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(x, cy(y + i));
            out.at(x, y) = acc;
        }
    }
    return out;
}

Descriptor describe(const Plane& smooth, int x, int y) {
    Descriptor d{};
    const auto sample = [&](int dx, int dy) {
        return smooth.at(std::clamp(x + dx, 0, smooth.width - 1), std::clamp(y + dy, 0, smooth.height - 1));
    };
    for (int i = 0; i < 256; ++i) {
        const auto& p = kBriefPattern[i];
        if (sample(p.x1, p.y1) < sample(p.x2, p.y2)) d[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return d;
}

} // namespace

const std::array<BriefPair, 256>& brief_pattern() { return kBriefPattern; }

bool fast9_is_corner(const Plane& gray, int x, int y, double threshold) {
    return segment_test(gray, x, y, threshold) != 0;
}

double fast9_score(const Plane& gray, int x, int y, double threshold) {
    const int sign = segment_test(gray, x, y, threshold);
    if (sign == 0) return 0.0;
    const double p = gray.at(x, y);
    double s = 0.0;
    for (const auto& o : kCircle) {
        const double diff = (gray.at(x + o[0], y + o[1]) - p) * sign;
        if (diff > threshold) s += diff - threshold;
    }
    return s;
}

KeypointSet detect_and_describe(const Image& img, const DetectorParams& params) {
    if (img.width() < 32 || img.height() < 32) {
        throw Error(ErrorKind::TooSmall, "feature detection needs at least 32x32 pixels");
    }
    if (params.max_keypoints < 1) throw Error(ErrorKind::InvalidArgument, "max_keypoints must be >= 1");
    const Plane gray = to_gray(img);
    const int w = gray.width;
    const int h = gray.height;

    Plane score(w, h);
#pragma omp parallel for schedule(static)
    for (int y = kBorder; y < h - kBorder; ++y) {
        for (int x = kBorder; x < w - kBorder; ++x) score.at(x, y) = fast9_score(gray, x, y, params.fast_threshold);
    }

    // 3x3 non-maximum suppression; on equal scores the earlier pixel in
    // raster order survives.
    std::vector<Keypoint> kps;
    for (int y = kBorder; y < h - kBorder; ++y) {
        for (int x = kBorder; x < w - kBorder; ++x) {
            const double s = score.at(x, y);
            if (s <= 0.0) continue;
            bool keep = true;
            for (int dy = -1; dy <= 1 && keep; ++dy) {
                for (int dx = -1; dx <= 1 && keep; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double n = score.at(x + dx, y + dy);
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    keep = earlier ? s > n : s >= n;
                }
            }
            if (keep) kps.push_back({x, y, s});
        }
    }
    std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) { return a.score > b.score; });
    if (static_cast<int>(kps.size()) > params.max_keypoints) kps.resize(static_cast<std::size_t>(params.max_keypoints));

    KeypointSet set;
    set.points = std::move(kps);
    if (set.points.empty()) return set;
    const Plane smooth = gaussian_blur(gray, params.blur_sigma);
    set.descriptors.resize(set.points.size());
    const int n = static_cast<int>(set.points.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) set.descriptors[i] = describe(smooth, set.points[i].x, set.points[i].y);
    return set;
}

int hamming(const Descriptor& a, const Descriptor& b) noexcept {
    int d = 0;
    for (int i = 0; i < 4; ++i) d += std::popcount(a[i] ^ b[i]);
    return d;
}

namespace {

struct Nearest {
    int best_index = -1;
    int best = std::numeric_limits<int>::max();
    int second = std::numeric_limits<int>::max();
};

Nearest nearest(const Descriptor& q, const std::vector<Descriptor>& pool) {
    Nearest r;
    for (int j = 0; j < static_cast<int>(pool.size()); ++j) {
        const int d = hamming(q, pool[j]);
        if (d < r.best) {
            r.second = r.best;
            r.best = d;
            r.best_index = j;
        } else if (d < r.second) {
            r.second = d;
        }
    }
    return r;
}

} // namespace

std::vector<std::pair<int, int>> match_pair(const KeypointSet& a, const KeypointSet& b, const MatchParams& params) {
    std::vector<std::pair<int, int>> out;
    if (a.empty() || b.empty()) return out;
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    std::vector<Nearest> fwd(static_cast<std::size_t>(na));
    std::vector<Nearest> back(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < na; ++i) fwd[i] = nearest(a.descriptors[i], b.descriptors);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < nb; ++j) back[j] = nearest(b.descriptors[j], a.descriptors);
    // Both directions must pass, which keeps match_pair(a,b) and
    // match_pair(b,a) mirror images of each other.
    const auto passes = [&](const Nearest& n) {
        constexpr int kNone = std::numeric_limits<int>::max();
        if (n.best_index < 0) return false;
        if (n.second == kNone) return true; // lone candidate, no ratio to test
        return n.best < n.second && n.best <= params.ratio * n.second;
    };
    for (int i = 0; i < na; ++i) {
        const Nearest& f = fwd[i];
        if (!passes(f)) continue;
        const Nearest& r = back[f.best_index];
        if (r.best_index == i && passes(r)) out.emplace_back(i, f.best_index);
    }
    return out;
}

} // namespace splatguard
