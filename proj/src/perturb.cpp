#include "splatguard/perturb.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace splatguard {

std::string_view to_string(PerturbMode m) {
    switch (m) {
    case PerturbMode::Uniform: return "uniform";
    case PerturbMode::Checker: return "checker";
    case PerturbMode::PerViewIndependent: return "per-view-independent";
    }
    return "?";
}

PerturbMode perturb_mode_from_string(std::string_view s) {
    if (s == "uniform") return PerturbMode::Uniform;
    if (s == "checker") return PerturbMode::Checker;
    if (s == "per-view-independent" || s == "per_view_independent") return PerturbMode::PerViewIndependent;
    throw Error(ErrorKind::InvalidArgument, "unknown perturbation mode '" + std::string(s) + "'");
}

namespace {

Image add_uniform(const Image& img, double eps, std::uint64_t seed) {
    Rng rng(seed);
    std::array<std::vector<double>, Image::kChannels> planes;
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto src = img.plane(c);
        planes[c].assign(src.begin(), src.end());
        for (double& s : planes[c]) s += rng.uniform(-eps, eps);
    }
    return Image::from_planes(img.width(), img.height(), std::move(planes));
}

Image add_checker(const Image& img, double eps) {
    std::array<std::vector<double>, Image::kChannels> planes;
    const int w = img.width();
    const int h = img.height();
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto src = img.plane(c);
        planes[c].assign(src.begin(), src.end());
        auto& p = planes[c];
        for (int by = 0; by + 1 < h; by += 2) {
            for (int bx = 0; bx + 1 < w; bx += 2) {
                const std::size_t i00 = static_cast<std::size_t>(by) * w + bx;
                const std::size_t i01 = i00 + 1;
                const std::size_t i10 = i00 + w;
                const std::size_t i11 = i10 + 1;
                // (+) cells go up, (-) cells go down.
                const double room = std::min({eps, 1.0 - p[i00], 1.0 - p[i11], p[i01], p[i10]});
                const double a = std::max(0.0, room);
                p[i00] += a;
                p[i11] += a;
                p[i01] -= a;
                p[i10] -= a;
            }
        }
    }
    return Image::from_planes(w, h, std::move(planes));
}

} // namespace

Image perturb(const Image& img, PerturbMode mode, double eps, std::uint64_t seed, int view_index) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in [0, 1]");
    if (eps == 0.0) return img;
    switch (mode) {
    case PerturbMode::Uniform: return add_uniform(img, eps, seed);
    case PerturbMode::Checker: return add_checker(img, eps);
    case PerturbMode::PerViewIndependent: {
        unsigned long long s = seed ^ (0xA24BAED4963EE407ULL * static_cast<unsigned long long>(view_index + 1));
        return add_uniform(img, eps, splitmix64(s));
    }
    }
    return img;
}

} // namespace splatguard
