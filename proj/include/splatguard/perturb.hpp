#pragma once

#include "splatguard/image.hpp"

#include <cstdint>
#include <string_view>

namespace splatguard {

enum class PerturbMode {
    Uniform,            // i.i.d. noise in [-eps, eps], clamped to [0,1]
    Checker,            // 2x2-block-aligned zero-mean checkerboard
    PerViewIndependent, // Uniform with a view-indexed seed
};

std::string_view to_string(PerturbMode m);
PerturbMode perturb_mode_from_string(std::string_view s);

inline constexpr double kDefaultEpsilon = 16.0 / 255.0;

/// Synthetic high-frequency perturbation of amplitude eps in [0,1].
///
/// Checker adds +a, -a, -a, +a to the pixels of each full 2x2 block (per
/// channel), where a = eps unless the block lacks headroom, in which case a
/// shrinks to the largest value that keeps all four samples in [0,1]. Every
/// block therefore keeps its mean, so the perturbation lives entirely in the
/// detail subbands. Incomplete blocks at odd borders are left untouched.
Image perturb(const Image& img, PerturbMode mode, double eps, std::uint64_t seed, int view_index = 0);

} // namespace splatguard
