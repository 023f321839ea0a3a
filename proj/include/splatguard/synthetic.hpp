#pragma once

#include "splatguard/image.hpp"
#include "splatguard/minisplat.hpp"
#include "splatguard/pose.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace splatguard {

/// Piecewise-constant colour rectangles over a smooth shading ramp: plenty of
/// corners at full and half resolution.
Image textured_world(int size, std::uint64_t seed);

struct SyntheticViews {
    std::vector<std::string> names; // dataset order (shuffled relative to the path)
    std::vector<Image> images;
    std::vector<CameraPose> poses;  // same order as names
};

/// `count` crops of a textured world taken along a smooth camera path. Crop
/// offsets are even so neighbouring views share exact half-resolution content.
/// Poses rotate slowly about z and translate with the crop offset.
SyntheticViews synthetic_views(int count, int view_size, std::uint64_t seed);

/// COLMAP images.txt text for the poses (empty POINTS2D lines).
std::string colmap_images_text(const std::vector<CameraPose>& poses);

/// Random smooth Gaussians used as ground truth for fitting experiments.
MiniSplatScene synthetic_splat_scene(int count, int width, int height, std::uint64_t seed);

/// Smooth colour ramps with a low-frequency bump; nearly all of its wavelet
/// energy sits in LL.
Image smooth_image(int width, int height);

/// White horizontal bar two pixels thick spanning most of a black canvas.
Image thin_bar_image(int width, int height);

/// Unit-scale isotropic Gaussians spread along the bar's centre line.
MiniSplatScene thin_bar_initial_scene(int count, int width, int height, std::uint64_t seed);

} // namespace splatguard
