#pragma once

// Per-Gaussian projection shared by the parallel and serial splatting kernels.

#include "splatguard/minisplat.hpp"

#include <array>
#include <vector>

namespace splatguard::detail {

inline constexpr double kAlphaMax = 0.99;
inline constexpr double kMaxCondition = 1e12;
inline constexpr double kBoxSigmas = 3.0;

struct Projected {
    int index = 0;             // position in scene.gaussians
    bool valid = false;        // false when skipped as singular
    double cx = 0.0, cy = 0.0; // projected centre incl. view offset
    double cov00 = 0.0, cov01 = 0.0, cov11 = 0.0;
    double inv00 = 0.0, inv01 = 0.0, inv11 = 0.0;
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1; // inclusive pixel box, clipped to canvas
    double opacity = 0.0;
    std::array<double, 3> color{};
    // Cached for the backward pass.
    std::array<double, 4> qhat{};
    double qnorm = 1.0;
    std::array<double, 3> var{}; // s_k^2
    std::array<std::array<double, 3>, 2> rot{}; // first two rows of R
};

/// Projects every Gaussian and returns them sorted front to back.
std::vector<Projected> project(const MiniSplatScene& scene, const View& view, int* skipped);

/// Gradient of the loss w.r.t. one Gaussian's 2D quantities, accumulated over pixels.
struct PixelGrad {
    double mean_x = 0.0, mean_y = 0.0;
    double inv00 = 0.0, inv11 = 0.0, inv01 = 0.0; // inv01 counts both off-diagonal slots
    double opacity = 0.0;                         // w.r.t. activated opacity
    std::array<double, 3> color{};                // w.r.t. activated colour

    PixelGrad& operator+=(const PixelGrad& o);
};

/// One contribution to a pixel recorded during the forward pass.
struct Contribution {
    int slot;      // index into the sorted projected list
    double alpha;
    double transmittance; // before this Gaussian
    double gauss;         // exp(-q/2)
    double dx, dy;        // pixel - centre
    bool clamped;
};

/// Composites one pixel; fills `contribs` when non-null.
std::array<double, 3> shade_pixel(const std::vector<Projected>& proj, const std::array<double, 3>& background,
                                  int px, int py, std::vector<Contribution>* contribs);

/// Back-propagates dL/dC of one pixel into the per-slot accumulators.
void backprop_pixel(const std::vector<Projected>& proj, const std::array<double, 3>& background,
                    const std::vector<Contribution>& contribs, const std::array<double, 3>& dl_dc,
                    std::vector<PixelGrad>& acc);

/// Chains accumulated 2D gradients into the flat parameter gradient.
void chain_to_parameters(const MiniSplatScene& scene, const std::vector<Projected>& proj,
                         const std::vector<PixelGrad>& acc, std::vector<double>& grad);

/// Adds lambda * mean ReLU(nu - tau) and its gradient; returns the unweighted mean.
double add_scale_loss(const MiniSplatScene& scene, double tau, double lambda, std::vector<double>& grad,
                      double* max_nu);

} // namespace splatguard::detail
