#pragma once

#include "splatguard/gsply.hpp"
#include "splatguard/image.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace splatguard {

/// One optimizable 3D Gaussian. Position is in pixel units (x right, y down,
/// z depth; smaller z is in front). Scales, colour and opacity are stored
/// pre-activation: exp for scales, sigmoid for colour and opacity.
struct MiniGaussian {
    std::array<double, 3> position{};
    std::array<double, 3> log_scales{};
    std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0}; // (w, x, y, z), normalized before use
    std::array<double, 3> color_logit{};
    double opacity_logit = 0.0;

    std::array<double, 3> scales() const;
    std::array<double, 3> color() const;
    double opacity() const;
};

/// Flat parameter layout of one Gaussian inside gradient / optimizer vectors.
struct ParamLayout {
    static constexpr int kPosition = 0;  // 3
    static constexpr int kLogScale = 3;  // 3
    static constexpr int kRotation = 6;  // 4
    static constexpr int kColor = 10;    // 3
    static constexpr int kOpacity = 13;  // 1
    static constexpr int kCount = 14;
};

struct MiniSplatScene {
    std::vector<MiniGaussian> gaussians;
    int width = 0;
    int height = 0;
    std::array<double, 3> background{0.0, 0.0, 0.0};

    /// Throws InvalidArgument unless there is at least one Gaussian and the
    /// canvas is at least 8x8.
    void validate() const;

    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& p);
};

double sigmoid(double x) noexcept;
double logit(double p) noexcept;

/// A training view: the scene is shifted by `offset` (pixels) before rendering,
/// a minimal stand-in for camera motion.
struct View {
    std::array<double, 2> offset{0.0, 0.0};
};

struct RenderStats {
    int skipped_singular = 0; // Gaussians whose 2D covariance is too ill-conditioned
};

/// Orthographic splatting: the 2D covariance is the top-left 2x2 block of
/// R diag(s^2) R^T; per pixel, alpha = min(o * exp(-d^T S^-1 d / 2), 0.99),
/// front-to-back compositing by ascending z (ties by index) over the
/// background. Each Gaussian only touches pixels inside its 3-sigma box.
/// Pixel (px, py) is sampled at coordinates (px, py).
Image render(const MiniSplatScene& scene, const View& view = {}, RenderStats* stats = nullptr);

struct LearningRates {
    double position = 0.05;
    double log_scale = 0.02;
    double rotation = 0.01;
    double color = 0.05;
    double opacity = 0.05;
};

struct TrainConfig {
    int iterations = 1000;
    LearningRates lr{};
    double lambda_scale = kDefaultLambdaScale;
    double tau = kDefaultTau;
    std::uint64_t seed = 0;
    /// Scale loss is applied from this iteration on (0 = every iteration).
    int scale_warmup = 0;
    /// SSIM is reported in traces only; it is never optimized.
    bool track_ssim = true;

    void validate() const;
};

struct TargetView {
    Image image;
    View view{};
};

struct LossTerms {
    double l1 = 0.0;          // mean absolute error, averaged over views
    double scale_loss = 0.0;  // mean_i max(0, nu_i - tau), before lambda
    double total = 0.0;       // l1 + lambda * scale_loss (when active)
    double max_nu = 0.0;
};

struct LossResult {
    LossTerms terms;
    std::vector<double> gradient; // ParamLayout::kCount per Gaussian
    std::vector<Image> renders;   // one per target view
};

/// L1 photometric loss over all views plus lambda * mean ReLU(nu - tau), with
/// analytic gradients through compositing, projection, activations and
/// quaternion normalization. `apply_scale_loss` = false drops the scale term.
LossResult loss_and_gradients(const MiniSplatScene& scene, const std::vector<TargetView>& targets,
                              const TrainConfig& cfg, bool apply_scale_loss = true);

struct TraceRow {
    int iter = 0;
    double l1 = 0.0;
    double scale_loss = 0.0;
    double total = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    double max_nu = 0.0;
};

struct ViewMetrics {
    double psnr = 0.0;
    double ssim = 0.0;
};

struct FitResult {
    MiniSplatScene scene;
    std::vector<TraceRow> trace;
    std::vector<ViewMetrics> per_target;   // final render vs each target
    std::optional<ViewMetrics> reference;  // final view-0 render vs clean reference
    double max_nu = 0.0;
};

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) with per-group learning rates.
/// Trace rows record the loss evaluated before each step; psnr/ssim compare
/// the view-0 render against the clean reference when given, otherwise
/// against target 0.
FitResult fit(MiniSplatScene scene, const std::vector<TargetView>& targets, const TrainConfig& cfg,
              const std::optional<Image>& reference = std::nullopt);

/// Regular grid of `count` isotropic Gaussians covering the canvas with
/// grey colour, opacity 0.5 and seeded jitter in position and depth.
MiniSplatScene make_initial_scene(int count, int width, int height, std::uint64_t seed,
                                  std::array<double, 3> background = {0.0, 0.0, 0.0});

/// Normalized variance of every Gaussian's activated scales.
std::vector<double> scene_normalized_variances(const MiniSplatScene& scene);

namespace reference {

// Per-pixel serial renderer and gradient, the plain textbook loop. Used to
// check the row-parallel kernels.
Image render(const MiniSplatScene& scene, const View& view = {});
LossResult loss_and_gradients(const MiniSplatScene& scene, const std::vector<TargetView>& targets,
                              const TrainConfig& cfg, bool apply_scale_loss = true);

} // namespace reference

} // namespace splatguard
