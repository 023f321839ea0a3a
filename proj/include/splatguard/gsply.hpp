#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace splatguard {

/// 3DGS primitives as stored on disk: log-scales, raw quaternion (w,x,y,z),
/// opacity logit and degree-0 SH coefficients. No activation is applied.
struct GaussianCloud {
    std::vector<std::array<double, 3>> position;
    std::vector<std::array<double, 3>> log_scales;
    std::vector<std::array<double, 4>> rotation;
    std::vector<double> opacity_logit;
    std::vector<std::array<double, 3>> color_dc;

    std::size_t count() const noexcept { return position.size(); }
    std::array<double, 3> activated_scales(std::size_t i) const;
};

/// Reads ascii or binary_little_endian PLY with vertex properties x, y, z,
/// f_dc_0..2, opacity, scale_0..2, rot_0..3; other properties and elements
/// are skipped. Throws NotPly, MissingProperty, UnsupportedEncoding
/// (big-endian), CorruptData, or InvalidArgument for an empty cloud.
GaussianCloud load_gaussian_ply(const std::filesystem::path& path);
GaussianCloud parse_gaussian_ply(const std::string& bytes);

/// Sample variance (divisor 2) of the three scales over the squared mean.
/// (1, 1, 10): variance 27, mean 4, nu = 27/16 = 1.6875. Throws NonPositiveScale.
double normalized_variance(const std::array<double, 3>& scales);

/// d nu / d s_k = (s_k - m) / m^2 - 2 var / (3 m^3).
std::array<double, 3> normalized_variance_gradient(const std::array<double, 3>& scales);

inline constexpr double kDefaultTau = 1.6;
inline constexpr double kDefaultLambdaScale = 1e5;

struct ScaleLossReport {
    std::vector<double> nu;
    std::vector<double> loss; // per Gaussian, max(0, nu - tau), unweighted
    double mean_loss = 0.0;   // lambda * mean(loss)
    std::size_t count_above_tau = 0;
    double tau = kDefaultTau;
    double lambda = kDefaultLambdaScale;
    double max_nu = 0.0;
    /// 32 bins over [0, 4) followed by one overflow bin for nu >= 4.
    std::array<std::size_t, 33> histogram{};
};

inline constexpr int kHistogramBins = 32;
inline constexpr double kHistogramRange = 4.0;

ScaleLossReport scale_loss(const GaussianCloud& cloud, double tau = kDefaultTau, double lambda = kDefaultLambdaScale);

} // namespace splatguard
