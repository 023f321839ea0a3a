#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace splatguard {

/// World-to-camera rigid transform of one view.
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    std::string view_id;
};

/// Rotation matrix of a Hamilton quaternion (w, x, y, z). The quaternion is
/// normalized first; a zero quaternion throws InvalidPose.
Eigen::Matrix3d rotation_from_quaternion(double w, double x, double y, double z);

/// Throws InvalidPose unless R^T R = I and det R = +1 within 1e-6.
void validate_pose(const CameraPose& pose);

struct PoseLossWeights {
    double w_g = 1.0;
    double w_t = 1.0;

    void validate() const;
};

/// arccos((trace(Ra^T Rb) - 1) / 2), argument clamped to [-1, 1]. In [0, pi].
double geodesic_loss(const CameraPose& a, const CameraPose& b);

/// Squared Euclidean distance between the translations.
double translation_loss(const CameraPose& a, const CameraPose& b);

/// Dense symmetric n x n matrix, row-major.
class DistanceMatrix {
public:
    explicit DistanceMatrix(int n = 0) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const noexcept { return n_; }
    double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    int n_;
    std::vector<double> d_;
};

/// Entry (i,j) = w_g * geodesic + w_t * translation; zero diagonal.
/// Parallel over pairs; requires at least two poses.
DistanceMatrix pose_loss_matrix(const std::vector<CameraPose>& poses, const PoseLossWeights& w);

/// Rescales all translations so their RMS distance from the centroid is 1.
/// Leaves the poses unchanged when every translation coincides.
std::vector<CameraPose> normalize_translations(std::vector<CameraPose> poses);

/// Parses COLMAP text images.txt: one "IMAGE_ID QW QX QY QZ TX TY TZ
/// CAMERA_ID NAME" line followed by one (possibly empty) POINTS2D line per
/// image. view_id is NAME. Throws SchemaError with the line number.
std::vector<CameraPose> load_colmap_images(const std::filesystem::path& path);
std::vector<CameraPose> parse_colmap_images(const std::string& text);

namespace reference {

DistanceMatrix pose_loss_matrix(const std::vector<CameraPose>& poses, const PoseLossWeights& w);

} // namespace reference

} // namespace splatguard
