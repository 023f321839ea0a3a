#include "splatguard/pose.hpp"

#include "splatguard/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace splatguard {

Eigen::Matrix3d rotation_from_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InvalidPose, "zero or non-finite quaternion");
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

void validate_pose(const CameraPose& pose) {
    const Eigen::Matrix3d rtr = pose.rotation.transpose() * pose.rotation;
    if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
        throw Error(ErrorKind::InvalidPose, pose.view_id + ": rotation is not orthonormal");
    }
    if (std::abs(pose.rotation.determinant() - 1.0) > 1e-6) {
        throw Error(ErrorKind::InvalidPose, pose.view_id + ": rotation determinant is not +1");
    }
    if (!pose.translation.allFinite()) throw Error(ErrorKind::InvalidPose, pose.view_id + ": non-finite translation");
}

void PoseLossWeights::validate() const {
    if (!(w_g >= 0.0) || !(w_t >= 0.0) || !(w_g + w_t > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "pose weights must be non-negative with a positive sum");
    }
}

double geodesic_loss(const CameraPose& a, const CameraPose& b) {
    const double trace = (a.rotation.transpose() * b.rotation).trace();
    const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

double translation_loss(const CameraPose& a, const CameraPose& b) {
    return (a.translation - b.translation).squaredNorm();
}

DistanceMatrix pose_loss_matrix(const std::vector<CameraPose>& poses, const PoseLossWeights& w) {
    w.validate();
    const int n = static_cast<int>(poses.size());
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "pose_loss_matrix needs at least two poses");
    DistanceMatrix m(n);
    // Row i owns entries (i, j > i) and their mirrors; rows shrink, so hand
    // them out dynamically.
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = w.w_g * geodesic_loss(poses[i], poses[j]) + w.w_t * translation_loss(poses[i], poses[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

std::vector<CameraPose> normalize_translations(std::vector<CameraPose> poses) {
    if (poses.empty()) return poses;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : poses) centroid += p.translation;
    centroid /= static_cast<double>(poses.size());
    double ms = 0.0;
    for (const auto& p : poses) ms += (p.translation - centroid).squaredNorm();
    const double rms = std::sqrt(ms / static_cast<double>(poses.size()));
    if (rms == 0.0) return poses;
    for (auto& p : poses) p.translation /= rms;
    return poses;
}

} // namespace splatguard
