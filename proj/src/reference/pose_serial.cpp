#include "splatguard/pose.hpp"

namespace splatguard::reference {

DistanceMatrix pose_loss_matrix(const std::vector<CameraPose>& poses, const PoseLossWeights& w) {
    w.validate();
    const int n = static_cast<int>(poses.size());
    DistanceMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = w.w_g * geodesic_loss(poses[i], poses[j]) + w.w_t * translation_loss(poses[i], poses[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

} // namespace splatguard::reference
