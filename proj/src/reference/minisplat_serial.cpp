#include "../minisplat_detail.hpp"
#include "splatguard/error.hpp"
#include "splatguard/minisplat.hpp"

#include <cmath>
#include <numeric>

namespace splatguard::reference {

Image render(const MiniSplatScene& scene, const View& view) {
    scene.validate();
    const auto proj = detail::project(scene, view, nullptr);
    Image out(scene.width, scene.height);
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            const auto c = detail::shade_pixel(proj, scene.background, x, y, nullptr);
            for (int k = 0; k < 3; ++k) out.set(k, x, y, c[k]);
        }
    }
    return out;
}

LossResult loss_and_gradients(const MiniSplatScene& scene, const std::vector<TargetView>& targets,
                              const TrainConfig& cfg, bool apply_scale_loss) {
    scene.validate();
    if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "at least one target view is required");
    const int w = scene.width;
    const int h = scene.height;
    const double norm = 1.0 / (3.0 * w * h * static_cast<double>(targets.size()));
    LossResult res;
    res.gradient.assign(scene.gaussians.size() * ParamLayout::kCount, 0.0);
    double l1_sum = 0.0;
    for (const auto& target : targets) {
        if (target.image.width() != w || target.image.height() != h) {
            throw Error(ErrorKind::DimensionMismatch, "target size differs from the canvas");
        }
        const auto proj = detail::project(scene, target.view, nullptr);
        std::vector<detail::PixelGrad> acc(proj.size());
        std::vector<detail::Contribution> contribs;
        Image r(w, h);
        double l1 = 0.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto c = detail::shade_pixel(proj, scene.background, x, y, &contribs);
                std::array<double, 3> dl_dc{};
                for (int k = 0; k < 3; ++k) {
                    r.set(k, x, y, c[k]);
                    const double d = c[k] - target.image.at(k, x, y);
                    l1 += std::abs(d);
                    dl_dc[k] = ((d > 0.0) - (d < 0.0)) * norm;
                }
                detail::backprop_pixel(proj, scene.background, contribs, dl_dc, acc);
            }
        }
        detail::chain_to_parameters(scene, proj, acc, res.gradient);
        l1_sum += l1 / (3.0 * w * h);
        res.renders.push_back(std::move(r));
    }
    res.terms.l1 = l1_sum / static_cast<double>(targets.size());
    const double lambda = apply_scale_loss ? cfg.lambda_scale : 0.0;
    res.terms.scale_loss = detail::add_scale_loss(scene, cfg.tau, lambda, res.gradient, &res.terms.max_nu);
    res.terms.total = res.terms.l1 + lambda * res.terms.scale_loss;
    return res;
}

} // namespace splatguard::reference
