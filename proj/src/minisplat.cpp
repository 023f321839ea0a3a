#include "splatguard/minisplat.hpp"

#include "minisplat_detail.hpp"
#include "splatguard/error.hpp"
#include "splatguard/metrics.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace splatguard {

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

std::array<double, 3> MiniGaussian::scales() const {
    return {std::exp(log_scales[0]), std::exp(log_scales[1]), std::exp(log_scales[2])};
}

std::array<double, 3> MiniGaussian::color() const {
    return {sigmoid(color_logit[0]), sigmoid(color_logit[1]), sigmoid(color_logit[2])};
}

double MiniGaussian::opacity() const { return sigmoid(opacity_logit); }

void MiniSplatScene::validate() const {
    if (gaussians.empty()) throw Error(ErrorKind::InvalidArgument, "scene needs at least one Gaussian");
    if (width < 8 || height < 8) throw Error(ErrorKind::TooSmall, "canvas must be at least 8x8");
}

std::vector<double> MiniSplatScene::parameters() const {
    std::vector<double> p(gaussians.size() * ParamLayout::kCount);
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        const auto& g = gaussians[i];
        double* q = p.data() + i * ParamLayout::kCount;
        std::copy(g.position.begin(), g.position.end(), q + ParamLayout::kPosition);
        std::copy(g.log_scales.begin(), g.log_scales.end(), q + ParamLayout::kLogScale);
        std::copy(g.rotation.begin(), g.rotation.end(), q + ParamLayout::kRotation);
        std::copy(g.color_logit.begin(), g.color_logit.end(), q + ParamLayout::kColor);
        q[ParamLayout::kOpacity] = g.opacity_logit;
    }
    return p;
}

void MiniSplatScene::set_parameters(const std::vector<double>& p) {
    if (p.size() != gaussians.size() * ParamLayout::kCount) {
        throw Error(ErrorKind::DimensionMismatch, "parameter vector has the wrong length");
    }
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        auto& g = gaussians[i];
        const double* q = p.data() + i * ParamLayout::kCount;
        std::copy(q + ParamLayout::kPosition, q + ParamLayout::kPosition + 3, g.position.begin());
        std::copy(q + ParamLayout::kLogScale, q + ParamLayout::kLogScale + 3, g.log_scales.begin());
        std::copy(q + ParamLayout::kRotation, q + ParamLayout::kRotation + 4, g.rotation.begin());
        std::copy(q + ParamLayout::kColor, q + ParamLayout::kColor + 3, g.color_logit.begin());
        g.opacity_logit = q[ParamLayout::kOpacity];
    }
}

void TrainConfig::validate() const {
    if (iterations < 1) throw Error(ErrorKind::InvalidConfig, "iterations must be >= 1");
    const auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(lr.position) || !pos(lr.log_scale) || !pos(lr.rotation) || !pos(lr.color) || !pos(lr.opacity)) {
        throw Error(ErrorKind::InvalidConfig, "learning rates must be > 0");
    }
    if (!(lambda_scale >= 0.0)) throw Error(ErrorKind::InvalidConfig, "lambda_scale must be >= 0");
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be >= 0");
    if (scale_warmup < 0) throw Error(ErrorKind::InvalidConfig, "scale_warmup must be >= 0");
}

namespace detail {

PixelGrad& PixelGrad::operator+=(const PixelGrad& o) {
    mean_x += o.mean_x;
    mean_y += o.mean_y;
    inv00 += o.inv00;
    inv11 += o.inv11;
    inv01 += o.inv01;
    opacity += o.opacity;
    for (int c = 0; c < 3; ++c) color[c] += o.color[c];
    return *this;
}

std::vector<Projected> project(const MiniSplatScene& scene, const View& view, int* skipped) {
    std::vector<Projected> out;
    out.reserve(scene.gaussians.size());
    int bad = 0;
    for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
        const MiniGaussian& g = scene.gaussians[i];
        Projected p;
        p.index = static_cast<int>(i);
        const auto& q = g.rotation;
        p.qnorm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (!(p.qnorm > 0.0)) {
            ++bad;
            continue;
        }
        const double w = q[0] / p.qnorm, x = q[1] / p.qnorm, y = q[2] / p.qnorm, z = q[3] / p.qnorm;
        p.qhat = {w, x, y, z};
        p.rot[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)};
        p.rot[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)};
        const auto s = g.scales();
        for (int k = 0; k < 3; ++k) p.var[k] = s[k] * s[k];
        for (int k = 0; k < 3; ++k) {
            p.cov00 += p.rot[0][k] * p.rot[0][k] * p.var[k];
            p.cov01 += p.rot[0][k] * p.rot[1][k] * p.var[k];
            p.cov11 += p.rot[1][k] * p.rot[1][k] * p.var[k];
        }
        const double mid = 0.5 * (p.cov00 + p.cov11);
        const double half = 0.5 * (p.cov00 - p.cov11);
        const double disc = std::sqrt(half * half + p.cov01 * p.cov01);
        const double lmax = mid + disc;
        const double lmin = mid - disc;
        const double det = p.cov00 * p.cov11 - p.cov01 * p.cov01;
        if (!(lmin > 0.0) || !(det > 0.0) || lmax / lmin > kMaxCondition || !std::isfinite(lmax)) {
            ++bad;
            continue;
        }
        p.inv00 = p.cov11 / det;
        p.inv11 = p.cov00 / det;
        p.inv01 = -p.cov01 / det;
        p.cx = g.position[0] + view.offset[0];
        p.cy = g.position[1] + view.offset[1];
        const double r = kBoxSigmas * std::sqrt(lmax);
        const auto lo = [](double v, int limit) { return static_cast<int>(std::clamp(std::ceil(v), 0.0, double(limit))); };
        const auto hi = [](double v, int limit) {
            return static_cast<int>(std::clamp(std::floor(v), -1.0, double(limit)));
        };
        p.x0 = lo(p.cx - r, scene.width);
        p.x1 = hi(p.cx + r, scene.width - 1);
        p.y0 = lo(p.cy - r, scene.height);
        p.y1 = hi(p.cy + r, scene.height - 1);
        p.opacity = g.opacity();
        p.color = g.color();
        p.valid = true;
        out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(), [&](const Projected& a, const Projected& b) {
        return scene.gaussians[a.index].position[2] < scene.gaussians[b.index].position[2];
    });
    if (skipped) *skipped = bad;
    return out;
}

std::array<double, 3> shade_pixel(const std::vector<Projected>& proj, const std::array<double, 3>& background,
                                  int px, int py, std::vector<Contribution>* contribs) {
    std::array<double, 3> c{};
    double t = 1.0;
    if (contribs) contribs->clear();
    for (int slot = 0; slot < static_cast<int>(proj.size()); ++slot) {
        const Projected& p = proj[slot];
        if (px < p.x0 || px > p.x1 || py < p.y0 || py > p.y1) continue;
        const double dx = px - p.cx;
        const double dy = py - p.cy;
        const double q = p.inv00 * dx * dx + 2.0 * p.inv01 * dx * dy + p.inv11 * dy * dy;
        const double gauss = std::exp(-0.5 * q);
        double alpha = p.opacity * gauss;
        bool clamped = false;
        if (alpha > kAlphaMax) {
            alpha = kAlphaMax;
            clamped = true;
        }
        for (int k = 0; k < 3; ++k) c[k] += p.color[k] * alpha * t;
        if (contribs) contribs->push_back({slot, alpha, t, gauss, dx, dy, clamped});
        t *= 1.0 - alpha;
    }
    for (int k = 0; k < 3; ++k) c[k] += background[k] * t;
    return c;
}

void backprop_pixel(const std::vector<Projected>& proj, const std::array<double, 3>& background,
                    const std::vector<Contribution>& contribs, const std::array<double, 3>& dl_dc,
                    std::vector<PixelGrad>& acc) {
    // behind = colour composited behind the current Gaussian, background included.
    std::array<double, 3> behind = background;
    for (auto it = contribs.rbegin(); it != contribs.rend(); ++it) {
        const Contribution& ct = *it;
        const Projected& p = proj[ct.slot];
        PixelGrad& g = acc[ct.slot];
        double dl_dalpha = 0.0;
        for (int k = 0; k < 3; ++k) {
            g.color[k] += dl_dc[k] * ct.alpha * ct.transmittance;
            dl_dalpha += dl_dc[k] * (p.color[k] - behind[k]);
            behind[k] = p.color[k] * ct.alpha + (1.0 - ct.alpha) * behind[k];
        }
        dl_dalpha *= ct.transmittance;
        if (ct.clamped) continue;
        g.opacity += dl_dalpha * ct.gauss;
        const double dl_dq = dl_dalpha * (-0.5 * p.opacity * ct.gauss);
        g.mean_x -= dl_dq * 2.0 * (p.inv00 * ct.dx + p.inv01 * ct.dy);
        g.mean_y -= dl_dq * 2.0 * (p.inv01 * ct.dx + p.inv11 * ct.dy);
        g.inv00 += dl_dq * ct.dx * ct.dx;
        g.inv11 += dl_dq * ct.dy * ct.dy;
        g.inv01 += dl_dq * 2.0 * ct.dx * ct.dy;
    }
}

void chain_to_parameters(const MiniSplatScene& scene, const std::vector<Projected>& proj,
                         const std::vector<PixelGrad>& acc, std::vector<double>& grad) {
    (void)scene;
    for (std::size_t slot = 0; slot < proj.size(); ++slot) {
        const Projected& p = proj[slot];
        const PixelGrad& g = acc[slot];
        double* out = grad.data() + static_cast<std::size_t>(p.index) * ParamLayout::kCount;

        out[ParamLayout::kPosition + 0] += g.mean_x;
        out[ParamLayout::kPosition + 1] += g.mean_y;

        // dL/dSigma = -A G A with G the symmetric gradient w.r.t. A = Sigma^-1.
        const double a00 = p.inv00, a01 = p.inv01, a11 = p.inv11;
        const double g00 = g.inv00, g01 = 0.5 * g.inv01, g11 = g.inv11;
        const double m00 = a00 * g00 + a01 * g01, m01 = a00 * g01 + a01 * g11;
        const double m10 = a01 * g00 + a11 * g01, m11 = a01 * g01 + a11 * g11;
        const double s00 = -(m00 * a00 + m01 * a01);
        const double s01 = -(m00 * a01 + m01 * a11);
        const double s11 = -(m10 * a01 + m11 * a11);
        const double gs01 = 2.0 * s01; // cov01 fills both off-diagonal slots

        std::array<std::array<double, 3>, 2> grot{};
        for (int k = 0; k < 3; ++k) {
            const double r0 = p.rot[0][k], r1 = p.rot[1][k], v = p.var[k];
            const double gv = s00 * r0 * r0 + s11 * r1 * r1 + gs01 * r0 * r1;
            out[ParamLayout::kLogScale + k] += gv * 2.0 * v;
            grot[0][k] = s00 * 2.0 * r0 * v + gs01 * r1 * v;
            grot[1][k] = s11 * 2.0 * r1 * v + gs01 * r0 * v;
        }

        const auto [w, x, y, z] = p.qhat;
        std::array<double, 4> gq{};
        // d R[0][*] and d R[1][*] w.r.t. (w, x, y, z) of the unit quaternion.
        const double dR[2][3][4] = {
            {{0, 0, -4 * y, -4 * z}, {-2 * z, 2 * y, 2 * x, -2 * w}, {2 * y, 2 * z, 2 * w, 2 * x}},
            {{2 * z, 2 * y, 2 * x, 2 * w}, {0, -4 * x, 0, -4 * z}, {-2 * x, -2 * w, 2 * z, 2 * y}},
        };
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 4; ++j) gq[j] += grot[r][k] * dR[r][k][j];
        const double dot = gq[0] * w + gq[1] * x + gq[2] * y + gq[3] * z;
        for (int j = 0; j < 4; ++j) out[ParamLayout::kRotation + j] += (gq[j] - p.qhat[j] * dot) / p.qnorm;

        for (int k = 0; k < 3; ++k) {
            out[ParamLayout::kColor + k] += g.color[k] * p.color[k] * (1.0 - p.color[k]);
        }
        out[ParamLayout::kOpacity] += g.opacity * p.opacity * (1.0 - p.opacity);
    }
}

double add_scale_loss(const MiniSplatScene& scene, double tau, double lambda, std::vector<double>& grad,
                      double* max_nu) {
    const std::size_t n = scene.gaussians.size();
    std::vector<double> relu(n, 0.0);
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = scene.gaussians[i].scales();
        const double nu = normalized_variance(s);
        mx = std::max(mx, nu);
        if (nu <= tau) continue; // ReLU: no gradient below the threshold
        relu[i] = nu - tau;
        if (lambda == 0.0) continue;
        const auto dnu = normalized_variance_gradient(s);
        double* out = grad.data() + i * ParamLayout::kCount + ParamLayout::kLogScale;
        for (int k = 0; k < 3; ++k) out[k] += lambda / static_cast<double>(n) * dnu[k] * s[k];
    }
    if (max_nu) *max_nu = mx;
    return pairwise_sum(relu) / static_cast<double>(n);
}

} // namespace detail

namespace {

void check_targets(const MiniSplatScene& scene, const std::vector<TargetView>& targets) {
    scene.validate();
    if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "at least one target view is required");
    for (const auto& t : targets) {
        if (t.image.width() != scene.width || t.image.height() != scene.height) {
            throw Error(ErrorKind::DimensionMismatch, "target size differs from the canvas");
        }
    }
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

Image render(const MiniSplatScene& scene, const View& view, RenderStats* stats) {
    scene.validate();
    int skipped = 0;
    const auto proj = detail::project(scene, view, &skipped);
    if (stats) stats->skipped_singular = skipped;
    const int w = scene.width;
    const int h = scene.height;
    std::array<std::vector<double>, Image::kChannels> planes;
    for (auto& p : planes) p.resize(static_cast<std::size_t>(w) * h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto c = detail::shade_pixel(proj, scene.background, x, y, nullptr);
            for (int k = 0; k < 3; ++k) planes[k][static_cast<std::size_t>(y) * w + x] = c[k];
        }
    }
    return Image::from_planes(w, h, std::move(planes));
}

LossResult loss_and_gradients(const MiniSplatScene& scene, const std::vector<TargetView>& targets,
                              const TrainConfig& cfg, bool apply_scale_loss) {
    check_targets(scene, targets);
    const int w = scene.width;
    const int h = scene.height;
    const double norm = 1.0 / (3.0 * w * h * static_cast<double>(targets.size()));
    LossResult res;
    res.gradient.assign(scene.gaussians.size() * ParamLayout::kCount, 0.0);

    std::vector<double> view_l1;
    for (const auto& target : targets) {
        const auto proj = detail::project(scene, target.view, nullptr);
        const std::size_t np = proj.size();
        // Row-private accumulators, merged in row order below so the result
        // does not depend on the thread count.
        std::vector<std::vector<detail::PixelGrad>> row_acc(static_cast<std::size_t>(h));
        std::vector<double> row_l1(static_cast<std::size_t>(h), 0.0);
        std::array<std::vector<double>, Image::kChannels> planes;
        for (auto& p : planes) p.resize(static_cast<std::size_t>(w) * h);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            std::vector<detail::PixelGrad> acc(np);
            std::vector<detail::Contribution> contribs;
            double l1 = 0.0;
            for (int x = 0; x < w; ++x) {
                const auto c = detail::shade_pixel(proj, scene.background, x, y, &contribs);
                std::array<double, 3> dl_dc{};
                for (int k = 0; k < 3; ++k) {
                    const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                    planes[k][idx] = c[k];
                    const double r = c[k] - target.image.at(k, x, y);
                    l1 += std::abs(r);
                    dl_dc[k] = sign(r) * norm;
                }
                detail::backprop_pixel(proj, scene.background, contribs, dl_dc, acc);
            }
            row_acc[y] = std::move(acc);
            row_l1[y] = l1;
        }
        std::vector<detail::PixelGrad> acc(np);
        for (int y = 0; y < h; ++y)
            for (std::size_t s = 0; s < np; ++s) acc[s] += row_acc[y][s];
        detail::chain_to_parameters(scene, proj, acc, res.gradient);
        view_l1.push_back(pairwise_sum(row_l1) / (3.0 * w * h));
        res.renders.push_back(Image::from_planes(w, h, std::move(planes)));
    }
    res.terms.l1 = std::accumulate(view_l1.begin(), view_l1.end(), 0.0) / static_cast<double>(view_l1.size());

    const double lambda = apply_scale_loss ? cfg.lambda_scale : 0.0;
    res.terms.scale_loss = detail::add_scale_loss(scene, cfg.tau, lambda, res.gradient, &res.terms.max_nu);
    res.terms.total = res.terms.l1 + lambda * res.terms.scale_loss;
    return res;
}

std::vector<double> scene_normalized_variances(const MiniSplatScene& scene) {
    std::vector<double> nu;
    nu.reserve(scene.gaussians.size());
    for (const auto& g : scene.gaussians) nu.push_back(normalized_variance(g.scales()));
    return nu;
}

FitResult fit(MiniSplatScene scene, const std::vector<TargetView>& targets, const TrainConfig& cfg,
              const std::optional<Image>& reference) {
    cfg.validate();
    check_targets(scene, targets);
    if (reference && (reference->width() != scene.width || reference->height() != scene.height)) {
        throw Error(ErrorKind::DimensionMismatch, "reference size differs from the canvas");
    }

    std::vector<double> params = scene.parameters();
    std::vector<double> lr(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const int slot = static_cast<int>(i % ParamLayout::kCount);
        if (slot < ParamLayout::kLogScale) lr[i] = cfg.lr.position;
        else if (slot < ParamLayout::kRotation) lr[i] = cfg.lr.log_scale;
        else if (slot < ParamLayout::kColor) lr[i] = cfg.lr.rotation;
        else if (slot < ParamLayout::kOpacity) lr[i] = cfg.lr.color;
        else lr[i] = cfg.lr.opacity;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    std::vector<double> m(params.size(), 0.0);
    std::vector<double> v(params.size(), 0.0);
    const Image& metric_target = reference ? *reference : targets.front().image;

    FitResult out;
    out.trace.reserve(static_cast<std::size_t>(cfg.iterations));
    double b1t = 1.0;
    double b2t = 1.0;
    for (int it = 0; it < cfg.iterations; ++it) {
        scene.set_parameters(params);
        const LossResult res = loss_and_gradients(scene, targets, cfg, it >= cfg.scale_warmup);
        TraceRow row;
        row.iter = it;
        row.l1 = res.terms.l1;
        row.scale_loss = res.terms.scale_loss;
        row.total = res.terms.total;
        row.max_nu = res.terms.max_nu;
        row.psnr = psnr(res.renders.front(), metric_target);
        row.ssim = cfg.track_ssim ? ssim(res.renders.front(), metric_target) : 0.0;
        out.trace.push_back(row);

        b1t *= kBeta1;
        b2t *= kBeta2;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = res.gradient[i];
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
            const double mhat = m[i] / (1.0 - b1t);
            const double vhat = v[i] / (1.0 - b2t);
            params[i] -= lr[i] * mhat / (std::sqrt(vhat) + kEps);
        }
    }
    scene.set_parameters(params);

    for (const auto& t : targets) {
        const Image r = render(scene, t.view);
        out.per_target.push_back({psnr(r, t.image), ssim(r, t.image)});
    }
    if (reference) {
        const Image r = render(scene, targets.front().view);
        out.reference = ViewMetrics{psnr(r, *reference), ssim(r, *reference)};
    }
    const auto nu = scene_normalized_variances(scene);
    out.max_nu = *std::max_element(nu.begin(), nu.end());
    out.scene = std::move(scene);
    return out;
}

MiniSplatScene make_initial_scene(int count, int width, int height, std::uint64_t seed,
                                  std::array<double, 3> background) {
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
    MiniSplatScene scene;
    scene.width = width;
    scene.height = height;
    scene.background = background;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const double sx = static_cast<double>(width) / cols;
    const double sy = static_cast<double>(height) / rows;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        MiniGaussian g;
        const int cx = i % cols;
        const int cy = i / cols;
        g.position = {(cx + 0.5) * sx + rng.uniform(-0.1, 0.1) * sx, (cy + 0.5) * sy + rng.uniform(-0.1, 0.1) * sy,
                      rng.uniform(0.0, 1.0)};
        const double s = std::log(0.5 * std::min(sx, sy));
        g.log_scales = {s, s, s};
        g.rotation = {1.0, rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01)};
        g.color_logit = {0.0, 0.0, 0.0};
        g.opacity_logit = 0.0;
        scene.gaussians.push_back(g);
    }
    scene.validate();
    return scene;
}

} // namespace splatguard
