#include "splatguard/synthetic.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace splatguard {

Image textured_world(int size, std::uint64_t seed) {
    Rng rng(seed);
    Image img(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = static_cast<double>(x) / size;
            const double v = static_cast<double>(y) / size;
            img.set(0, x, y, 0.3 + 0.2 * u);
            img.set(1, x, y, 0.3 + 0.2 * v);
            img.set(2, x, y, 0.4 + 0.1 * std::sin(6.0 * u * v));
        }
    }
    const int rects = size * size / 300;
    for (int r = 0; r < rects; ++r) {
        const int w = 4 + static_cast<int>(rng.below(20));
        const int h = 4 + static_cast<int>(rng.below(20));
        const int x0 = static_cast<int>(rng.below(static_cast<unsigned long long>(size)));
        const int y0 = static_cast<int>(rng.below(static_cast<unsigned long long>(size)));
        const std::array<double, 3> color{rng.uniform(), rng.uniform(), rng.uniform()};
        for (int y = y0; y < std::min(size, y0 + h); ++y)
            for (int x = x0; x < std::min(size, x0 + w); ++x)
                for (int c = 0; c < 3; ++c) img.set(c, x, y, color[c]);
    }
    return img;
}

SyntheticViews synthetic_views(int count, int view_size, std::uint64_t seed) {
    if (count < 2) throw Error(ErrorKind::InvalidArgument, "need at least two views");
    constexpr int kStep = 6;
    constexpr int kSwing = 20;
    const int span = kStep * (count - 1);
    const int world_size = view_size + span + 2 * kSwing + 2;
    const Image world = textured_world(world_size, seed);

    std::vector<int> perm(static_cast<std::size_t>(count));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed ^ 0x5eedULL);
    for (int i = count - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.below(static_cast<unsigned long long>(i + 1))]);
    }

    SyntheticViews out;
    for (int slot = 0; slot < count; ++slot) {
        const int k = perm[slot]; // position along the path
        const int ox = kStep * k;
        const int swing = static_cast<int>(std::lround(kSwing * std::sin(k / 3.0) / 2.0)) * 2;
        const int oy = kSwing + swing;
        Image view(view_size, view_size);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < view_size; ++y)
                for (int x = 0; x < view_size; ++x) view.set(c, x, y, world.at(c, ox + x, oy + y));
        char name[32];
        std::snprintf(name, sizeof name, "view_%02d.png", slot);
        CameraPose pose;
        const double yaw = 0.03 * k;
        pose.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
        pose.translation = Eigen::Vector3d(ox / 50.0, oy / 50.0, 0.0);
        pose.view_id = name;
        out.names.emplace_back(name);
        out.images.push_back(std::move(view));
        out.poses.push_back(std::move(pose));
    }
    return out;
}

std::string colmap_images_text(const std::vector<CameraPose>& poses) {
    std::string out = "# IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n# POINTS2D[] as (X, Y, POINT3D_ID)\n";
    int id = 1;
    for (const auto& p : poses) {
        const Eigen::Quaterniond q(p.rotation);
        char line[256];
        std::snprintf(line, sizeof line, "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g 1 %s\n", id++, q.w(), q.x(),
                      q.y(), q.z(), p.translation.x(), p.translation.y(), p.translation.z(), p.view_id.c_str());
        out += line;
        out += "\n";
    }
    return out;
}

MiniSplatScene synthetic_splat_scene(int count, int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    MiniSplatScene s;
    s.width = width;
    s.height = height;
    const double unit = std::min(width, height) / 64.0;
    for (int i = 0; i < count; ++i) {
        MiniGaussian g;
        g.position = {rng.uniform(0.0, width), rng.uniform(0.0, height), rng.uniform(0.0, 1.0)};
        for (auto& l : g.log_scales) l = std::log(rng.uniform(3.0, 9.0) * unit);
        for (auto& q : g.rotation) q = rng.normal();
        for (auto& c : g.color_logit) c = rng.normal();
        g.opacity_logit = rng.uniform(0.0, 3.0);
        s.gaussians.push_back(g);
    }
    s.validate();
    return s;
}

Image smooth_image(int width, int height) {
    Image img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width;
            const double v = (y + 0.5) / height;
            const double bump = std::exp(-((u - 0.5) * (u - 0.5) + (v - 0.4) * (v - 0.4)) / 0.08);
            img.set(0, x, y, 0.2 + 0.6 * u);
            img.set(1, x, y, 0.3 + 0.4 * v * bump + 0.2 * (1 - v));
            img.set(2, x, y, 0.5 + 0.3 * std::sin(3.0 * u + 2.0 * v));
        }
    }
    return img;
}

Image thin_bar_image(int width, int height) {
    Image img(width, height, 0.0);
    const int y0 = height / 2 - 1;
    const int margin = std::max(1, width / 12);
    for (int y = y0; y <= y0 + 1; ++y)
        for (int x = margin; x < width - margin; ++x)
            for (int c = 0; c < 3; ++c) img.set(c, x, y, 1.0);
    return img;
}

MiniSplatScene thin_bar_initial_scene(int count, int width, int height, std::uint64_t seed) {
    MiniSplatScene s = make_initial_scene(count, width, height, seed);
    const double centre = height / 2 - 0.5;
    for (int i = 0; i < count; ++i) {
        auto& g = s.gaussians[i];
        g.position[0] = (i + 0.5) * width / count;
        g.position[1] = centre;
        g.log_scales = {0.0, 0.0, 0.0};
    }
    return s;
}

} // namespace splatguard
