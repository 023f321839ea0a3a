#pragma once

// On-disk fixtures: synthetic multi-view datasets and 3DGS PLY files.

#include "splatguard/gsply.hpp"
#include "splatguard/image_io.hpp"
#include "splatguard/synthetic.hpp"
#include "support.hpp"

#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

namespace testing {

using splatguard::GaussianCloud;

/// Writes view PNGs and a COLMAP images.txt; returns the dataset description.
inline splatguard::SyntheticViews write_dataset(const std::filesystem::path& dir, int count, int size,
                                                std::uint64_t seed) {
    std::filesystem::create_directories(dir / "images");
    auto views = splatguard::synthetic_views(count, size, seed);
    for (std::size_t i = 0; i < views.images.size(); ++i) {
        splatguard::save_png(views.images[i], dir / "images" / views.names[i]);
        // Keep the in-memory copy equal to what is on disk.
        views.images[i] = splatguard::load_png(dir / "images" / views.names[i]);
    }
    write_text(dir / "images.txt", splatguard::colmap_images_text(views.poses));
    return views;
}

inline const char* kPlyProperties[] = {"x",       "y",       "z",       "f_dc_0",  "f_dc_1", "f_dc_2", "opacity",
                                       "scale_0", "scale_1", "scale_2", "rot_0",   "rot_1",  "rot_2",  "rot_3"};

inline std::array<double, 14> ply_row(const GaussianCloud& c, std::size_t i) {
    return {c.position[i][0],   c.position[i][1],   c.position[i][2],   c.color_dc[i][0], c.color_dc[i][1],
            c.color_dc[i][2],   c.opacity_logit[i], c.log_scales[i][0], c.log_scales[i][1],
            c.log_scales[i][2], c.rotation[i][0],   c.rotation[i][1],   c.rotation[i][2], c.rotation[i][3]};
}

/// ASCII PLY with an extra f_rest_0 property and a trailing face element, so
/// the reader's skipping paths are exercised.
inline std::string ascii_ply(const GaussianCloud& c, bool with_extras = true) {
    std::ostringstream o;
    o.precision(17);
    o << "ply\nformat ascii 1.0\ncomment written by the test suite\nelement vertex " << c.count() << "\n";
    for (const char* p : kPlyProperties) o << "property float " << p << "\n";
    if (with_extras) o << "property float f_rest_0\nelement face 0\nproperty list uchar int vertex_indices\n";
    o << "end_header\n";
    for (std::size_t i = 0; i < c.count(); ++i) {
        const auto row = ply_row(c, i);
        for (std::size_t k = 0; k < row.size(); ++k) o << (k ? " " : "") << row[k];
        if (with_extras) o << " 0.25";
        o << "\n";
    }
    return o.str();
}

/// Binary little-endian PLY; double properties keep values exact.
inline std::string binary_ply(const GaussianCloud& c) {
    std::ostringstream o;
    o << "ply\nformat binary_little_endian 1.0\nelement vertex " << c.count() << "\n";
    for (const char* p : kPlyProperties) o << "property double " << p << "\n";
    o << "property uchar flag\nend_header\n";
    std::string bytes = o.str();
    for (std::size_t i = 0; i < c.count(); ++i) {
        for (double v : ply_row(c, i)) {
            char buf[8];
            std::memcpy(buf, &v, 8);
            bytes.append(buf, 8);
        }
        bytes.push_back('\x07');
    }
    return bytes;
}

inline GaussianCloud random_cloud(std::size_t n, std::uint64_t seed) {
    splatguard::Rng rng(seed);
    GaussianCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        c.position.push_back({rng.normal(), rng.normal(), rng.normal()});
        c.log_scales.push_back({rng.uniform(-4, 1), rng.uniform(-4, 1), rng.uniform(-4, 1)});
        c.rotation.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
        c.opacity_logit.push_back(rng.normal());
        c.color_dc.push_back({rng.normal(), rng.normal(), rng.normal()});
    }
    return c;
}

inline GaussianCloud cloud_from_scales(const std::vector<std::array<double, 3>>& scales) {
    GaussianCloud c;
    for (const auto& s : scales) {
        c.position.push_back({0, 0, 0});
        c.log_scales.push_back({std::log(s[0]), std::log(s[1]), std::log(s[2])});
        c.rotation.push_back({1, 0, 0, 0});
        c.opacity_logit.push_back(0.0);
        c.color_dc.push_back({0, 0, 0});
    }
    return c;
}

} // namespace testing
