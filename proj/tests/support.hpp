#pragma once

#include "splatguard/image.hpp"
#include "splatguard/numeric.hpp"
#include "splatguard/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testing {

using splatguard::Image;
using splatguard::Rng;

inline Image random_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h);
    for (int c = 0; c < Image::kChannels; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) img.set(c, x, y, rng.uniform());
    return img;
}

inline Image constant_image(int w, int h, double v) { return Image(w, h, v); }

inline Image smooth_image(int w, int h) { return splatguard::smooth_image(w, h); }

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("splatguard_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testing
