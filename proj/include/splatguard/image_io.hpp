#pragma once

#include "splatguard/image.hpp"

#include <cstdint>
#include <filesystem>

namespace splatguard {

/// Reads an 8- or 16-bit RGB/RGBA (or palette) PNG. Samples are divided by the
/// bit-depth maximum; alpha is discarded. Grayscale PNGs are rejected with
/// UnsupportedFormat.
Image load_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Each sample s is stored as floor(s*255 + 0.5)
/// (round half up). Compression settings are pinned so output bytes are
/// reproducible.
void save_png(const Image& img, const std::filesystem::path& path);

/// Binary PPM (P6), maxval 255 on write; maxval up to 65535 accepted on read.
Image load_ppm(const std::filesystem::path& path);
void save_ppm(const Image& img, const std::filesystem::path& path);

/// Dispatches on extension: .png or .ppm (case-insensitive).
Image load_image(const std::filesystem::path& path);
void save_image(const Image& img, const std::filesystem::path& path);

bool is_supported_image(const std::filesystem::path& path);

std::uint8_t encode_sample_8bit(double s) noexcept;

} // namespace splatguard
