#include "splatguard/image_io.hpp"

#include "splatguard/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace splatguard {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

void require_exists(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorKind::FileNotFound, path.string());
    }
}

// libpng reports errors through longjmp; keep the message so it can be
// rethrown as a typed Error once control is back in C++ frames.
struct PngErrorState {
    std::jmp_buf jump;
    char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(st->message, sizeof(st->message), "%s", msg);
    std::longjmp(st->jump, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

} // namespace

std::uint8_t encode_sample_8bit(double s) noexcept {
    const double v = std::floor(clamp_unit(s) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(v);
}

Image load_png(const std::filesystem::path& path) {
    require_exists(path);
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error(ErrorKind::IoError, "cannot open " + path.string());

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw Error(ErrorKind::CorruptData, path.string() + " is not a PNG file");
    }

    PngErrorState err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw Error(ErrorKind::IoError, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorKind::IoError, "png_create_info_struct failed");
    }

    int width = 0;
    int height = 0;
    int depth = 0;
    int color = 0;
    std::vector<unsigned char> buffer;
    std::vector<png_bytep> rows;
    volatile bool unsupported = false;

    if (setjmp(err.jump)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::CorruptData, path.string() + ": " + err.message);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    depth = png_get_bit_depth(png, info);
    color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        unsupported = true;
    } else {
        if (color == PNG_COLOR_TYPE_PALETTE) {
            png_set_palette_to_rgb(png);
            depth = 8;
        }
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (depth == 16) png_set_swap(png); // native little-endian uint16 in the row buffer
        png_set_interlace_handling(png);
        png_read_update_info(png, info);
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        buffer.resize(rowbytes * static_cast<std::size_t>(height));
        rows.resize(static_cast<std::size_t>(height));
        for (int y = 0; y < height; ++y) rows[y] = buffer.data() + rowbytes * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    const int channels = unsupported ? 0 : png_get_channels(png, info);
    png_destroy_read_struct(&png, &info, nullptr);

    if (unsupported) {
        throw Error(ErrorKind::UnsupportedFormat, path.string() + ": grayscale PNG is not supported");
    }
    if (width < 2 || height < 2) throw Error(ErrorKind::TooSmall, path.string());
    if (channels < 3) throw Error(ErrorKind::UnsupportedFormat, path.string() + ": fewer than 3 channels");

    std::array<std::vector<double>, Image::kChannels> planes;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    for (auto& p : planes) p.resize(n);
    const double maxval = depth == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < height; ++y) {
        const unsigned char* row = rows[y];
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const std::size_t idx = static_cast<std::size_t>(x) * channels + c;
                double v;
                if (depth == 16) {
                    std::uint16_t s;
                    std::memcpy(&s, row + idx * 2, 2);
                    v = s;
                } else {
                    v = row[idx];
                }
                planes[c][static_cast<std::size_t>(y) * width + x] = v / maxval;
            }
        }
    }
    return Image::from_planes(width, height, std::move(planes));
}

void save_png(const Image& img, const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");

    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw Error(ErrorKind::IoError, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorKind::IoError, "png_create_info_struct failed");
    }

    const int w = img.width();
    const int h = img.height();
    std::vector<unsigned char> buffer(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                buffer[(static_cast<std::size_t>(y) * w + x) * 3 + c] = encode_sample_8bit(img.at(c, x, y));
            }
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * w * 3;

    if (setjmp(err.jump)) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::IoError, path.string() + ": " + err.message);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw Error(ErrorKind::IoError, "flush failed for " + path.string());
}

namespace {

// Reads one whitespace/comment-delimited header token of a PNM file.
bool read_pnm_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return false;
    tok.push_back(static_cast<char>(ch));
    while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') tok.push_back(static_cast<char>(in.get()));
    return true;
}

} // namespace

Image load_ppm(const std::filesystem::path& path) {
    require_exists(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::string magic, ws, hs, ms;
    if (!read_pnm_token(in, magic) || magic != "P6") {
        throw Error(ErrorKind::UnsupportedFormat, path.string() + ": only binary P6 PPM is supported");
    }
    if (!read_pnm_token(in, ws) || !read_pnm_token(in, hs) || !read_pnm_token(in, ms)) {
        throw Error(ErrorKind::CorruptData, path.string() + ": truncated header");
    }
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
        maxval = std::stoi(ms);
    } catch (const std::exception&) {
        throw Error(ErrorKind::CorruptData, path.string() + ": bad header field");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw Error(ErrorKind::CorruptData, path.string() + ": invalid header values");
    }
    in.get(); // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * 3 * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw Error(ErrorKind::CorruptData, path.string() + ": truncated pixel data");
    }
    std::array<std::vector<double>, Image::kChannels> planes;
    for (auto& p : planes) p.resize(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        for (int c = 0; c < 3; ++c) {
            const std::size_t k = i * 3 + c;
            const double v = bytes == 2 ? (raw[k * 2] << 8 | raw[k * 2 + 1]) : raw[k];
            planes[c][i] = v / maxval;
        }
    }
    return Image::from_planes(w, h, std::move(planes));
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.pixel_count() * 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                raw[(static_cast<std::size_t>(y) * img.width() + x) * 3 + c] = encode_sample_8bit(img.at(c, x, y));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

bool is_supported_image(const std::filesystem::path& path) {
    const auto e = lower_ext(path);
    return e == ".png" || e == ".ppm";
}

Image load_image(const std::filesystem::path& path) {
    const auto e = lower_ext(path);
    if (e == ".png") return load_png(path);
    if (e == ".ppm") return load_ppm(path);
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": unknown image extension");
}

void save_image(const Image& img, const std::filesystem::path& path) {
    const auto e = lower_ext(path);
    if (e == ".png") return save_png(img, path);
    if (e == ".ppm") return save_ppm(img, path);
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": unknown image extension");
}

} // namespace splatguard
