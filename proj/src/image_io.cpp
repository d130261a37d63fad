#include "pixshuf/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

namespace pixshuf {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint8_t quantize(double v) {
    double q = std::floor(v * 255.0 + 0.5); // round half up
    return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// ---- PNG ----

Image load_png(std::FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng init failed");
    }

    std::vector<std::uint8_t> raster;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("undecodable PNG: " + path);
    }

    png_init_io(png, f);
    png_read_info(png, info);
    w = png_get_image_width(png, info);
    h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG layout (" + std::to_string(channels) + " channels)");
    }

    std::size_t stride = png_get_rowbytes(png, info);
    raster.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raster.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(int(w), int(h), channels);
    const std::size_t n = img.data.size();
    for (std::size_t i = 0; i < n; ++i) img.data[i] = raster[i] / 255.0;
    return img;
}

void save_png(const Image& img, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw FormatError("libpng init failed");
    }

    std::vector<std::uint8_t> raster(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) raster[i] = quantize(img.data[i]);
    std::vector<png_bytep> rows(img.height);
    const std::size_t stride = std::size_t(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) rows[y] = raster.data() + y * stride;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- PPM / PGM (binary, maxval 255) ----

int pnm_token(std::FILE* f) {
    // next integer token, skipping whitespace and '#' comments
    int c = std::fgetc(f);
    for (;;) {
        while (c != EOF && std::isspace(c)) c = std::fgetc(f);
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
            continue;
        }
        break;
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 30) return -1;
        c = std::fgetc(f);
    }
    return static_cast<int>(value);
}

Image load_pnm(std::FILE* f, int channels, const std::string& path) {
    int w = pnm_token(f);
    int h = pnm_token(f);
    int maxval = pnm_token(f);
    if (w <= 0 || h <= 0) throw FormatError("bad PNM header: " + path);
    if (maxval != 255) throw FormatError("PNM maxval must be 255, got " +
                                         std::to_string(maxval) + ": " + path);
    const std::size_t n = std::size_t(w) * h * channels;
    std::vector<std::uint8_t> raster(n);
    if (std::fread(raster.data(), 1, n, f) != n)
        throw FormatError("truncated PNM payload: " + path);
    Image img(w, h, channels);
    for (std::size_t i = 0; i < n; ++i) img.data[i] = raster[i] / 255.0;
    return img;
}

void save_pnm(const Image& img, const std::string& path, int channels) {
    if (img.channels != channels)
        throw FormatError(std::string(channels == 3 ? "PPM" : "PGM") + " requires " +
                          std::to_string(channels) + " channel(s), image has " +
                          std::to_string(img.channels));
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path);
    std::fprintf(f.get(), "%s\n%d %d\n255\n", channels == 3 ? "P6" : "P5", img.width, img.height);
    std::vector<std::uint8_t> raster(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) raster[i] = quantize(img.data[i]);
    if (std::fwrite(raster.data(), 1, raster.size(), f.get()) != raster.size())
        throw IoError("short write: " + path);
}

} // namespace

Image load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open: " + path);

    unsigned char magic[8] = {0};
    std::size_t got = std::fread(magic, 1, sizeof magic, f.get());
    std::rewind(f.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(f.get(), path);
    if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        std::fseek(f.get(), 2, SEEK_SET);
        return load_pnm(f.get(), magic[1] == '6' ? 3 : 1, path);
    }
    throw FormatError("unrecognized image format: " + path);
}

void save_image(const Image& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 || (img.channels != 1 && img.channels != 3))
        throw DimensionError("cannot save empty or malformed image");
    const std::string ext = lower_ext(path);
    if (ext == "png") return save_png(img, path);
    if (ext == "ppm") return save_pnm(img, path, 3);
    if (ext == "pgm") return save_pnm(img, path, 1);
    throw FormatError("unsupported output extension '." + ext + "' (use .png/.ppm/.pgm)");
}

} // namespace pixshuf
