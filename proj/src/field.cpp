#include "pixshuf/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>

namespace pixshuf {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr char kMagic[4] = {'P', 'S', 'F', '1'};

void put_u32le(std::uint32_t v, std::FILE* f) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    std::fwrite(b, 1, 4, f);
}

std::uint32_t get_u32le(std::FILE* f, bool& ok) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) {
        ok = false;
        return 0;
    }
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

void write_f32le(const std::vector<double>& src, std::FILE* f) {
    std::vector<unsigned char> buf(src.size() * 4);
    for (std::size_t i = 0; i < src.size(); ++i) {
        float v = static_cast<float>(src[i]);
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        buf[i * 4 + 0] = static_cast<unsigned char>(bits);
        buf[i * 4 + 1] = static_cast<unsigned char>(bits >> 8);
        buf[i * 4 + 2] = static_cast<unsigned char>(bits >> 16);
        buf[i * 4 + 3] = static_cast<unsigned char>(bits >> 24);
    }
    if (std::fwrite(buf.data(), 1, buf.size(), f) != buf.size())
        throw IoError("short write while saving field");
}

void read_f32le(std::vector<double>& dst, std::size_t n, std::FILE* f, const std::string& path) {
    std::vector<unsigned char> buf(n * 4);
    if (std::fread(buf.data(), 1, buf.size(), f) != buf.size())
        throw FormatError("truncated field file: " + path);
    dst.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = std::uint32_t(buf[i * 4]) | std::uint32_t(buf[i * 4 + 1]) << 8 |
                             std::uint32_t(buf[i * 4 + 2]) << 16 |
                             std::uint32_t(buf[i * 4 + 3]) << 24;
        float v;
        std::memcpy(&v, &bits, 4);
        dst[i] = v;
    }
}

} // namespace

DisplacementField::DisplacementField(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0)
        throw DimensionError("field dimensions must be positive, got " + std::to_string(w) + "x" +
                             std::to_string(h));
    dx.assign(std::size_t(w) * h, 0.0);
    dy.assign(std::size_t(w) * h, 0.0);
}

bool DisplacementField::finite() const {
    for (double v : dx)
        if (!std::isfinite(v)) return false;
    for (double v : dy)
        if (!std::isfinite(v)) return false;
    return true;
}

DisplacementField upsample_field(const DisplacementField& field, int new_w, int new_h) {
    if (new_w < field.width || new_h < field.height)
        throw DimensionError("upsample_field target must not shrink the field");
    if (new_w == field.width && new_h == field.height) return field;

    DisplacementField out(new_w, new_h);
    const double scale_x = double(new_w) / field.width;
    const double scale_y = double(new_h) / field.height;
    const double sx = new_w > 1 ? double(field.width - 1) / (new_w - 1) : 0.0;
    const double sy = new_h > 1 ? double(field.height - 1) / (new_h - 1) : 0.0;

    for (int y = 0; y < new_h; ++y) {
        double fy = std::clamp(y * sy, 0.0, double(field.height - 1));
        int y0 = int(fy);
        int y1 = std::min(y0 + 1, field.height - 1);
        double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            double fx = std::clamp(x * sx, 0.0, double(field.width - 1));
            int x0 = int(fx);
            int x1 = std::min(x0 + 1, field.width - 1);
            double wx = fx - x0;
            auto lerp2 = [&](const std::vector<double>& v) {
                const std::size_t r0 = std::size_t(y0) * field.width;
                const std::size_t r1 = std::size_t(y1) * field.width;
                double top = v[r0 + x0] + wx * (v[r0 + x1] - v[r0 + x0]);
                double bot = v[r1 + x0] + wx * (v[r1 + x1] - v[r1 + x0]);
                return top + wy * (bot - top);
            };
            const std::size_t o = std::size_t(y) * new_w + x;
            out.dx[o] = lerp2(field.dx) * scale_x;
            out.dy[o] = lerp2(field.dy) * scale_y;
        }
    }
    return out;
}

void save_field(const DisplacementField& field, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path);
    std::fwrite(kMagic, 1, 4, f.get());
    put_u32le(static_cast<std::uint32_t>(field.width), f.get());
    put_u32le(static_cast<std::uint32_t>(field.height), f.get());
    write_f32le(field.dx, f.get());
    write_f32le(field.dy, f.get());
}

DisplacementField load_field(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not a PSF1 field file: " + path);
    bool ok = true;
    std::uint32_t w = get_u32le(f.get(), ok);
    std::uint32_t h = get_u32le(f.get(), ok);
    if (!ok || w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw FormatError("bad PSF1 header: " + path);
    DisplacementField field(static_cast<int>(w), static_cast<int>(h));
    read_f32le(field.dx, field.size(), f.get(), path);
    read_f32le(field.dy, field.size(), f.get(), path);
    if (!field.finite()) throw FormatError("field contains non-finite values: " + path);
    return field;
}

} // namespace pixshuf
