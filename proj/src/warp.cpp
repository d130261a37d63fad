#include "pixshuf/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pixshuf/kernels.hpp"
#include "pixshuf/parallel.hpp"

namespace pixshuf {

namespace {

constexpr std::size_t kWarpChunk = 4096; // pixels per parallel chunk

void check_field(const Image& src, const DisplacementField& field) {
    if (src.width != field.width || src.height != field.height)
        throw DimensionError("field dimensions " + std::to_string(field.width) + "x" +
                             std::to_string(field.height) + " do not match image " +
                             std::to_string(src.width) + "x" + std::to_string(src.height));
}

Image warp_nearest(const Image& src, const DisplacementField& field) {
    Image out(src.width, src.height, src.channels);
    const int w = src.width, h = src.height, ch = src.channels;
    const double x_lim = w - 1, y_lim = h - 1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * w + x;
            double sx = std::clamp(x + field.dx[p], 0.0, x_lim);
            double sy = std::clamp(y + field.dy[p], 0.0, y_lim);
            int ix = std::min(int(std::floor(sx + 0.5)), w - 1); // round half up
            int iy = std::min(int(std::floor(sy + 0.5)), h - 1);
            const std::size_t s = (std::size_t(iy) * w + ix) * ch;
            for (int c = 0; c < ch; ++c) out.data[p * ch + c] = src.data[s + c];
        }
    }
    return out;
}

} // namespace

Image warp(const Image& src, const DisplacementField& field, SamplingMode mode) {
    check_field(src, field);
    if (mode == SamplingMode::Nearest) return warp_nearest(src, field);

    Image out(src.width, src.height, src.channels);
    const auto& ops = kernels::active();
    parallel::for_chunks(src.pixel_count(), kWarpChunk,
                         [&](std::size_t, std::size_t begin, std::size_t end) {
                             ops.warp_bilinear(src.data.data(), src.width, src.height,
                                               src.channels, field.dx.data(), field.dy.data(),
                                               begin, end, out.data.data());
                         });
    return out;
}

WarpGradient warp_input_gradient(const Image& src, const DisplacementField& field) {
    check_field(src, field);
    WarpGradient g;
    g.width = src.width;
    g.height = src.height;
    g.channels = src.channels;
    g.d_dx.assign(src.data.size(), 0.0);
    g.d_dy.assign(src.data.size(), 0.0);
    const auto& ops = kernels::active();
    parallel::for_chunks(src.pixel_count(), kWarpChunk,
                         [&](std::size_t, std::size_t begin, std::size_t end) {
                             ops.warp_gradient(src.data.data(), src.width, src.height,
                                               src.channels, field.dx.data(), field.dy.data(),
                                               begin, end, g.d_dx.data(), g.d_dy.data());
                         });
    return g;
}

} // namespace pixshuf
