#pragma once

#include <cstddef>
#include <vector>

#include "pixshuf/errors.hpp"

namespace pixshuf {

// Dense raster of intensities in [0,1], row-major, channel-interleaved.
// 1 (gray) or 3 (RGB) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0);

    double& at(int x, int y, int ch) { return data[(std::size_t(y) * width + x) * channels + ch]; }
    double at(int x, int y, int ch) const {
        return data[(std::size_t(y) * width + x) * channels + ch];
    }

    std::size_t pixel_count() const { return std::size_t(width) * height; }
    bool same_dims(const Image& other) const {
        return width == other.width && height == other.height;
    }
};

// Rec. 601 luma for 3-channel input; copies 1-channel input unchanged.
Image to_luma(const Image& img);

// Align-corners bilinear resample: src coord = dst_i * (src_size-1)/(dst_size-1)
// (0 when dst_size == 1), edge-clamped.
Image resize_bilinear(const Image& img, int new_w, int new_h);

// Halves each dimension (floor); every output pixel is the mean of its 2x2
// source block, odd trailing row/column dropped. Throws DimensionError when
// width or height < 2.
Image downsample2x(const Image& img);

} // namespace pixshuf
