#include "pixshuf/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pixshuf {

namespace {

void check_shape(int w, int h, int c) {
    if (w <= 0 || h <= 0)
        throw DimensionError("image dimensions must be positive, got " + std::to_string(w) + "x" +
                             std::to_string(h));
    if (c != 1 && c != 3)
        throw DimensionError("channel count must be 1 or 3, got " + std::to_string(c));
}

} // namespace

Image::Image(int w, int h, int c, double fill) : width(w), height(h), channels(c) {
    check_shape(w, h, c);
    data.assign(std::size_t(w) * h * c, fill);
}

Image to_luma(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double* px = &img.data[i * 3];
        double y = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        out.data[i] = std::clamp(y, 0.0, 1.0);
    }
    return out;
}

Image resize_bilinear(const Image& img, int new_w, int new_h) {
    check_shape(new_w, new_h, img.channels);
    if (new_w == img.width && new_h == img.height) return img;

    Image out(new_w, new_h, img.channels);
    const double sx = new_w > 1 ? double(img.width - 1) / (new_w - 1) : 0.0;
    const double sy = new_h > 1 ? double(img.height - 1) / (new_h - 1) : 0.0;
    const int ch = img.channels;

    for (int y = 0; y < new_h; ++y) {
        double fy = std::clamp(y * sy, 0.0, double(img.height - 1));
        int y0 = int(fy);
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            double fx = std::clamp(x * sx, 0.0, double(img.width - 1));
            int x0 = int(fx);
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = fx - x0;
            for (int c = 0; c < ch; ++c) {
                double top = img.at(x0, y0, c) + wx * (img.at(x1, y0, c) - img.at(x0, y0, c));
                double bot = img.at(x0, y1, c) + wx * (img.at(x1, y1, c) - img.at(x0, y1, c));
                out.at(x, y, c) = std::clamp(top + wy * (bot - top), 0.0, 1.0);
            }
        }
    }
    return out;
}

Image downsample2x(const Image& img) {
    if (img.width < 2 || img.height < 2)
        throw DimensionError("downsample2x needs at least 2x2 input, got " +
                             std::to_string(img.width) + "x" + std::to_string(img.height));
    Image out(img.width / 2, img.height / 2, img.channels);
    const int ch = img.channels;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            for (int c = 0; c < ch; ++c) {
                double s = img.at(2 * x, 2 * y, c) + img.at(2 * x + 1, 2 * y, c) +
                           img.at(2 * x, 2 * y + 1, c) + img.at(2 * x + 1, 2 * y + 1, c);
                out.at(x, y, c) = std::clamp(s * 0.25, 0.0, 1.0);
            }
        }
    }
    return out;
}

} // namespace pixshuf
