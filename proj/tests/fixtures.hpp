#pragma once

// Deterministic synthetic images shared by the unit tests and the acceptance
// suite. Randomness goes through mt19937_64 with explicit bit-to-double
// conversion so fixtures are identical on every platform.

#include <algorithm>
#include <cmath>
#include <random>

#include "pixshuf/image.hpp"

namespace fixtures {

inline double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

inline pixshuf::Image noise(int w, int h, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    pixshuf::Image img(w, h, channels);
    for (double& v : img.data) v = uniform01(rng);
    return img;
}

// Sum of a few low-frequency sine waves, normalized to [0,1]. fmax controls
// the highest spatial frequency in cycles per image side.
inline pixshuf::Image smooth(int w, int h, std::uint64_t seed, int waves = 4,
                             double fmax = 1.6) {
    std::mt19937_64 rng(seed);
    pixshuf::Image img(w, h, 1);
    const double two_pi = 6.283185307179586;
    for (int n = 0; n < waves; ++n) {
        // mixed wave directions keep the texture isotropic, so translation
        // recovery against these fixtures is well-posed in both axes
        const double sign = (rng() & 1) ? 1.0 : -1.0;
        const double fx = (0.4 + uniform01(rng) * (fmax - 0.4)) * two_pi / w;
        const double fy = sign * (0.4 + uniform01(rng) * (fmax - 0.4)) * two_pi / h;
        const double phase = uniform01(rng) * two_pi;
        const double amp = 0.4 + 0.6 * uniform01(rng);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                img.at(x, y, 0) += amp * std::sin(fx * x + fy * y + phase);
    }
    const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
    const double span = *hi - *lo > 0 ? *hi - *lo : 1.0;
    for (double& v : img.data) v = (v - *lo) / span;
    return img;
}

// Snaps intensities onto histogram bin centers: v -> round(v*(B-1))/(B-1).
inline pixshuf::Image quantize_bins(pixshuf::Image img, int bins) {
    for (double& v : img.data) v = std::round(v * (bins - 1)) / (bins - 1);
    return img;
}

// out(x,y) = img(x+tx, y+ty), edge-clamped: the inverse displacement that
// recovers img is dx = -tx, dy = -ty.
inline pixshuf::Image translate(const pixshuf::Image& img, int tx, int ty) {
    pixshuf::Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            int sx = std::clamp(x + tx, 0, img.width - 1);
            int sy = std::clamp(y + ty, 0, img.height - 1);
            for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
    return out;
}

// Photo-like content: sky gradient, sun disk, mountain ridge, textured ground.
// Cool palette, smooth long-range structure.
inline pixshuf::Image photo_content(int size = 256) {
    pixshuf::Image img(size, size, 3);
    std::mt19937_64 rng(2024);
    const double s = size;
    pixshuf::Image tex = smooth(size, size, 77, 5, 6.0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = x / s, v = y / s;
            // sky
            double r = 0.35 + 0.25 * v, g = 0.55 + 0.2 * v, b = 0.85 - 0.15 * v;
            // sun
            const double dsun = std::hypot(u - 0.72, v - 0.22);
            const double sun = std::exp(-dsun * dsun * 180.0);
            r += 0.6 * sun;
            g += 0.5 * sun;
            b += 0.2 * sun;
            // mountain ridge: dark below a wavy line
            const double ridge = 0.55 + 0.12 * std::sin(u * 9.0) + 0.06 * std::sin(u * 23.0 + 1.7);
            const double m = 1.0 / (1.0 + std::exp(-(v - ridge) * 60.0)); // 1 below ridge
            const double rock = 0.18 + 0.1 * tex.at(x, y, 0);
            r = (1 - m) * r + m * rock;
            g = (1 - m) * g + m * (rock * 1.15);
            b = (1 - m) * b + m * (rock * 0.9);
            // foreground water band
            const double w2 = 1.0 / (1.0 + std::exp(-(v - 0.82) * 70.0));
            r = (1 - w2) * r + w2 * (0.10 + 0.08 * tex.at(x, y, 0));
            g = (1 - w2) * g + w2 * (0.25 + 0.08 * tex.at(x, y, 0));
            b = (1 - w2) * b + w2 * (0.45 + 0.10 * tex.at(x, y, 0));
            img.at(x, y, 0) = std::clamp(r, 0.0, 1.0);
            img.at(x, y, 1) = std::clamp(g, 0.0, 1.0);
            img.at(x, y, 2) = std::clamp(b, 0.0, 1.0);
        }
    }
    return img;
}

// Painting-like style: warm swirled bands with brushy texture; palette
// deliberately disjoint from photo_content's blues.
inline pixshuf::Image painting_style(int size = 256) {
    pixshuf::Image img(size, size, 3);
    pixshuf::Image stroke = smooth(size, size, 31, 6, 10.0);
    const double s = size;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = x / s, v = y / s;
            const double swirl =
                std::sin(6.0 * u + 2.4 * std::sin(3.0 * v)) + std::cos(5.0 * v + 2.0 * std::sin(4.0 * u));
            const double band = 0.5 + 0.5 * std::sin(swirl * 2.2 + 8.0 * v);
            const double brush = 0.25 * (stroke.at(x, y, 0) - 0.5);
            double r = 0.78 + 0.2 * band + brush;
            double g = 0.38 + 0.3 * band + 0.8 * brush;
            double b = 0.12 + 0.12 * (1.0 - band) + 0.3 * brush;
            img.at(x, y, 0) = std::clamp(r, 0.0, 1.0);
            img.at(x, y, 1) = std::clamp(g, 0.0, 1.0);
            img.at(x, y, 2) = std::clamp(b, 0.0, 1.0);
        }
    }
    return img;
}

} // namespace fixtures
