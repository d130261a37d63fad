#pragma once

#include "pixshuf/field.hpp"
#include "pixshuf/image.hpp"

namespace pixshuf {

enum class SamplingMode {
    Bilinear, // 4-neighbor convex interpolation; differentiable
    Nearest   // round-half-up snap; copies whole source pixels
};

// out(x,y,c) = src sampled at (x + dx(x,y), y + dy(x,y)), coordinates clamped
// to [0,w-1] x [0,h-1] before interpolation. Field dims must equal src dims.
Image warp(const Image& src, const DisplacementField& field, SamplingMode mode);

// Analytic partials of the bilinear warp output with respect to the
// displacement components, per pixel per channel (interleaved like the image).
struct WarpGradient {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> d_dx; // d out / d dx
    std::vector<double> d_dy; // d out / d dy
};

WarpGradient warp_input_gradient(const Image& src, const DisplacementField& field);

} // namespace pixshuf
