#pragma once

#include <string>
#include <vector>

#include "pixshuf/errors.hpp"

namespace pixshuf {

// Per-pixel displacement in pixel units: the sample for output pixel (x,y) is
// taken at (x + dx(x,y), y + dy(x,y)). All entries must stay finite.
struct DisplacementField {
    int width = 0;
    int height = 0;
    std::vector<double> dx;
    std::vector<double> dy;

    DisplacementField() = default;
    DisplacementField(int w, int h);

    std::size_t size() const { return std::size_t(width) * height; }
    bool finite() const;
};

// Bilinear field resize with displacement rescaling: dx * new_w/old_w,
// dy * new_h/old_h, so offsets keep their meaning on the finer grid.
// Requires new_w >= width and new_h >= height.
DisplacementField upsample_field(const DisplacementField& field, int new_w, int new_h);

// Raw little-endian format: "PSF1", u32 width, u32 height, then w*h float32 dx
// followed by w*h float32 dy.
void save_field(const DisplacementField& field, const std::string& path);
DisplacementField load_field(const std::string& path);

} // namespace pixshuf
