#pragma once

#include <string>

#include "pixshuf/image.hpp"

namespace pixshuf {

// Decodes PNG, PPM (P6) or PGM (P5), sniffed by magic bytes. 8-bit sources
// are mapped to [0,1] via v/255; alpha is dropped; palette/low-bit PNG is
// expanded. Throws IoError (unreadable) or FormatError (undecodable).
Image load_image(const std::string& path);

// Encodes 8-bit PNG/PPM/PGM chosen by file extension. Each value is stored as
// round(v*255) clamped to [0,255]. PPM requires 3 channels, PGM requires 1.
void save_image(const Image& img, const std::string& path);

} // namespace pixshuf
