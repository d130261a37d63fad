#pragma once

#include "pixshuf/image.hpp"

namespace pixshuf {

// Single-scale SSIM on luma: 8x8 windows, stride 4, C1=0.01^2, C2=0.03^2 on
// the [0,1] range, mean over windows. Images smaller than a window use one
// window covering the whole image.
double ssim_luma(const Image& a, const Image& b);

// Position-blind style distance: per-channel 32-bin hard histograms normalized
// to 1, chi^2 = sum over channels and bins of (p-q)^2/(p+q+1e-12). Range [0,6]
// for 3-channel inputs.
double color_hist_chi2(const Image& a, const Image& b);

} // namespace pixshuf
