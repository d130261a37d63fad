#pragma once

#include <cmath>
#include <cstddef>

// Shared between the scalar reference kernels and the SIMD variants; the SIMD
// code reuses the scalar functions for loop tails so results stay bit-equal.

namespace pixshuf::kernels {

// Clamped bilinear sample location. x_lim = w-1, y_lim = h-1.
struct Sample {
    std::size_t base00, base10, base01, base11;
    double fx, fy;
    bool clamped_x, clamped_y;
};

inline Sample locate(int w, int /*h*/, int ch, double rx, double ry, int x_lim, int y_lim) {
    Sample s;
    double sx = rx < 0.0 ? 0.0 : (rx > x_lim ? double(x_lim) : rx);
    double sy = ry < 0.0 ? 0.0 : (ry > y_lim ? double(y_lim) : ry);
    double x0f = std::floor(sx);
    double y0f = std::floor(sy);
    int ix0 = int(x0f);
    int iy0 = int(y0f);
    int ix1 = ix0 + 1 < x_lim ? ix0 + 1 : x_lim;
    int iy1 = iy0 + 1 < y_lim ? iy0 + 1 : y_lim;
    s.fx = sx - x0f;
    s.fy = sy - y0f;
    s.base00 = (std::size_t(iy0) * w + ix0) * ch;
    s.base10 = (std::size_t(iy0) * w + ix1) * ch;
    s.base01 = (std::size_t(iy1) * w + ix0) * ch;
    s.base11 = (std::size_t(iy1) * w + ix1) * ch;
    s.clamped_x = rx <= 0.0 || rx >= x_lim;
    s.clamped_y = ry <= 0.0 || ry >= y_lim;
    return s;
}

namespace scalar {

void accum_joint(const double* wa, const double* wb, std::size_t n_px, int bins, double* hist);
void mi_grad_reduce(const double* wa, const double* dwb, const double* log_table,
                    std::size_t n_px, int bins, double* scratch, double* grad_out);
void warp_bilinear(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* out);
void warp_gradient(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* gx, double* gy);
void adam_update(double* params, const double* grads, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bias1, double bias2);

} // namespace scalar

} // namespace pixshuf::kernels
