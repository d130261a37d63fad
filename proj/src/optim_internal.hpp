#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

// Align-corners bilinear map between a coarse control grid and the dense
// field, plus its transpose for gradient pullback. Internal to the optimizer;
// exposed in a header so the adjoint identity is unit-testable.

namespace pixshuf::detail {

struct ControlGrid {
    int dense_w = 0, dense_h = 0, gw = 0, gh = 0;
    std::vector<int> x0, x1, y0, y1;
    std::vector<double> fx, fy;

    void init(int w, int h, int factor) {
        dense_w = w;
        dense_h = h;
        gw = std::max(2, (w + factor - 1) / factor);
        gh = std::max(2, (h + factor - 1) / factor);
        x0.resize(w);
        x1.resize(w);
        fx.resize(w);
        y0.resize(h);
        y1.resize(h);
        fy.resize(h);
        const double sx = w > 1 ? double(gw - 1) / (w - 1) : 0.0;
        const double sy = h > 1 ? double(gh - 1) / (h - 1) : 0.0;
        for (int x = 0; x < w; ++x) {
            double c = std::clamp(x * sx, 0.0, double(gw - 1));
            x0[x] = int(c);
            x1[x] = std::min(x0[x] + 1, gw - 1);
            fx[x] = c - x0[x];
        }
        for (int y = 0; y < h; ++y) {
            double c = std::clamp(y * sy, 0.0, double(gh - 1));
            y0[y] = int(c);
            y1[y] = std::min(y0[y] + 1, gh - 1);
            fy[y] = c - y0[y];
        }
    }

    std::size_t grid_size() const { return std::size_t(gw) * gh; }

    void expand(const double* grid, double* dense) const {
        for (int y = 0; y < dense_h; ++y) {
            const std::size_t r0 = std::size_t(y0[y]) * gw;
            const std::size_t r1 = std::size_t(y1[y]) * gw;
            const double wy = fy[y];
            double* out = dense + std::size_t(y) * dense_w;
            for (int x = 0; x < dense_w; ++x) {
                double top = grid[r0 + x0[x]] + fx[x] * (grid[r0 + x1[x]] - grid[r0 + x0[x]]);
                double bot = grid[r1 + x0[x]] + fx[x] * (grid[r1 + x1[x]] - grid[r1 + x0[x]]);
                out[x] = top + wy * (bot - top);
            }
        }
    }

    void transpose(const double* dense_grad, double* grid_grad) const {
        std::fill(grid_grad, grid_grad + grid_size(), 0.0);
        for (int y = 0; y < dense_h; ++y) {
            const std::size_t r0 = std::size_t(y0[y]) * gw;
            const std::size_t r1 = std::size_t(y1[y]) * gw;
            const double wy = fy[y];
            const double* in = dense_grad + std::size_t(y) * dense_w;
            for (int x = 0; x < dense_w; ++x) {
                const double g = in[x];
                const double wx = fx[x];
                grid_grad[r0 + x0[x]] += g * (1.0 - wx) * (1.0 - wy);
                grid_grad[r0 + x1[x]] += g * wx * (1.0 - wy);
                grid_grad[r1 + x0[x]] += g * (1.0 - wx) * wy;
                grid_grad[r1 + x1[x]] += g * wx * wy;
            }
        }
    }

    // Samples a dense component at the control-point positions (level init).
    void restrict_sample(const double* dense, double* grid) const {
        const double sx = gw > 1 ? double(dense_w - 1) / (gw - 1) : 0.0;
        const double sy = gh > 1 ? double(dense_h - 1) / (gh - 1) : 0.0;
        for (int j = 0; j < gh; ++j) {
            double cy = std::clamp(j * sy, 0.0, double(dense_h - 1));
            int iy0 = int(cy);
            int iy1 = std::min(iy0 + 1, dense_h - 1);
            double wy = cy - iy0;
            for (int i = 0; i < gw; ++i) {
                double cx = std::clamp(i * sx, 0.0, double(dense_w - 1));
                int ix0 = int(cx);
                int ix1 = std::min(ix0 + 1, dense_w - 1);
                double wx = cx - ix0;
                const double* r0 = dense + std::size_t(iy0) * dense_w;
                const double* r1 = dense + std::size_t(iy1) * dense_w;
                double top = r0[ix0] + wx * (r0[ix1] - r0[ix0]);
                double bot = r1[ix0] + wx * (r1[ix1] - r1[ix0]);
                grid[std::size_t(j) * gw + i] = top + wy * (bot - top);
            }
        }
    }
};

} // namespace pixshuf::detail
