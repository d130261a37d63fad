// Scalar reference kernels. These define the exact operation order; the AVX2
// variants must reproduce it bit-for-bit (plain mul/add, no FMA contraction —
// the build sets -ffp-contract=off).

#include <cmath>
#include <cstddef>

#include "kernels_internal.hpp"
#include "pixshuf/kernels.hpp"

namespace pixshuf::kernels::scalar {

void accum_joint(const double* wa, const double* wb, std::size_t n_px, int bins, double* hist) {
    for (std::size_t p = 0; p < n_px; ++p) {
        const double* a = wa + p * bins;
        const double* b = wb + p * bins;
        for (int k = 0; k < bins; ++k) {
            const double ak = a[k];
            double* row = hist + std::size_t(k) * bins;
            for (int l = 0; l < bins; ++l) row[l] = row[l] + ak * b[l];
        }
    }
}

void mi_grad_reduce(const double* wa, const double* dwb, const double* log_table,
                    std::size_t n_px, int bins, double* scratch, double* grad_out) {
    for (std::size_t p = 0; p < n_px; ++p) {
        const double* a = wa + p * bins;
        const double* db = dwb + p * bins;
        for (int l = 0; l < bins; ++l) scratch[l] = 0.0;
        for (int k = 0; k < bins; ++k) {
            const double ak = a[k];
            const double* trow = log_table + std::size_t(k) * bins;
            for (int l = 0; l < bins; ++l) scratch[l] = scratch[l] + ak * trow[l];
        }
        // lane-strided partial sums, combined the same way as the SIMD variant
        double s[4] = {0.0, 0.0, 0.0, 0.0};
        for (int l = 0; l < bins; ++l) s[l & 3] = s[l & 3] + db[l] * scratch[l];
        grad_out[p] = (s[0] + s[1]) + (s[2] + s[3]);
    }
}

void warp_bilinear(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* out) {
    const int x_lim = w - 1, y_lim = h - 1;
    for (std::size_t p = px0; p < px1; ++p) {
        const int x = int(p % std::size_t(w));
        const int y = int(p / std::size_t(w));
        Sample s = locate(w, h, ch, double(x) + dx[p], double(y) + dy[p], x_lim, y_lim);
        for (int c = 0; c < ch; ++c) {
            double v00 = src[s.base00 + c], v10 = src[s.base10 + c];
            double v01 = src[s.base01 + c], v11 = src[s.base11 + c];
            double top = v00 + s.fx * (v10 - v00);
            double bot = v01 + s.fx * (v11 - v01);
            out[p * ch + c] = top + s.fy * (bot - top);
        }
    }
}

void warp_gradient(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* gx, double* gy) {
    const int x_lim = w - 1, y_lim = h - 1;
    for (std::size_t p = px0; p < px1; ++p) {
        const int x = int(p % std::size_t(w));
        const int y = int(p / std::size_t(w));
        Sample s = locate(w, h, ch, double(x) + dx[p], double(y) + dy[p], x_lim, y_lim);
        const double omfx = 1.0 - s.fx;
        const double omfy = 1.0 - s.fy;
        for (int c = 0; c < ch; ++c) {
            double v00 = src[s.base00 + c], v10 = src[s.base10 + c];
            double v01 = src[s.base01 + c], v11 = src[s.base11 + c];
            double ddx = omfy * (v10 - v00) + s.fy * (v11 - v01);
            double ddy = omfx * (v01 - v00) + s.fx * (v11 - v10);
            gx[p * ch + c] = s.clamped_x ? 0.0 : ddx;
            gy[p * ch + c] = s.clamped_y ? 0.0 : ddy;
        }
    }
}

void adam_update(double* params, const double* grads, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bias1, double bias2) {
    const double omb1 = 1.0 - beta1;
    const double omb2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        m[i] = beta1 * m[i] + omb1 * g;
        v[i] = beta2 * v[i] + omb2 * (g * g);
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        params[i] = params[i] - lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

} // namespace pixshuf::kernels::scalar

namespace pixshuf::kernels {

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",
        &scalar::accum_joint,
        &scalar::mi_grad_reduce,
        &scalar::warp_bilinear,
        &scalar::warp_gradient,
        &scalar::adam_update,
    };
    return ops;
}

} // namespace pixshuf::kernels
