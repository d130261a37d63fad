#pragma once

#include <cstddef>

// Hot inner loops, provided as a scalar reference implementation plus an AVX2
// variant selected at runtime. Both variants perform the same IEEE operations
// in the same order, so their results are required to be bit-identical; the
// equivalence tests enforce this. None of these functions allocate.

namespace pixshuf::kernels {

struct Ops {
    const char* name;

    // hist[k*bins + l] += wa[p*bins + k] * wb[p*bins + l] over pixels p in [0, n_px).
    void (*accum_joint)(const double* wa, const double* wb, std::size_t n_px, int bins,
                        double* hist);

    // grad_out[p] = sum_l dwb[p*bins+l] * (sum_k wa[p*bins+k] * log_table[k*bins+l]),
    // with the l-sum accumulated in four lane-strided partials combined as
    // (s0+s1)+(s2+s3). scratch must hold `bins` doubles.
    void (*mi_grad_reduce)(const double* wa, const double* dwb, const double* log_table,
                           std::size_t n_px, int bins, double* scratch, double* grad_out);

    // Bilinear sample of a channel-interleaved image at (x + dx[p], y + dy[p]),
    // edge-clamped, for pixels p in [px0, px1).
    void (*warp_bilinear)(const double* src, int w, int h, int ch, const double* dx,
                          const double* dy, std::size_t px0, std::size_t px1, double* out);

    // Partial derivatives of the bilinear sample w.r.t. dx and dy; zero in a
    // direction whose raw coordinate lies outside the open interval (0, size-1).
    void (*warp_gradient)(const double* src, int w, int h, int ch, const double* dx,
                          const double* dy, std::size_t px0, std::size_t px1, double* gx,
                          double* gy);

    // One Adam update over n parameters. bias1 = 1-beta1^t, bias2 = 1-beta2^t.
    void (*adam_update)(double* params, const double* grads, double* m, double* v,
                        std::size_t n, double lr, double beta1, double beta2, double eps,
                        double bias1, double bias2);
};

enum class Backend { Auto, Scalar, Avx2 };

// Active ops. Default: AVX2 when the CPU supports it, unless PIXSHUF_SIMD=scalar.
const Ops& active();
Backend active_backend();

// Force a backend (Auto re-runs detection). Throws std::runtime_error when the
// requested backend is unavailable on this machine.
void set_backend(Backend b);

const Ops& scalar_ops();
const Ops* avx2_ops(); // nullptr when compiled out or unsupported at runtime

} // namespace pixshuf::kernels
