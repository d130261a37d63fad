// AVX2 kernel variants. Compiled with -mavx2 on x86-64; empty elsewhere.
// Every arithmetic step mirrors the scalar reference (plain mul/add, no FMA)
// so outputs are bit-identical; test_kernels enforces this.

#include "pixshuf/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstdint>
#include <limits>

#include "kernels_internal.hpp"

namespace pixshuf::kernels::avx2 {

namespace {

inline double reduce_lanes(__m256d acc, const double* db, const double* u, int tail_begin,
                           int bins) {
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (int l = tail_begin; l < bins; ++l) s[l & 3] = s[l & 3] + db[l] * u[l];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

} // namespace

void accum_joint(const double* wa, const double* wb, std::size_t n_px, int bins, double* hist) {
    const int vec_end = bins & ~3;
    for (std::size_t p = 0; p < n_px; ++p) {
        const double* a = wa + p * bins;
        const double* b = wb + p * bins;
        for (int k = 0; k < bins; ++k) {
            const double ak = a[k];
            const __m256d vak = _mm256_set1_pd(ak);
            double* row = hist + std::size_t(k) * bins;
            int l = 0;
            for (; l < vec_end; l += 4) {
                __m256d r = _mm256_loadu_pd(row + l);
                __m256d wbv = _mm256_loadu_pd(b + l);
                r = _mm256_add_pd(r, _mm256_mul_pd(vak, wbv));
                _mm256_storeu_pd(row + l, r);
            }
            for (; l < bins; ++l) row[l] = row[l] + ak * b[l];
        }
    }
}

void mi_grad_reduce(const double* wa, const double* dwb, const double* log_table,
                    std::size_t n_px, int bins, double* scratch, double* grad_out) {
    const int vec_end = bins & ~3;
    for (std::size_t p = 0; p < n_px; ++p) {
        const double* a = wa + p * bins;
        const double* db = dwb + p * bins;
        for (int l = 0; l < bins; ++l) scratch[l] = 0.0;
        for (int k = 0; k < bins; ++k) {
            const double ak = a[k];
            const __m256d vak = _mm256_set1_pd(ak);
            const double* trow = log_table + std::size_t(k) * bins;
            int l = 0;
            for (; l < vec_end; l += 4) {
                __m256d u = _mm256_loadu_pd(scratch + l);
                __m256d t = _mm256_loadu_pd(trow + l);
                u = _mm256_add_pd(u, _mm256_mul_pd(vak, t));
                _mm256_storeu_pd(scratch + l, u);
            }
            for (; l < bins; ++l) scratch[l] = scratch[l] + ak * trow[l];
        }
        __m256d acc = _mm256_setzero_pd();
        for (int l = 0; l < vec_end; l += 4) {
            __m256d d = _mm256_loadu_pd(db + l);
            __m256d u = _mm256_loadu_pd(scratch + l);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(d, u));
        }
        grad_out[p] = reduce_lanes(acc, db, scratch, vec_end, bins);
    }
}

namespace {

struct LaneSamples {
    alignas(32) double fx[4];
    alignas(32) double fy[4];
    alignas(16) std::int32_t i00[4];
    alignas(16) std::int32_t i10[4];
    alignas(16) std::int32_t i01[4];
    alignas(16) std::int32_t i11[4];
    bool cx[4], cy[4];
};

inline void prep_lanes(int w, int h, int ch, const double* dx, const double* dy, std::size_t p0,
                       LaneSamples& ls) {
    const int x_lim = w - 1, y_lim = h - 1;
    for (int j = 0; j < 4; ++j) {
        const std::size_t p = p0 + j;
        const int x = int(p % std::size_t(w));
        const int y = int(p / std::size_t(w));
        Sample s = locate(w, h, ch, double(x) + dx[p], double(y) + dy[p], x_lim, y_lim);
        ls.fx[j] = s.fx;
        ls.fy[j] = s.fy;
        ls.i00[j] = std::int32_t(s.base00);
        ls.i10[j] = std::int32_t(s.base10);
        ls.i01[j] = std::int32_t(s.base01);
        ls.i11[j] = std::int32_t(s.base11);
        ls.cx[j] = s.clamped_x;
        ls.cy[j] = s.clamped_y;
    }
}

inline __m256d gather_corner(const double* src, const std::int32_t* idx, int c) {
    __m128i v = _mm_load_si128(reinterpret_cast<const __m128i*>(idx));
    if (c != 0) v = _mm_add_epi32(v, _mm_set1_epi32(c));
    return _mm256_i32gather_pd(src, v, 8);
}

inline __m256d bool_mask(const bool* b) {
    return _mm256_castsi256_pd(_mm256_set_epi64x(b[3] ? -1 : 0, b[2] ? -1 : 0, b[1] ? -1 : 0,
                                                 b[0] ? -1 : 0));
}

inline bool gather_safe(int w, int h, int ch) {
    return std::size_t(w) * h * ch <= std::size_t(std::numeric_limits<std::int32_t>::max());
}

} // namespace

void warp_bilinear(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* out) {
    if (!gather_safe(w, h, ch)) {
        scalar::warp_bilinear(src, w, h, ch, dx, dy, px0, px1, out);
        return;
    }
    std::size_t p = px0;
    LaneSamples ls;
    alignas(32) double tmp[4];
    for (; p + 4 <= px1; p += 4) {
        prep_lanes(w, h, ch, dx, dy, p, ls);
        const __m256d fx = _mm256_load_pd(ls.fx);
        const __m256d fy = _mm256_load_pd(ls.fy);
        for (int c = 0; c < ch; ++c) {
            __m256d v00 = gather_corner(src, ls.i00, c);
            __m256d v10 = gather_corner(src, ls.i10, c);
            __m256d v01 = gather_corner(src, ls.i01, c);
            __m256d v11 = gather_corner(src, ls.i11, c);
            __m256d top = _mm256_add_pd(v00, _mm256_mul_pd(fx, _mm256_sub_pd(v10, v00)));
            __m256d bot = _mm256_add_pd(v01, _mm256_mul_pd(fx, _mm256_sub_pd(v11, v01)));
            __m256d res = _mm256_add_pd(top, _mm256_mul_pd(fy, _mm256_sub_pd(bot, top)));
            if (ch == 1) {
                _mm256_storeu_pd(out + p, res);
            } else {
                _mm256_store_pd(tmp, res);
                for (int j = 0; j < 4; ++j) out[(p + j) * ch + c] = tmp[j];
            }
        }
    }
    if (p < px1) scalar::warp_bilinear(src, w, h, ch, dx, dy, p, px1, out);
}

void warp_gradient(const double* src, int w, int h, int ch, const double* dx, const double* dy,
                   std::size_t px0, std::size_t px1, double* gx, double* gy) {
    if (!gather_safe(w, h, ch)) {
        scalar::warp_gradient(src, w, h, ch, dx, dy, px0, px1, gx, gy);
        return;
    }
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t p = px0;
    LaneSamples ls;
    alignas(32) double tx[4], ty[4];
    for (; p + 4 <= px1; p += 4) {
        prep_lanes(w, h, ch, dx, dy, p, ls);
        const __m256d fx = _mm256_load_pd(ls.fx);
        const __m256d fy = _mm256_load_pd(ls.fy);
        const __m256d omfx = _mm256_sub_pd(one, fx);
        const __m256d omfy = _mm256_sub_pd(one, fy);
        const __m256d mx = bool_mask(ls.cx);
        const __m256d my = bool_mask(ls.cy);
        for (int c = 0; c < ch; ++c) {
            __m256d v00 = gather_corner(src, ls.i00, c);
            __m256d v10 = gather_corner(src, ls.i10, c);
            __m256d v01 = gather_corner(src, ls.i01, c);
            __m256d v11 = gather_corner(src, ls.i11, c);
            __m256d ddx = _mm256_add_pd(_mm256_mul_pd(omfy, _mm256_sub_pd(v10, v00)),
                                        _mm256_mul_pd(fy, _mm256_sub_pd(v11, v01)));
            __m256d ddy = _mm256_add_pd(_mm256_mul_pd(omfx, _mm256_sub_pd(v01, v00)),
                                        _mm256_mul_pd(fx, _mm256_sub_pd(v11, v10)));
            ddx = _mm256_blendv_pd(ddx, zero, mx);
            ddy = _mm256_blendv_pd(ddy, zero, my);
            if (ch == 1) {
                _mm256_storeu_pd(gx + p, ddx);
                _mm256_storeu_pd(gy + p, ddy);
            } else {
                _mm256_store_pd(tx, ddx);
                _mm256_store_pd(ty, ddy);
                for (int j = 0; j < 4; ++j) {
                    gx[(p + j) * ch + c] = tx[j];
                    gy[(p + j) * ch + c] = ty[j];
                }
            }
        }
    }
    if (p < px1) scalar::warp_gradient(src, w, h, ch, dx, dy, p, px1, gx, gy);
}

void adam_update(double* params, const double* grads, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bias1, double bias2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d vomb2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vbias1 = _mm256_set1_pd(bias1);
    const __m256d vbias2 = _mm256_set1_pd(bias2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grads + i);
        __m256d mi = _mm256_loadu_pd(m + i);
        __m256d vi = _mm256_loadu_pd(v + i);
        mi = _mm256_add_pd(_mm256_mul_pd(vb1, mi), _mm256_mul_pd(vomb1, g));
        vi = _mm256_add_pd(_mm256_mul_pd(vb2, vi), _mm256_mul_pd(vomb2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_div_pd(mi, vbias1);
        const __m256d vhat = _mm256_div_pd(vi, vbias2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d pv = _mm256_loadu_pd(params + i);
        pv = _mm256_sub_pd(pv, _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom)));
        _mm256_storeu_pd(params + i, pv);
    }
    if (i < n)
        scalar::adam_update(params + i, grads + i, m + i, v + i, n - i, lr, beta1, beta2, eps,
                            bias1, bias2);
}

} // namespace pixshuf::kernels::avx2

namespace pixshuf::kernels {

const Ops* avx2_ops_impl() {
    static const Ops ops = {
        "avx2",
        &avx2::accum_joint,
        &avx2::mi_grad_reduce,
        &avx2::warp_bilinear,
        &avx2::warp_gradient,
        &avx2::adam_update,
    };
    return &ops;
}

} // namespace pixshuf::kernels

#else // !__AVX2__

namespace pixshuf::kernels {
const Ops* avx2_ops_impl() { return nullptr; }
} // namespace pixshuf::kernels

#endif
