#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "pixshuf/kernels.hpp"

using namespace pixshuf;

// The AVX2 variants must reproduce the scalar reference bit-for-bit: same
// IEEE operations in the same order. Every check below is exact equality.

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + fixtures::uniform01(rng) * (hi - lo);
    return v;
}

// normalized random weight rows, like the Parzen tables
std::vector<double> weight_rows(std::size_t n_px, int bins, std::mt19937_64& rng) {
    std::vector<double> w(n_px * bins);
    for (std::size_t p = 0; p < n_px; ++p) {
        double sum = 0.0;
        for (int k = 0; k < bins; ++k) {
            w[p * bins + k] = fixtures::uniform01(rng) + 1e-6;
            sum += w[p * bins + k];
        }
        for (int k = 0; k < bins; ++k) w[p * bins + k] /= sum;
    }
    return w;
}

} // namespace

TEST_CASE("backend plumbing") {
    CHECK(std::string(kernels::scalar_ops().name) == "scalar");
    kernels::set_backend(kernels::Backend::Scalar);
    CHECK(kernels::active_backend() == kernels::Backend::Scalar);
    kernels::set_backend(kernels::Backend::Auto);
    if (kernels::avx2_ops() == nullptr)
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::Avx2), std::runtime_error);
    kernels::set_backend(kernels::Backend::Auto);
}

TEST_CASE("accum_joint: scalar and AVX2 are bit-identical") {
    const kernels::Ops* avx2 = kernels::avx2_ops();
    if (avx2 == nullptr) return; // no AVX2 on this machine
    std::mt19937_64 rng(101);
    for (int bins : {2, 7, 8, 16, 32}) {
        const std::size_t n_px = 257;
        auto wa = weight_rows(n_px, bins, rng);
        auto wb = weight_rows(n_px, bins, rng);
        std::vector<double> h_scalar(std::size_t(bins) * bins, 0.0), h_avx2 = h_scalar;
        kernels::scalar_ops().accum_joint(wa.data(), wb.data(), n_px, bins, h_scalar.data());
        avx2->accum_joint(wa.data(), wb.data(), n_px, bins, h_avx2.data());
        CHECK(bitwise_equal(h_scalar, h_avx2));
    }
}

TEST_CASE("mi_grad_reduce: scalar and AVX2 are bit-identical") {
    const kernels::Ops* avx2 = kernels::avx2_ops();
    if (avx2 == nullptr) return;
    std::mt19937_64 rng(202);
    for (int bins : {2, 7, 8, 16, 32}) {
        const std::size_t n_px = 133;
        auto wa = weight_rows(n_px, bins, rng);
        auto dwb = random_vec(n_px * bins, rng, -3.0, 3.0);
        auto logt = random_vec(std::size_t(bins) * bins, rng, -8.0, 2.0);
        std::vector<double> scratch(bins), g_scalar(n_px), g_avx2(n_px);
        kernels::scalar_ops().mi_grad_reduce(wa.data(), dwb.data(), logt.data(), n_px, bins,
                                             scratch.data(), g_scalar.data());
        avx2->mi_grad_reduce(wa.data(), dwb.data(), logt.data(), n_px, bins, scratch.data(),
                             g_avx2.data());
        CHECK(bitwise_equal(g_scalar, g_avx2));
    }
}

TEST_CASE("warp kernels: scalar and AVX2 are bit-identical") {
    const kernels::Ops* avx2 = kernels::avx2_ops();
    if (avx2 == nullptr) return;
    std::mt19937_64 rng(303);
    for (int ch : {1, 3}) {
        const int w = 23, h = 17;
        const std::size_t n = std::size_t(w) * h;
        auto src = random_vec(n * ch, rng, 0.0, 1.0);
        auto dx = random_vec(n, rng, -30.0, 30.0); // far out of range: exercises clamping
        auto dy = random_vec(n, rng, -30.0, 30.0);
        for (std::size_t i = 0; i < 40; ++i) { // plus exact-knot and zero cases
            dx[i] = double(int(dx[i]));
            dy[i * 3 % n] = 0.0;
        }

        std::vector<double> out_s(n * ch), out_v(n * ch);
        kernels::scalar_ops().warp_bilinear(src.data(), w, h, ch, dx.data(), dy.data(), 0, n,
                                            out_s.data());
        avx2->warp_bilinear(src.data(), w, h, ch, dx.data(), dy.data(), 0, n, out_v.data());
        CHECK(bitwise_equal(out_s, out_v));

        std::vector<double> gx_s(n * ch), gy_s(n * ch), gx_v(n * ch), gy_v(n * ch);
        kernels::scalar_ops().warp_gradient(src.data(), w, h, ch, dx.data(), dy.data(), 0, n,
                                            gx_s.data(), gy_s.data());
        avx2->warp_gradient(src.data(), w, h, ch, dx.data(), dy.data(), 0, n, gx_v.data(),
                            gy_v.data());
        CHECK(bitwise_equal(gx_s, gx_v));
        CHECK(bitwise_equal(gy_s, gy_v));
    }
}

TEST_CASE("adam_update: scalar and AVX2 are bit-identical") {
    const kernels::Ops* avx2 = kernels::avx2_ops();
    if (avx2 == nullptr) return;
    std::mt19937_64 rng(404);
    const std::size_t n = 1003; // non-multiple of 4 exercises the tail
    auto p0 = random_vec(n, rng, -2.0, 2.0);
    auto g = random_vec(n, rng, -1.0, 1.0);
    auto m0 = random_vec(n, rng, -0.1, 0.1);
    auto v0 = random_vec(n, rng, 0.0, 0.01);

    auto ps = p0, ms = m0, vs = v0;
    auto pv = p0, mv = m0, vv = v0;
    for (int t = 1; t <= 3; ++t) {
        const double b1 = 1.0 - std::pow(0.9, t), b2 = 1.0 - std::pow(0.999, t);
        kernels::scalar_ops().adam_update(ps.data(), g.data(), ms.data(), vs.data(), n, 3e-3,
                                          0.9, 0.999, 1e-8, b1, b2);
        avx2->adam_update(pv.data(), g.data(), mv.data(), vv.data(), n, 3e-3, 0.9, 0.999, 1e-8,
                          b1, b2);
    }
    CHECK(bitwise_equal(ps, pv));
    CHECK(bitwise_equal(ms, mv));
    CHECK(bitwise_equal(vs, vv));
}
