#include "pixshuf/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace pixshuf {

namespace {

constexpr int kWin = 8;
constexpr int kStride = 4;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

double window_ssim(const Image& a, const Image& b, int x0, int y0, int wx, int wy) {
    const int n = wx * wy;
    double sum_a = 0.0, sum_b = 0.0;
    for (int y = y0; y < y0 + wy; ++y)
        for (int x = x0; x < x0 + wx; ++x) {
            sum_a += a.at(x, y, 0);
            sum_b += b.at(x, y, 0);
        }
    const double mu_a = sum_a / n;
    const double mu_b = sum_b / n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (int y = y0; y < y0 + wy; ++y)
        for (int x = x0; x < x0 + wx; ++x) {
            const double da = a.at(x, y, 0) - mu_a;
            const double db = b.at(x, y, 0) - mu_b;
            va += da * da;
            vb += db * db;
            cov += da * db;
        }
    va /= n;
    vb /= n;
    cov /= n;
    const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
    const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (va + vb + kC2);
    return num / den;
}

} // namespace

double ssim_luma(const Image& a, const Image& b) {
    if (!a.same_dims(b)) throw DimensionError("ssim_luma: image dimensions differ");
    const Image la = to_luma(a);
    const Image lb = to_luma(b);

    if (la.width < kWin || la.height < kWin)
        return window_ssim(la, lb, 0, 0, la.width, la.height);

    double total = 0.0;
    long count = 0;
    for (int y = 0; y + kWin <= la.height; y += kStride)
        for (int x = 0; x + kWin <= la.width; x += kStride) {
            total += window_ssim(la, lb, x, y, kWin, kWin);
            ++count;
        }
    return total / count;
}

double color_hist_chi2(const Image& a, const Image& b) {
    if (a.channels != 3 || b.channels != 3)
        throw DimensionError("color_hist_chi2 expects 3-channel images");
    constexpr int kBins = 32;
    double chi2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        double pa[kBins] = {0}, pb[kBins] = {0};
        auto fill = [&](const Image& img, double* hist) {
            const std::size_t n = img.pixel_count();
            for (std::size_t i = 0; i < n; ++i) {
                int bin = int(img.data[i * 3 + c] * kBins);
                hist[std::clamp(bin, 0, kBins - 1)] += 1.0;
            }
            for (int k = 0; k < kBins; ++k) hist[k] /= double(n);
        };
        fill(a, pa);
        fill(b, pb);
        for (int k = 0; k < kBins; ++k) {
            const double d = pa[k] - pb[k];
            chi2 += d * d / (pa[k] + pb[k] + 1e-12);
        }
    }
    return chi2;
}

} // namespace pixshuf
