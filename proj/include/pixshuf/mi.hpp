#pragma once

#include <span>
#include <vector>

#include "pixshuf/image.hpp"

namespace pixshuf {

// Parameters of the Parzen-window (Gaussian soft-binning) joint histogram.
struct HistogramConfig {
    int bins = 32;           // B >= 2
    double sigma = 1.0;      // kernel bandwidth, in bin units, > 0
    double epsilon = 1e-12;  // probability floor inside logs

    void validate() const;
};

// B x B joint probability table with its two marginals. Sums to 1.
struct JointHistogram {
    int bins = 0;
    std::vector<double> joint; // row-major, joint[k*bins + l]
    std::vector<double> p_a;   // row sums
    std::vector<double> p_b;   // column sums
};

// Gaussian soft-bin weights of one intensity v in [0,1]: t = v*(B-1),
// g_k = exp(-(k-t)^2 / (2 sigma^2)), w = g / sum(g). When the whole row
// underflows (degenerate sigma) the weight collapses to one-hot at the nearest
// bin with zero derivative. d_dv, when non-null, receives dw/dv including the
// renormalization term: w_k * ((k-t) - sum_j w_j (j-t)) / sigma^2 * (B-1).
void parzen_weights(double v, const HistogramConfig& cfg, std::span<double> w,
                    double* d_dv_or_null);

// Soft joint histogram of two equally-sized single-channel images: each pixel
// pair deposits the outer product of its weight rows, mass normalized by pixel
// count. Accumulation is chunked and merged in fixed chunk order so results do
// not depend on the thread count.
JointHistogram joint_histogram(const Image& a, const Image& b, const HistogramConfig& cfg);

// I = sum_{k,l} p(k,l) * ln(p(k,l) / (p_a(k) p_b(l))), in nats; terms with
// p(k,l) < epsilon contribute zero.
double mutual_information(const JointHistogram& h, double epsilon = 1e-12);

// H = -sum p ln p with 0 ln 0 := 0, in nats.
double entropy(std::span<const double> p);

struct MiResult {
    double mi = 0.0;
    std::vector<double> grad_b; // dI / d b_i per pixel
};

// MI plus its closed-form gradient with respect to the intensities of b. The
// gradient flows through the truncated-and-renormalized kernel weights, so it
// matches central finite differences of the actual estimator.
MiResult mi_and_gradient(const Image& a, const Image& b, const HistogramConfig& cfg);

} // namespace pixshuf
