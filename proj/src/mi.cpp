#include "pixshuf/mi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mi_internal.hpp"
#include "pixshuf/kernels.hpp"
#include "pixshuf/parallel.hpp"

namespace pixshuf {

namespace {

constexpr std::size_t kPixelChunk = 4096;

void check_pair(const Image& a, const Image& b) {
    if (!a.same_dims(b))
        throw DimensionError("image pair dimensions differ: " + std::to_string(a.width) + "x" +
                             std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                             std::to_string(b.height));
    if (a.channels != 1 || b.channels != 1)
        throw DimensionError("MI estimator expects single-channel images");
}

} // namespace

void HistogramConfig::validate() const {
    if (bins < 2) throw DimensionError("histogram needs at least 2 bins");
    if (!(sigma > 0.0)) throw DimensionError("kernel bandwidth must be positive");
    if (!(epsilon > 0.0)) throw DimensionError("probability floor must be positive");
}

namespace detail {

void weights_row(double v, int bins, double sigma, double step_ratio, double* w, double* dw) {
    const double t = v * (bins - 1);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    int k0 = int(std::lround(t));
    k0 = std::clamp(k0, 0, bins - 1);

    // One exp at the peak bin, then constant-ratio recurrences outward; every
    // factor is <= 1 so the row can only underflow, never overflow.
    const double d0 = k0 - t;
    w[k0] = std::exp(-(d0 * d0) * inv2s2);
    double up = std::exp(-(2.0 * d0 + 1.0) * inv2s2);
    for (int k = k0 + 1; k < bins; ++k) {
        w[k] = w[k - 1] * up;
        up *= step_ratio;
    }
    double down = std::exp((2.0 * d0 - 1.0) * inv2s2);
    for (int k = k0 - 1; k >= 0; --k) {
        w[k] = w[k + 1] * down;
        down *= step_ratio;
    }

    double sum = 0.0;
    for (int k = 0; k < bins; ++k) sum += w[k];
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        // Degenerate bandwidth: the entire row underflowed. Collapse to the
        // nearest bin; the weights are then locally constant in v, so the
        // derivative is zero.
        for (int k = 0; k < bins; ++k) w[k] = 0.0;
        w[k0] = 1.0;
        if (dw != nullptr)
            for (int k = 0; k < bins; ++k) dw[k] = 0.0;
        return;
    }
    const double inv = 1.0 / sum;
    for (int k = 0; k < bins; ++k) w[k] *= inv;

    if (dw != nullptr) {
        // d w_k / d v with the renormalization term, times dt/dv = bins-1.
        double mean = 0.0;
        for (int k = 0; k < bins; ++k) mean += w[k] * (k - t);
        const double scale = (bins - 1) / (sigma * sigma);
        for (int k = 0; k < bins; ++k) dw[k] = w[k] * ((k - t) - mean) * scale;
    }
}

void WeightTable::compute(std::span<const double> values, const HistogramConfig& cfg,
                          bool with_deriv) {
    bins = cfg.bins;
    n = values.size();
    w.resize(n * bins);
    dw.resize(with_deriv ? n * bins : 0);
    const double step_ratio = std::exp(-1.0 / (cfg.sigma * cfg.sigma));
    double* dwp = with_deriv ? dw.data() : nullptr;
    parallel::for_chunks(n, kPixelChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            weights_row(values[i], bins, cfg.sigma, step_ratio, w.data() + i * bins,
                        dwp != nullptr ? dwp + i * bins : nullptr);
    });
}

JointHistogram accumulate_joint(const WeightTable& wa, const WeightTable& wb) {
    const int B = wa.bins;
    const std::size_t n = wa.n;
    const std::size_t cells = std::size_t(B) * B;
    const auto& ops = kernels::active();

    // Fixed-size pixel chunks accumulated into per-chunk partial histograms,
    // merged in chunk order: results are independent of the thread count.
    const std::size_t n_chunks = parallel::chunk_count(n, kPixelChunk);
    std::vector<double> partials(n_chunks * cells, 0.0);
    parallel::for_chunks(n, kPixelChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        ops.accum_joint(wa.w.data() + begin * B, wb.w.data() + begin * B, end - begin, B,
                        partials.data() + ci * cells);
    });

    JointHistogram h;
    h.bins = B;
    h.joint.assign(cells, 0.0);
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {
        const double* part = partials.data() + ci * cells;
        for (std::size_t i = 0; i < cells; ++i) h.joint[i] += part[i];
    }
    const double inv_n = 1.0 / double(n);
    for (std::size_t i = 0; i < cells; ++i) h.joint[i] *= inv_n;

    h.p_a.assign(B, 0.0);
    h.p_b.assign(B, 0.0);
    for (int k = 0; k < B; ++k) {
        const double* row = h.joint.data() + std::size_t(k) * B;
        for (int l = 0; l < B; ++l) {
            h.p_a[k] += row[l];
            h.p_b[l] += row[l];
        }
    }
    return h;
}

double mi_value(const JointHistogram& h, double epsilon) {
    const int B = h.bins;
    double mi = 0.0;
    for (int k = 0; k < B; ++k) {
        const double pa = h.p_a[k];
        const double* row = h.joint.data() + std::size_t(k) * B;
        for (int l = 0; l < B; ++l) {
            const double p = row[l];
            if (p < epsilon) continue;
            mi += p * std::log(p / (pa * h.p_b[l]));
        }
    }
    return mi;
}

void grad_log_table(const JointHistogram& h, double epsilon, std::vector<double>& log_table) {
    const int B = h.bins;
    log_table.assign(std::size_t(B) * B, 0.0);

    // Exact derivative of the floored objective w.r.t. p(k,l), reduced to the
    // terms that survive sum_l dw_b(l) = 0: cells below the floor still feel
    // the marginal term -S_b(l)/p_b(l), where S_b(l) is the column mass of
    // cells above the floor. With no flooring active this collapses to the
    // usual ln(p/p_b), the +1 cancelling against S_b/p_b = 1.
    std::vector<double> col_ratio(B, 0.0);
    for (int l = 0; l < B; ++l) {
        double above = 0.0;
        for (int k = 0; k < B; ++k) {
            const double p = h.joint[std::size_t(k) * B + l];
            if (p >= epsilon) above += p;
        }
        col_ratio[l] = h.p_b[l] > 0.0 ? above / h.p_b[l] : 0.0;
    }

    for (int k = 0; k < B; ++k) {
        const double* row = h.joint.data() + std::size_t(k) * B;
        double* trow = log_table.data() + std::size_t(k) * B;
        for (int l = 0; l < B; ++l) {
            const double p = row[l];
            const double own = p >= epsilon ? std::log(p / h.p_b[l]) + 1.0 : 0.0;
            trow[l] = own - col_ratio[l];
        }
    }
}

void grad_from_tables(const WeightTable& wa, const WeightTable& wb,
                      const std::vector<double>& log_table, std::vector<double>& grad) {
    const int B = wa.bins;
    const std::size_t n = wa.n;
    grad.assign(n, 0.0);
    const auto& ops = kernels::active();
    const std::size_t n_chunks = parallel::chunk_count(n, kPixelChunk);
    std::vector<double> scratch(n_chunks * B);
    parallel::for_chunks(n, kPixelChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        ops.mi_grad_reduce(wa.w.data() + begin * B, wb.dw.data() + begin * B, log_table.data(),
                           end - begin, B, scratch.data() + ci * B, grad.data() + begin);
    });
    const double inv_n = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] *= inv_n;
}

} // namespace detail

void parzen_weights(double v, const HistogramConfig& cfg, std::span<double> w,
                    double* d_dv_or_null) {
    cfg.validate();
    if (int(w.size()) != cfg.bins) throw DimensionError("weight span size must equal bins");
    const double step_ratio = std::exp(-1.0 / (cfg.sigma * cfg.sigma));
    detail::weights_row(v, cfg.bins, cfg.sigma, step_ratio, w.data(), d_dv_or_null);
}

JointHistogram joint_histogram(const Image& a, const Image& b, const HistogramConfig& cfg) {
    cfg.validate();
    check_pair(a, b);
    detail::WeightTable wa, wb;
    wa.compute(a.data, cfg, false);
    wb.compute(b.data, cfg, false);
    return detail::accumulate_joint(wa, wb);
}

double mutual_information(const JointHistogram& h, double epsilon) {
    return detail::mi_value(h, epsilon);
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

MiResult mi_and_gradient(const Image& a, const Image& b, const HistogramConfig& cfg) {
    cfg.validate();
    check_pair(a, b);
    detail::WeightTable wa, wb;
    wa.compute(a.data, cfg, false);
    wb.compute(b.data, cfg, true);
    JointHistogram h = detail::accumulate_joint(wa, wb);

    MiResult res;
    res.mi = detail::mi_value(h, cfg.epsilon);
    std::vector<double> log_table;
    detail::grad_log_table(h, cfg.epsilon, log_table);
    detail::grad_from_tables(wa, wb, log_table, res.grad_b);
    return res;
}

} // namespace pixshuf
