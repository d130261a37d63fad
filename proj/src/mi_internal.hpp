#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pixshuf/mi.hpp"

// Staged internals of the Parzen MI estimator, shared with the optimizer so
// the content image's weight table can be computed once per pyramid level.

namespace pixshuf::detail {

// Per-pixel normalized Gaussian bin weights (n x bins) and optionally their
// derivatives w.r.t. intensity.
struct WeightTable {
    int bins = 0;
    std::size_t n = 0;
    std::vector<double> w;  // n * bins
    std::vector<double> dw; // n * bins when derivatives requested, else empty

    void compute(std::span<const double> values, const HistogramConfig& cfg, bool with_deriv);
};

// Single row; dw may be null. Used by WeightTable and the public parzen_weights.
void weights_row(double v, int bins, double sigma, double step_ratio, double* w, double* dw);

JointHistogram accumulate_joint(const WeightTable& wa, const WeightTable& wb);

double mi_value(const JointHistogram& h, double epsilon);

// log_table[k*B+l] = ln(p(k,l)/p_b(l)) where p >= epsilon, else 0.
void grad_log_table(const JointHistogram& h, double epsilon, std::vector<double>& log_table);

// grad[i] = (1/n) * sum_l dwb[i,l] * sum_k wa[i,k] * log_table[k,l].
void grad_from_tables(const WeightTable& wa, const WeightTable& wb,
                      const std::vector<double>& log_table, std::vector<double>& grad);

} // namespace pixshuf::detail
