#pragma once

#include <span>
#include <vector>

#include "pixshuf/field.hpp"
#include "pixshuf/image.hpp"
#include "pixshuf/mi.hpp"

namespace pixshuf {

struct AdamParams {
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam accumulators for one flat parameter vector.
struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
    AdamParams hyper;

    explicit OptimizerState(std::size_t n, AdamParams p = {})
        : m(n, 0.0), v(n, 0.0), hyper(p) {}
};

// Standard bias-corrected Adam step, in place. params and grads must match the
// state's size.
void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state);

// Multi-resolution schedule. iters_per_level runs coarsest-first.
struct LevelSchedule {
    int levels = 4;
    std::vector<int> iters_per_level = {200, 200, 200, 200};
    double smooth_weight = 0.05;
    int early_stop_patience = 50;   // iterations without MI improving by > min_improvement
    double min_improvement = 1e-6;

    void validate() const;
};

struct SmoothnessResult {
    double value = 0.0;
    std::vector<double> grad_dx;
    std::vector<double> grad_dy;
};

// lambda * sum of squared forward differences of dx and dy, normalized by the
// pixel count, with its exact gradient.
SmoothnessResult smoothness_penalty(const DisplacementField& field, double lambda);

struct IterationRecord {
    int level = 0;
    int iteration = 0;
    double objective = 0.0; // -MI + smoothness
    double mi = 0.0;
    double smooth = 0.0;
};

struct LevelParams {
    int iters = 200;
    double smooth_weight = 0.05;
    AdamParams adam;
    int early_stop_patience = 50;
    double min_improvement = 1e-6;
    // Optional coarse control-grid parameterization: the field is stored on a
    // grid at 1/factor resolution and bilinearly upsampled to dense before
    // warping; gradients flow back through the transposed interpolation.
    bool control_grid = false;
    int control_grid_factor = 8;
};

struct LevelResult {
    DisplacementField field;
    std::vector<IterationRecord> trace;
};

// Gradient-ascent of MI(content, warp(style)) minus the smoothness penalty, at
// one resolution. content and style must have the same dimensions and channel
// count (1 for luma, 3 for per-channel-sum MI; MI and its gradient are summed
// over channels). Throws NonFiniteError when the objective, gradient, or
// parameters go NaN/Inf.
LevelResult optimize_level(const Image& content, const Image& style,
                           const DisplacementField& init_field, const HistogramConfig& cfg,
                           const LevelParams& params, int level_index = 0);

struct PyramidResult {
    DisplacementField field;
    std::vector<std::vector<IterationRecord>> traces; // coarsest level first
    int levels_run = 0;
};

struct PyramidParams {
    LevelSchedule sched;
    AdamParams adam;
    bool control_grid = false;
    int control_grid_factor = 8;
};

// Coarse-to-fine optimization: downsample2x pyramids of both signal images,
// zero field at the coarsest level, upsample_field between levels. The level
// count is clamped so the coarsest level keeps min(width,height) >= 8.
PyramidResult run_pyramid(const Image& content, const Image& style, const PyramidParams& params,
                          const HistogramConfig& cfg);

} // namespace pixshuf
