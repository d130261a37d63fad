#include "pixshuf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mi_internal.hpp"
#include "optim_internal.hpp"
#include "pixshuf/kernels.hpp"
#include "pixshuf/log.hpp"
#include "pixshuf/parallel.hpp"

namespace pixshuf {

namespace {

constexpr std::size_t kPixelChunk = 4096;

using detail::ControlGrid;

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

void LevelSchedule::validate() const {
    if (levels < 1) throw DimensionError("schedule needs at least one level");
    if (int(iters_per_level.size()) != levels)
        throw DimensionError("iters_per_level length must equal levels");
    for (int it : iters_per_level)
        if (it < 0) throw DimensionError("iteration counts must be non-negative");
    if (smooth_weight < 0.0) throw DimensionError("smoothness weight must be >= 0");
    if (early_stop_patience < 1) throw DimensionError("patience must be >= 1");
}

void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state) {
    if (params.size() != grads.size())
        throw DimensionError("params/grads length mismatch: " + std::to_string(params.size()) +
                             " vs " + std::to_string(grads.size()));
    if (params.size() != state.m.size())
        throw DimensionError("optimizer state sized for " + std::to_string(state.m.size()) +
                             " parameters, got " + std::to_string(params.size()));
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.hyper.beta1, double(state.t));
    const double bias2 = 1.0 - std::pow(state.hyper.beta2, double(state.t));
    kernels::active().adam_update(params.data(), grads.data(), state.m.data(), state.v.data(),
                                  params.size(), state.hyper.lr, state.hyper.beta1,
                                  state.hyper.beta2, state.hyper.eps, bias1, bias2);
}

SmoothnessResult smoothness_penalty(const DisplacementField& field, double lambda) {
    if (lambda < 0.0) throw DimensionError("smoothness weight must be >= 0");
    const std::size_t n = field.size();
    SmoothnessResult res;
    res.grad_dx.assign(n, 0.0);
    res.grad_dy.assign(n, 0.0);
    if (lambda == 0.0) return res;

    const int w = field.width, h = field.height;
    double raw = 0.0;
    auto accumulate = [&](const std::vector<double>& f, std::vector<double>& g) {
        for (int y = 0; y < h; ++y) {
            const std::size_t row = std::size_t(y) * w;
            for (int x = 0; x < w; ++x) {
                const std::size_t i = row + x;
                if (x + 1 < w) {
                    double d = f[i + 1] - f[i];
                    raw += d * d;
                    g[i + 1] += 2.0 * d;
                    g[i] -= 2.0 * d;
                }
                if (y + 1 < h) {
                    double d = f[i + w] - f[i];
                    raw += d * d;
                    g[i + w] += 2.0 * d;
                    g[i] -= 2.0 * d;
                }
            }
        }
    };
    accumulate(field.dx, res.grad_dx);
    accumulate(field.dy, res.grad_dy);

    const double scale = lambda / double(n);
    res.value = raw * scale;
    for (std::size_t i = 0; i < n; ++i) {
        res.grad_dx[i] *= scale;
        res.grad_dy[i] *= scale;
    }
    return res;
}

LevelResult optimize_level(const Image& content, const Image& style,
                           const DisplacementField& init_field, const HistogramConfig& cfg,
                           const LevelParams& params, int level_index) {
    cfg.validate();
    if (!content.same_dims(style) || content.channels != style.channels)
        throw DimensionError("content and style must match in size and channels");
    if (init_field.width != content.width || init_field.height != content.height)
        throw DimensionError("init field does not match image dimensions");

    const int w = content.width, h = content.height, ch = content.channels;
    const std::size_t n = std::size_t(w) * h;
    const auto& ops = kernels::active();

    // Per-channel planes; content weight tables are fixed across iterations.
    std::vector<std::vector<double>> style_planes(ch), content_planes(ch);
    std::vector<detail::WeightTable> wa(ch);
    for (int c = 0; c < ch; ++c) {
        style_planes[c].resize(n);
        content_planes[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            style_planes[c][i] = style.data[i * ch + c];
            content_planes[c][i] = content.data[i * ch + c];
        }
        wa[c].compute(content_planes[c], cfg, false);
    }

    ControlGrid grid;
    const bool use_grid = params.control_grid;
    if (use_grid) grid.init(w, h, std::max(1, params.control_grid_factor));
    const std::size_t param_n = use_grid ? grid.grid_size() : n;

    // Parameter vector: [dx | dy] (dense pixels or control-grid points).
    std::vector<double> theta(2 * param_n, 0.0);
    if (use_grid) {
        grid.restrict_sample(init_field.dx.data(), theta.data());
        grid.restrict_sample(init_field.dy.data(), theta.data() + param_n);
    } else {
        std::copy(init_field.dx.begin(), init_field.dx.end(), theta.begin());
        std::copy(init_field.dy.begin(), init_field.dy.end(), theta.begin() + param_n);
    }
    OptimizerState state(theta.size(), params.adam);

    DisplacementField field(w, h);
    auto refresh_field = [&] {
        if (use_grid) {
            grid.expand(theta.data(), field.dx.data());
            grid.expand(theta.data() + param_n, field.dy.data());
        } else {
            std::copy(theta.begin(), theta.begin() + param_n, field.dx.begin());
            std::copy(theta.begin() + param_n, theta.end(), field.dy.begin());
        }
    };

    std::vector<double> warped(n), grad_b, log_table;
    std::vector<double> gx(n), gy(n);
    std::vector<double> dense_grad_x(n), dense_grad_y(n);
    std::vector<double> theta_grad(theta.size());
    detail::WeightTable wb;

    LevelResult result;
    result.trace.reserve(params.iters);
    double best_mi = -std::numeric_limits<double>::infinity();
    int stale = 0;

    for (int iter = 0; iter < params.iters; ++iter) {
        refresh_field();

        double mi_total = 0.0;
        std::fill(dense_grad_x.begin(), dense_grad_x.end(), 0.0);
        std::fill(dense_grad_y.begin(), dense_grad_y.end(), 0.0);

        for (int c = 0; c < ch; ++c) {
            const double* splane = style_planes[c].data();
            parallel::for_chunks(n, kPixelChunk,
                                 [&](std::size_t, std::size_t begin, std::size_t end) {
                                     ops.warp_bilinear(splane, w, h, 1, field.dx.data(),
                                                       field.dy.data(), begin, end,
                                                       warped.data());
                                 });
            wb.compute(warped, cfg, true);
            JointHistogram hist = detail::accumulate_joint(wa[c], wb);
            mi_total += detail::mi_value(hist, cfg.epsilon);
            detail::grad_log_table(hist, cfg.epsilon, log_table);
            detail::grad_from_tables(wa[c], wb, log_table, grad_b);
            parallel::for_chunks(n, kPixelChunk,
                                 [&](std::size_t, std::size_t begin, std::size_t end) {
                                     ops.warp_gradient(splane, w, h, 1, field.dx.data(),
                                                       field.dy.data(), begin, end, gx.data(),
                                                       gy.data());
                                 });
            // Ascent on MI = descent on -MI: chain dI/d(warped pixel) through
            // the sampling derivatives into the field.
            for (std::size_t i = 0; i < n; ++i) {
                dense_grad_x[i] -= grad_b[i] * gx[i];
                dense_grad_y[i] -= grad_b[i] * gy[i];
            }
        }

        SmoothnessResult smooth = smoothness_penalty(field, params.smooth_weight);
        const double objective = -mi_total + smooth.value;
        if (!std::isfinite(objective))
            throw NonFiniteError("objective became non-finite", iter);

        result.trace.push_back({level_index, iter, objective, mi_total, smooth.value});

        if (mi_total > best_mi + params.min_improvement) {
            best_mi = mi_total;
            stale = 0;
        } else if (++stale >= params.early_stop_patience) {
            PIXSHUF_LOG_DEBUG("level %d: early stop at iteration %d", level_index, iter);
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            dense_grad_x[i] += smooth.grad_dx[i];
            dense_grad_y[i] += smooth.grad_dy[i];
        }

        if (use_grid) {
            grid.transpose(dense_grad_x.data(), theta_grad.data());
            grid.transpose(dense_grad_y.data(), theta_grad.data() + param_n);
        } else {
            std::copy(dense_grad_x.begin(), dense_grad_x.end(), theta_grad.begin());
            std::copy(dense_grad_y.begin(), dense_grad_y.end(), theta_grad.begin() + param_n);
        }

        adam_step(theta, theta_grad, state);
        if (!all_finite(theta)) throw NonFiniteError("parameters became non-finite", iter);
    }

    refresh_field();
    result.field = std::move(field);
    return result;
}

PyramidResult run_pyramid(const Image& content, const Image& style, const PyramidParams& params,
                          const HistogramConfig& cfg) {
    params.sched.validate();
    cfg.validate();
    if (!content.same_dims(style) || content.channels != style.channels)
        throw DimensionError("content and style must match in size and channels");

    // Clamp the level count so the coarsest level stays at least 8x8.
    int max_levels = 1;
    {
        int w = content.width, h = content.height;
        while (max_levels < params.sched.levels && w / 2 >= 8 && h / 2 >= 8) {
            w /= 2;
            h /= 2;
            ++max_levels;
        }
    }
    const int levels = std::min(params.sched.levels, max_levels);
    if (levels < params.sched.levels)
        PIXSHUF_LOG_INFO("pyramid clamped to %d level(s) to keep the coarsest level >= 8px",
                         levels);

    std::vector<Image> pyr_content{content}, pyr_style{style};
    for (int i = 1; i < levels; ++i) {
        pyr_content.push_back(downsample2x(pyr_content.back()));
        pyr_style.push_back(downsample2x(pyr_style.back()));
    }

    PyramidResult out;
    out.levels_run = levels;
    DisplacementField field(pyr_content.back().width, pyr_content.back().height);

    for (int li = 0; li < levels; ++li) {
        const Image& c = pyr_content[levels - 1 - li];
        const Image& s = pyr_style[levels - 1 - li];
        if (li > 0) field = upsample_field(field, c.width, c.height);

        LevelParams lp;
        lp.iters = params.sched.iters_per_level[li];
        lp.smooth_weight = params.sched.smooth_weight;
        lp.adam = params.adam;
        lp.early_stop_patience = params.sched.early_stop_patience;
        lp.min_improvement = params.sched.min_improvement;
        lp.control_grid = params.control_grid;
        lp.control_grid_factor = params.control_grid_factor;

        LevelResult res = optimize_level(c, s, field, cfg, lp, li);
        field = std::move(res.field);
        if (!res.trace.empty())
            PIXSHUF_LOG_INFO("level %d (%dx%d): %zu iterations, objective %.6f -> %.6f", li,
                             c.width, c.height, res.trace.size(), res.trace.front().objective,
                             res.trace.back().objective);
        out.traces.push_back(std::move(res.trace));
    }

    out.field = std::move(field);
    return out;
}

} // namespace pixshuf
