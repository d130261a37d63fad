#include "pixshuf/stylize.hpp"

#include <chrono>

#include "pixshuf/log.hpp"

namespace pixshuf {

namespace {

// The MI objective's view of an image: luma plane or the RGB planes.
Image mi_signal(const Image& img, MiChannels channels) {
    if (channels == MiChannels::Luma) return to_luma(img);
    return img;
}

} // namespace

double measure_mi(const Image& content, const Image& style_resized,
                  const DisplacementField& field, const StylizeConfig& cfg) {
    const Image content_sig = mi_signal(content, cfg.mi_channels);
    const Image style_sig = mi_signal(style_resized, cfg.mi_channels);
    const Image warped = warp(style_sig, field, SamplingMode::Bilinear);

    double total = 0.0;
    const int ch = content_sig.channels;
    for (int c = 0; c < ch; ++c) {
        Image a(content_sig.width, content_sig.height, 1);
        Image b(content_sig.width, content_sig.height, 1);
        for (std::size_t i = 0; i < a.pixel_count(); ++i) {
            a.data[i] = content_sig.data[i * ch + c];
            b.data[i] = warped.data[i * ch + c];
        }
        total += mutual_information(joint_histogram(a, b, cfg.hist), cfg.hist.epsilon);
    }
    return total;
}

StylizeResult stylize(const Image& content, const Image& style, const StylizeConfig& cfg) {
    if (content.channels != 3 || style.channels != 3)
        throw DimensionError("stylize expects 3-channel content and style");
    const auto t_start = std::chrono::steady_clock::now();

    const Image style_resized = resize_bilinear(style, content.width, content.height);
    const Image content_sig = mi_signal(content, cfg.mi_channels);
    const Image style_sig = mi_signal(style_resized, cfg.mi_channels);

    PyramidParams pp;
    pp.sched = cfg.sched;
    pp.adam = cfg.adam;
    pp.control_grid = cfg.control_grid;
    pp.control_grid_factor = cfg.control_grid_factor;

    StylizeResult res;
    DisplacementField zero(content.width, content.height);
    res.report.mi_initial = measure_mi(content, style_resized, zero, cfg);

    PyramidResult pyr = run_pyramid(content_sig, style_sig, pp, cfg.hist);
    res.field = std::move(pyr.field);
    res.traces = std::move(pyr.traces);
    res.report.levels_run = pyr.levels_run;

    res.output = warp(style_resized, res.field, cfg.final_sampling);
    res.report.mi_final = measure_mi(content, style_resized, res.field, cfg);
    res.report.content_ssim = ssim_luma(res.output, content);
    res.report.style_hist_chi2 = color_hist_chi2(res.output, style);

    const auto t_end = std::chrono::steady_clock::now();
    res.report.wall_time_ms =
        std::chrono::duration<double, std::milli>(t_end - t_start).count();

    PIXSHUF_LOG_INFO("stylize: MI %.6f -> %.6f, ssim %.4f, chi2 %.4f, %.0f ms",
                     res.report.mi_initial, res.report.mi_final, res.report.content_ssim,
                     res.report.style_hist_chi2, res.report.wall_time_ms);
    return res;
}

} // namespace pixshuf
