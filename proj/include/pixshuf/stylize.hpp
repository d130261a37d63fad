#pragma once

#include <cstdint>

#include "pixshuf/field.hpp"
#include "pixshuf/image.hpp"
#include "pixshuf/metrics.hpp"
#include "pixshuf/mi.hpp"
#include "pixshuf/optim.hpp"
#include "pixshuf/warp.hpp"

namespace pixshuf {

// Which channels the MI objective is computed over.
enum class MiChannels {
    Luma,         // single Rec.601 luma pair
    PerChannelSum // MI summed over R, G, B pairs
};

struct StylizeConfig {
    HistogramConfig hist;
    LevelSchedule sched;
    AdamParams adam;
    SamplingMode final_sampling = SamplingMode::Bilinear;
    MiChannels mi_channels = MiChannels::Luma;
    std::uint64_t seed = 42; // reserved; the default pipeline is deterministic
    bool control_grid = false;
    int control_grid_factor = 8;
};

struct StylizeReport {
    double mi_initial = 0.0;
    double mi_final = 0.0;
    double content_ssim = 0.0;
    double style_hist_chi2 = 0.0;
    double wall_time_ms = 0.0;
    int levels_run = 0;
};

struct StylizeResult {
    Image output;
    DisplacementField field;
    StylizeReport report;
    std::vector<std::vector<IterationRecord>> traces;
};

// Full pipeline: resize style to content dimensions, optimize the displacement
// field coarse-to-fine to maximize MI, render the warped style with
// final_sampling. Output dimensions always equal content dimensions.
StylizeResult stylize(const Image& content, const Image& style, const StylizeConfig& cfg);

// MI between content and the style warped by `field`, measured the same way
// stylize() reports mi_initial/mi_final (bilinear sampling, cfg.mi_channels).
double measure_mi(const Image& content, const Image& style_resized,
                  const DisplacementField& field, const StylizeConfig& cfg);

} // namespace pixshuf
