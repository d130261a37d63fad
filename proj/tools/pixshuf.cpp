// pixshuf - style transfer by mutual-information-guided pixel displacement.
// Subcommands: stylize, mi, gradcheck, eval. Machine output is one JSON line
// on stdout; diagnostics go to stderr. Exit: 0 ok, 1 usage, 2 runtime error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pixshuf/errors.hpp"
#include "pixshuf/field.hpp"
#include "pixshuf/image_io.hpp"
#include "pixshuf/kernels.hpp"
#include "pixshuf/log.hpp"
#include "pixshuf/metrics.hpp"
#include "pixshuf/mi.hpp"
#include "pixshuf/optim.hpp"
#include "pixshuf/parallel.hpp"
#include "pixshuf/stylize.hpp"
#include "pixshuf/warp.hpp"

using nlohmann::json;
namespace ps = pixshuf;

namespace {

// ---------------------------------------------------------------- helpers

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

ps::Image random_image(int w, int h, std::mt19937_64& rng) {
    ps::Image img(w, h, 1);
    for (double& v : img.data) v = uniform01(rng);
    return img;
}

ps::Image ensure_rgb(ps::Image img) {
    if (img.channels == 3) return img;
    ps::Image out(img.width, img.height, 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        out.data[i * 3] = out.data[i * 3 + 1] = out.data[i * 3 + 2] = img.data[i];
    return out;
}

std::vector<int> parse_iters(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = std::stoi(item, &used);
        if (used != item.size() || v < 0) throw CLI::ValidationError("--iters", "bad count: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError("--iters", "empty iteration list");
    return out;
}

void write_trace(const std::string& path, const std::vector<std::vector<ps::IterationRecord>>& traces) {
    std::ofstream f(path);
    if (!f) throw ps::IoError("cannot open trace file: " + path);
    f << "level,iteration,objective,mi_nats,smooth_penalty\n";
    f.precision(17);
    for (const auto& level : traces)
        for (const auto& r : level)
            f << r.level << ',' << r.iteration << ',' << r.objective << ',' << r.mi << ','
              << r.smooth << '\n';
    if (!f) throw ps::IoError("short write: " + path);
}

void emit_json(const json& j) { std::cout << j.dump() << "\n"; }

// ------------------------------------------------------------ stylize cmd

struct StylizeArgs {
    std::string content, style, out;
    std::string iters_text, sampling = "bilinear", mi_channels = "luma";
    std::string trace_path, dump_field, load_field, config_path;
    int bins = 0, levels = 0, threads = 0;
    double sigma = 0, lr = 0, lambda = -1;
    std::uint64_t seed = 42;
    bool control_grid = false;
    int control_grid_factor = 0;
};

void apply_config_file(ps::StylizeConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ps::IoError("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ps::FormatError("bad config JSON: " + std::string(e.what()));
    }
    if (j.contains("hist")) {
        const auto& h = j["hist"];
        cfg.hist.bins = h.value("bins", cfg.hist.bins);
        cfg.hist.sigma = h.value("sigma", cfg.hist.sigma);
        cfg.hist.epsilon = h.value("epsilon", cfg.hist.epsilon);
    }
    if (j.contains("sched")) {
        const auto& s = j["sched"];
        cfg.sched.levels = s.value("levels", cfg.sched.levels);
        if (s.contains("iters_per_level"))
            cfg.sched.iters_per_level = s["iters_per_level"].get<std::vector<int>>();
        else
            cfg.sched.iters_per_level.resize(cfg.sched.levels,
                                             cfg.sched.iters_per_level.empty()
                                                 ? 200
                                                 : cfg.sched.iters_per_level.back());
        cfg.sched.smooth_weight = s.value("smooth_weight", cfg.sched.smooth_weight);
        cfg.sched.early_stop_patience = s.value("early_stop_patience", cfg.sched.early_stop_patience);
        cfg.sched.min_improvement = s.value("min_improvement", cfg.sched.min_improvement);
    }
    if (j.contains("adam")) {
        const auto& a = j["adam"];
        cfg.adam.lr = a.value("lr", cfg.adam.lr);
        cfg.adam.beta1 = a.value("beta1", cfg.adam.beta1);
        cfg.adam.beta2 = a.value("beta2", cfg.adam.beta2);
        cfg.adam.eps = a.value("eps", cfg.adam.eps);
    }
    if (j.contains("final_sampling"))
        cfg.final_sampling = j["final_sampling"] == "nearest" ? ps::SamplingMode::Nearest
                                                              : ps::SamplingMode::Bilinear;
    if (j.contains("mi_channels"))
        cfg.mi_channels =
            j["mi_channels"] == "sum" ? ps::MiChannels::PerChannelSum : ps::MiChannels::Luma;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.control_grid = j.value("control_grid", cfg.control_grid);
    cfg.control_grid_factor = j.value("control_grid_factor", cfg.control_grid_factor);
}

ps::StylizeConfig build_config(const StylizeArgs& a, const CLI::App* cmd) {
    ps::StylizeConfig cfg;
    if (!a.config_path.empty()) apply_config_file(cfg, a.config_path);

    const bool has_levels = cmd->count("--levels") > 0;
    const bool has_iters = cmd->count("--iters") > 0;
    if (has_levels) cfg.sched.levels = a.levels;
    if (has_iters) {
        std::vector<int> iters = parse_iters(a.iters_text);
        if (iters.size() == 1) {
            cfg.sched.iters_per_level.assign(cfg.sched.levels, iters[0]);
        } else {
            if (has_levels && int(iters.size()) != cfg.sched.levels)
                throw CLI::ValidationError("--iters",
                                           "list length does not match --levels");
            cfg.sched.levels = int(iters.size());
            cfg.sched.iters_per_level = iters;
        }
    } else if (has_levels) {
        int fill = cfg.sched.iters_per_level.empty() ? 200 : cfg.sched.iters_per_level.back();
        cfg.sched.iters_per_level.assign(cfg.sched.levels, fill);
    }
    if (int(cfg.sched.iters_per_level.size()) != cfg.sched.levels)
        cfg.sched.iters_per_level.resize(
            cfg.sched.levels,
            cfg.sched.iters_per_level.empty() ? 200 : cfg.sched.iters_per_level.back());

    if (cmd->count("--bins")) cfg.hist.bins = a.bins;
    if (cmd->count("--sigma")) cfg.hist.sigma = a.sigma;
    if (cmd->count("--lr")) cfg.adam.lr = a.lr;
    if (cmd->count("--lambda-smooth")) cfg.sched.smooth_weight = a.lambda;
    if (cmd->count("--sampling"))
        cfg.final_sampling =
            a.sampling == "nearest" ? ps::SamplingMode::Nearest : ps::SamplingMode::Bilinear;
    if (cmd->count("--mi-channels"))
        cfg.mi_channels = a.mi_channels == "sum" ? ps::MiChannels::PerChannelSum : ps::MiChannels::Luma;
    if (cmd->count("--seed")) cfg.seed = a.seed;
    if (cmd->count("--control-grid")) cfg.control_grid = a.control_grid;
    if (cmd->count("--control-grid-factor")) cfg.control_grid_factor = a.control_grid_factor;
    return cfg;
}

json report_json(const ps::StylizeReport& r) {
    return json{{"mi_initial", r.mi_initial},     {"mi_final", r.mi_final},
                {"content_ssim", r.content_ssim}, {"style_hist_chi2", r.style_hist_chi2},
                {"wall_time_ms", r.wall_time_ms}, {"levels_run", r.levels_run}};
}

int cmd_stylize(const StylizeArgs& a, const CLI::App* cmd) {
    if (a.threads > 0) ps::parallel::set_max_threads(a.threads);
    ps::StylizeConfig cfg = build_config(a, cmd);

    ps::Image content = ensure_rgb(ps::load_image(a.content));
    ps::Image style = ensure_rgb(ps::load_image(a.style));

    ps::StylizeResult res;
    if (!a.load_field.empty()) {
        // Pre-computed field: skip optimization, render and report only.
        const auto t0 = std::chrono::steady_clock::now();
        ps::DisplacementField field = ps::load_field(a.load_field);
        if (field.width != content.width || field.height != content.height)
            throw ps::DimensionError("loaded field does not match content dimensions");
        ps::Image style_resized = ps::resize_bilinear(style, content.width, content.height);
        res.field = std::move(field);
        res.output = ps::warp(style_resized, res.field, cfg.final_sampling);
        ps::DisplacementField zero(content.width, content.height);
        res.report.mi_initial = ps::measure_mi(content, style_resized, zero, cfg);
        res.report.mi_final = ps::measure_mi(content, style_resized, res.field, cfg);
        res.report.content_ssim = ps::ssim_luma(res.output, content);
        res.report.style_hist_chi2 = ps::color_hist_chi2(res.output, style);
        res.report.levels_run = 0;
        res.report.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    } else {
        res = ps::stylize(content, style, cfg);
    }

    ps::save_image(res.output, a.out);
    if (!a.dump_field.empty()) ps::save_field(res.field, a.dump_field);
    if (!a.trace_path.empty()) write_trace(a.trace_path, res.traces);
    emit_json(report_json(res.report));
    return 0;
}

// ----------------------------------------------------------------- mi cmd

int cmd_mi(const std::string& path_a, const std::string& path_b, int bins, double sigma,
           int threads) {
    if (threads > 0) ps::parallel::set_max_threads(threads);
    ps::Image a = ps::load_image(path_a);
    ps::Image b = ps::load_image(path_b);
    if (!a.same_dims(b)) b = ps::resize_bilinear(b, a.width, a.height);

    ps::HistogramConfig cfg;
    cfg.bins = bins;
    cfg.sigma = sigma;
    ps::JointHistogram h = ps::joint_histogram(ps::to_luma(a), ps::to_luma(b), cfg);
    emit_json(json{{"mi_nats", ps::mutual_information(h, cfg.epsilon)},
                   {"h_a", ps::entropy(h.p_a)},
                   {"h_b", ps::entropy(h.p_b)}});
    return 0;
}

// ------------------------------------------------------------ gradcheck cmd

struct GradCheckResult {
    double mi = 0.0, warp = 0.0, smooth = 0.0;
    bool pass() const { return mi <= 1e-4 && warp <= 1e-5 && smooth <= 1e-6; }
};

double mi_grad_check(int size, int bins, double sigma, std::mt19937_64& rng, int pairs) {
    ps::HistogramConfig cfg;
    cfg.bins = bins;
    cfg.sigma = sigma;
    double max_rel = 0.0;
    const double fd_eps = 1e-5;
    for (int pair = 0; pair < pairs; ++pair) {
        ps::Image a = random_image(size, size, rng);
        ps::Image b = random_image(size, size, rng);
        ps::MiResult res = ps::mi_and_gradient(a, b, cfg);
        for (std::size_t i = 0; i < b.pixel_count(); ++i) {
            const double keep = b.data[i];
            b.data[i] = keep + fd_eps;
            const double up = ps::mutual_information(ps::joint_histogram(a, b, cfg), cfg.epsilon);
            b.data[i] = keep - fd_eps;
            const double dn = ps::mutual_information(ps::joint_histogram(a, b, cfg), cfg.epsilon);
            b.data[i] = keep;
            const double fd = (up - dn) / (2.0 * fd_eps);
            const double an = res.grad_b[i];
            // include FD-only-visible pixels so degenerate bandwidths fail loudly
            if (std::abs(an) > 1e-8 || std::abs(fd) > 1e-3) {
                const double rel = std::abs(an - fd) / std::max(std::abs(an), std::abs(fd));
                max_rel = std::max(max_rel, rel);
            }
        }
    }
    return max_rel;
}

double warp_grad_check(int size, std::mt19937_64& rng) {
    ps::Image src = random_image(size, size, rng);
    ps::DisplacementField field(size, size);
    for (std::size_t i = 0; i < field.size(); ++i) {
        field.dx[i] = (uniform01(rng) - 0.5) * 4.0;
        field.dy[i] = (uniform01(rng) - 0.5) * 4.0;
    }
    const ps::WarpGradient g = ps::warp_input_gradient(src, field);
    const double fd_eps = 1e-4;
    const double knot_margin = 1e-3;
    double max_rel = 0.0;

    auto sample_value = [&](const ps::DisplacementField& f, std::size_t i) {
        return ps::warp(src, f, ps::SamplingMode::Bilinear).data[i];
    };

    for (std::size_t i = 0; i < field.size(); ++i) {
        const int x = int(i % std::size_t(size));
        const int y = int(i / std::size_t(size));
        const double rx = x + field.dx[i];
        const double ry = y + field.dy[i];
        // skip clamped samples and bilinear knots, where the slope jumps
        auto usable = [&](double r, int lim) {
            if (r < knot_margin || r > lim - knot_margin) return false;
            return std::abs(r - std::round(r)) > knot_margin;
        };
        if (!usable(rx, size - 1) || !usable(ry, size - 1)) continue;

        ps::DisplacementField fp = field;
        fp.dx[i] = field.dx[i] + fd_eps;
        double up = sample_value(fp, i);
        fp.dx[i] = field.dx[i] - fd_eps;
        double dn = sample_value(fp, i);
        double fd = (up - dn) / (2.0 * fd_eps);
        if (std::max(std::abs(fd), std::abs(g.d_dx[i])) > 1e-12)
            max_rel = std::max(max_rel, std::abs(fd - g.d_dx[i]) /
                                            std::max(std::abs(fd), std::abs(g.d_dx[i])));

        fp.dx[i] = field.dx[i];
        fp.dy[i] = field.dy[i] + fd_eps;
        up = sample_value(fp, i);
        fp.dy[i] = field.dy[i] - fd_eps;
        dn = sample_value(fp, i);
        fd = (up - dn) / (2.0 * fd_eps);
        if (std::max(std::abs(fd), std::abs(g.d_dy[i])) > 1e-12)
            max_rel = std::max(max_rel, std::abs(fd - g.d_dy[i]) /
                                            std::max(std::abs(fd), std::abs(g.d_dy[i])));
    }
    return max_rel;
}

double smooth_grad_check(std::mt19937_64& rng) {
    const int size = 8;
    ps::DisplacementField field(size, size);
    for (std::size_t i = 0; i < field.size(); ++i) {
        field.dx[i] = (uniform01(rng) - 0.5) * 2.0;
        field.dy[i] = (uniform01(rng) - 0.5) * 2.0;
    }
    const double lambda = 1.0;
    ps::SmoothnessResult res = ps::smoothness_penalty(field, lambda);
    const double fd_eps = 1e-5;
    double max_rel = 0.0;
    auto check = [&](std::vector<double>& comp, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < comp.size(); ++i) {
            const double keep = comp[i];
            comp[i] = keep + fd_eps;
            const double up = ps::smoothness_penalty(field, lambda).value;
            comp[i] = keep - fd_eps;
            const double dn = ps::smoothness_penalty(field, lambda).value;
            comp[i] = keep;
            const double fd = (up - dn) / (2.0 * fd_eps);
            if (std::max(std::abs(fd), std::abs(grad[i])) > 1e-10)
                max_rel = std::max(max_rel,
                                   std::abs(fd - grad[i]) / std::max(std::abs(fd), std::abs(grad[i])));
        }
    };
    check(field.dx, res.grad_dx);
    check(field.dy, res.grad_dy);
    return max_rel;
}

int cmd_gradcheck(int size, int bins, double sigma, std::uint64_t seed, int threads) {
    if (threads > 0) ps::parallel::set_max_threads(threads);
    GradCheckResult res;
    std::mt19937_64 rng(seed);
    const std::vector<int> bin_suite = bins > 0 ? std::vector<int>{bins}
                                                : std::vector<int>{8, 16, 32};
    for (int b : bin_suite) res.mi = std::max(res.mi, mi_grad_check(size, b, sigma, rng, 20));
    res.warp = warp_grad_check(size, rng);
    res.smooth = smooth_grad_check(rng);

    emit_json(json{{"mi_grad_max_rel_err", res.mi},
                   {"warp_grad_max_rel_err", res.warp},
                   {"smooth_grad_max_rel_err", res.smooth},
                   {"pass", res.pass()}});
    if (!res.pass()) {
        PIXSHUF_LOG_ERROR("gradcheck failed: mi=%.3g (<=1e-4) warp=%.3g (<=1e-5) smooth=%.3g (<=1e-6)",
                          res.mi, res.warp, res.smooth);
        return 2;
    }
    return 0;
}

// ----------------------------------------------------------------- eval cmd

int cmd_eval(const std::string& content_path, const std::string& style_path,
             const std::string& output_path, int threads) {
    if (threads > 0) ps::parallel::set_max_threads(threads);
    ps::Image content = ensure_rgb(ps::load_image(content_path));
    ps::Image style = ensure_rgb(ps::load_image(style_path));
    ps::Image output = ensure_rgb(ps::load_image(output_path));
    ps::Image style_resized = ps::resize_bilinear(style, content.width, content.height);

    emit_json(json{{"content_ssim", ps::ssim_luma(output, content)},
                   {"style_hist_chi2", ps::color_hist_chi2(output, style)},
                   {"baseline_ssim", ps::ssim_luma(style_resized, content)},
                   {"baseline_chi2", ps::color_hist_chi2(content, style)}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"style transfer by mutual-information-guided pixel displacement"};
    app.require_subcommand(1);

    StylizeArgs sa;
    CLI::App* stylize = app.add_subcommand("stylize", "optimize a displacement field and render");
    stylize->add_option("--content", sa.content, "content image (PNG/PPM/PGM)")->required();
    stylize->add_option("--style", sa.style, "style image")->required();
    stylize->add_option("--out", sa.out, "output image path")->required();
    stylize->add_option("--bins", sa.bins, "histogram bins");
    stylize->add_option("--sigma", sa.sigma, "Parzen bandwidth in bin units");
    stylize->add_option("--levels", sa.levels, "pyramid levels");
    stylize->add_option("--iters", sa.iters_text, "iterations: N or N,N,... coarsest first");
    stylize->add_option("--lr", sa.lr, "Adam learning rate");
    stylize->add_option("--lambda-smooth", sa.lambda, "smoothness weight");
    stylize->add_option("--sampling", sa.sampling, "final render sampling")
        ->check(CLI::IsMember({"bilinear", "nearest"}));
    stylize->add_option("--mi-channels", sa.mi_channels, "MI objective channels")
        ->check(CLI::IsMember({"luma", "sum"}));
    stylize->add_option("--seed", sa.seed, "run seed (pipeline is deterministic)");
    stylize->add_option("--trace", sa.trace_path, "write per-iteration CSV trace");
    stylize->add_option("--dump-field", sa.dump_field, "write converged field (PSF1)");
    stylize->add_option("--load-field", sa.load_field, "render with a saved field, no optimization");
    stylize->add_option("--config", sa.config_path, "JSON config (flags override)");
    stylize->add_option("--threads", sa.threads, "worker cap; 1 = reference path");
    stylize->add_flag("--control-grid", sa.control_grid, "optimize a coarse control grid");
    stylize->add_option("--control-grid-factor", sa.control_grid_factor, "grid downscale factor");

    std::string mi_a, mi_b;
    int mi_bins = 32, mi_threads = 0;
    double mi_sigma = 1.0;
    CLI::App* mi = app.add_subcommand("mi", "measure MI between two images");
    mi->add_option("image_a", mi_a, "first image")->required();
    mi->add_option("image_b", mi_b, "second image (resized to first)")->required();
    mi->add_option("--bins", mi_bins, "histogram bins");
    mi->add_option("--sigma", mi_sigma, "Parzen bandwidth in bin units");
    mi->add_option("--threads", mi_threads, "worker cap");

    int gc_size = 16, gc_bins = 0, gc_threads = 0;
    double gc_sigma = 1.0;
    std::uint64_t gc_seed = 1;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "finite-difference gates for all analytic gradients");
    gradcheck->add_option("--size", gc_size, "test image side length");
    gradcheck->add_option("--bins", gc_bins, "single bin count (default: 8,16,32 suite)");
    gradcheck->add_option("--sigma", gc_sigma, "Parzen bandwidth");
    gradcheck->add_option("--seed", gc_seed, "RNG seed");
    gradcheck->add_option("--threads", gc_threads, "worker cap");

    std::string ev_content, ev_style, ev_output;
    int ev_threads = 0;
    CLI::App* eval = app.add_subcommand("eval", "content/style metrics for a stylized output");
    eval->add_option("--content", ev_content, "content image")->required();
    eval->add_option("--style", ev_style, "style image")->required();
    eval->add_option("--output", ev_output, "stylized output image")->required();
    eval->add_option("--threads", ev_threads, "worker cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*stylize) return cmd_stylize(sa, stylize);
        if (*mi) return cmd_mi(mi_a, mi_b, mi_bins, mi_sigma, mi_threads);
        if (*gradcheck) return cmd_gradcheck(gc_size, gc_bins, gc_sigma, gc_seed, gc_threads);
        if (*eval) return cmd_eval(ev_content, ev_style, ev_output, ev_threads);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
