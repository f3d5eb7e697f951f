#pragma once

#include <optional>
#include <vector>

#include "contrack/energy.hpp"
#include "contrack/image.hpp"
#include "contrack/levelset.hpp"
#include "contrack/metrics.hpp"

namespace contrack {

struct TrackConfig {
    DesignId design = DesignId::D1B;
    std::vector<double> weights;    // empty = default_weights(design)
    int max_iterations = 500;
    double convergence_tol = 1e-5;
    int convergence_window = 10;
    int reinit_every = 20;
    int histogram_bins = kDefaultBinCount;

    std::vector<double> effective_weights() const {
        return weights.empty() ? default_weights(design) : weights;
    }
    void validate() const {
        if (max_iterations < 1) throw Error("max iterations must be >= 1");
        if (convergence_tol <= 0) throw Error("convergence tolerance must be positive");
        if (convergence_window < 1) throw Error("convergence window must be >= 1");
        if (reinit_every < 1) throw Error("reinit interval must be >= 1");
    }
};

struct FrameReport {
    RegionMask final_mask;
    int iterations_used = 0;
    std::vector<double> energy_trace; // one entry per iteration
    bool converged = false;
    bool lost_track = false;
    std::optional<CoverageScore> score;

    double final_energy() const {
        return energy_trace.empty() ? 0.0 : energy_trace.back();
    }
};

struct TrackReport {
    std::vector<FrameReport> frames;
};

/// Reference statistics from the seed frame; pinned for the whole sequence.
inline RefStats build_reference(const Image& img0, const RegionMask& r0,
                                const TrackConfig& cfg) {
    cfg.validate();
    if (img0.width != r0.width || img0.height != r0.height)
        throw Error("image/mask dimension mismatch");
    const long area = region_area(r0);
    if (area == 0 || area == static_cast<long>(r0.width) * r0.height)
        throw Error("degenerate mask (empty or full)");
    if (design_channels(cfg.design) == 3 && img0.channels != 3)
        throw Error("channel mismatch: design " + design_name(cfg.design) +
                    " requires an RGB reference frame");

    const FrameFeatures feat = FrameFeatures::build(img0);
    RefStats ref;
    ref.ref_mean = region_mean(feat.gray, r0);
    ref.ref_area = static_cast<double>(area);
    ref.ref_intensity = build_histogram(feat.gray, r0, cfg.histogram_bins);
    ref.ref_complement =
        build_histogram(feat.gray, complement_mask(r0), cfg.histogram_bins);
    ref.ref_grad = build_histogram(feat.grad, r0, cfg.histogram_bins);
    if (img0.channels == 3) {
        for (int c = 0; c < 3; ++c)
            ref.ref_color[c] = build_histogram(feat.channel[c], r0, cfg.histogram_bins);
    } else {
        // Grayscale reference: the per-channel views coincide with luma.
        for (int c = 0; c < 3; ++c) ref.ref_color[c] = ref.ref_intensity;
    }
    ref.source_frame = 0;
    return ref;
}

/// Gradient-descent evolution on one frame, warm-started from prev_mask.
/// Runs until the windowed relative energy change drops below tolerance or
/// the iteration cap; an emptied or frame-filling region sets lost_track and
/// halts (the last valid mask is kept so a sequence can continue).
inline FrameReport track_frame(const RefStats& ref, const RegionMask& prev_mask,
                               const Image& img, const TrackConfig& cfg) {
    cfg.validate();
    if (img.width != prev_mask.width || img.height != prev_mask.height)
        throw Error("image/mask dimension mismatch");
    const long seed_area = region_area(prev_mask);
    if (seed_area == 0 || seed_area == static_cast<long>(prev_mask.width) * prev_mask.height)
        throw Error("degenerate mask (empty or full)");

    const std::vector<EnergyTerm> terms = make_design(cfg.design, cfg.effective_weights());
    const StatNeeds needs = stat_needs(terms);
    const double curve_weight = length_weight(terms);
    const FrameFeatures feat = FrameFeatures::build(img);

    FrameReport report;
    report.final_mask = prev_mask;

    LevelSetGrid grid = init_signed_distance(prev_mask);
    const long total = static_cast<long>(img.width) * img.height;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        const RegionMask mask = extract_mask(grid);
        const long area = region_area(mask);
        if (area == 0 || area == total) {
            report.lost_track = true;
            break;
        }
        report.final_mask = mask;

        const TermState state = make_term_state(feat, grid, ref, needs, cfg.histogram_bins);
        report.energy_trace.push_back(total_energy(terms, state));
        report.iterations_used = it + 1;

        const int n = static_cast<int>(report.energy_trace.size());
        if (n > cfg.convergence_window) {
            const double now = report.energy_trace[n - 1];
            const double then = report.energy_trace[n - 1 - cfg.convergence_window];
            const double rel = std::abs(now - then) / std::max(std::abs(then), 1e-12);
            if (rel < cfg.convergence_tol) {
                report.converged = true;
                break;
            }
        }

        const SpeedField v = total_speed(terms, state);
        const double dt = stable_dt(v, curve_weight);
        grid = evolve_step(grid, v, curve_weight, dt);
        if ((it + 1) % cfg.reinit_every == 0) {
            const RegionMask m = extract_mask(grid);
            const long a = region_area(m);
            if (a == 0 || a == total) {
                report.lost_track = true;
                break;
            }
            grid = reinitialize(grid);
        }
    }

    if (!report.lost_track) {
        const RegionMask m = extract_mask(grid);
        const long a = region_area(m);
        if (a == 0 || a == total)
            report.lost_track = true;
        else
            report.final_mask = m;
    }
    return report;
}

/// Tracks a frame list, warm-starting each frame from the previous result.
/// Reference statistics stay pinned to (img0, r0). When ground-truth masks
/// are supplied, per-frame coverage scores are filled in.
inline TrackReport track_sequence(const Image& img0, const RegionMask& r0,
                                  const std::vector<Image>& frames,
                                  const TrackConfig& cfg,
                                  const std::vector<RegionMask>* ground_truth = nullptr) {
    if (frames.empty()) throw Error("empty frame list");
    if (ground_truth && ground_truth->size() != frames.size())
        throw Error("ground-truth mask count does not match frame count");
    for (const Image& f : frames)
        if (f.width != img0.width || f.height != img0.height)
            throw Error("frame dimension mismatch");

    const RefStats ref = build_reference(img0, r0, cfg);
    TrackReport report;
    report.frames.reserve(frames.size());
    RegionMask prev = r0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        FrameReport fr = track_frame(ref, prev, frames[i], cfg);
        if (ground_truth && region_area(fr.final_mask) > 0 &&
            region_area((*ground_truth)[i]) > 0)
            fr.score = coverage(fr.final_mask, (*ground_truth)[i]);
        if (region_area(fr.final_mask) > 0) prev = fr.final_mask;
        report.frames.push_back(std::move(fr));
    }
    return report;
}

} // namespace contrack
