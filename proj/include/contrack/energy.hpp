#pragma once

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "contrack/histogram.hpp"
#include "contrack/image.hpp"
#include "contrack/levelset.hpp"
#include "contrack/parallel.hpp"

namespace contrack {

/// The seven functional designs.
enum class DesignId { D1, D1B, D2, D2B, D3, D4, D4B };

inline std::string design_name(DesignId id) {
    switch (id) {
        case DesignId::D1: return "1";
        case DesignId::D1B: return "1b";
        case DesignId::D2: return "2";
        case DesignId::D2B: return "2b";
        case DesignId::D3: return "3";
        case DesignId::D4: return "4";
        case DesignId::D4B: return "4b";
    }
    return "?";
}

inline DesignId parse_design_id(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "1") return DesignId::D1;
    if (s == "1b") return DesignId::D1B;
    if (s == "2") return DesignId::D2;
    if (s == "2b") return DesignId::D2B;
    if (s == "3") return DesignId::D3;
    if (s == "4") return DesignId::D4;
    if (s == "4b") return DesignId::D4B;
    throw Error("unknown design '" + s + "' (expected 1, 1b, 2, 2b, 3, 4 or 4b)");
}

/// RGB designs need 3-channel frames; the rest run on luma.
inline int design_channels(DesignId id) {
    return (id == DesignId::D4 || id == DesignId::D4B) ? 3 : 1;
}

/// Everything derived from the reference frame and seed region, pinned at
/// frame 0 and never updated during tracking.
struct RefStats {
    double ref_mean = 0.0;
    double ref_area = 0.0;
    Histogram ref_intensity;
    Histogram ref_complement;
    Histogram ref_grad;
    std::array<Histogram, 3> ref_color;
    int source_frame = 0;

    bool operator==(const RefStats& o) const {
        auto eq = [](const Histogram& a, const Histogram& b) {
            return a.bin_count == b.bin_count && a.floor_epsilon == b.floor_epsilon &&
                   a.bins == b.bins;
        };
        return ref_mean == o.ref_mean && ref_area == o.ref_area &&
               eq(ref_intensity, o.ref_intensity) && eq(ref_complement, o.ref_complement) &&
               eq(ref_grad, o.ref_grad) && eq(ref_color[0], o.ref_color[0]) &&
               eq(ref_color[1], o.ref_color[1]) && eq(ref_color[2], o.ref_color[2]) &&
               source_frame == o.source_frame;
    }
};

// ---- energy term variants -------------------------------------------------

struct Length { double weight = 0; };        // curve-length regularizer
struct MeanIntensity { double weight = 0; }; // (mean - ref mean)^2
struct AreaMatch { double weight = 0; };     // (area - ref area)^2
struct KLIntensity { double weight = 0; };   // KL(ref I-hist || current I-hist)
struct KLComplement { double weight = 0; };  // KL over the region complements
struct KLGradient { double weight = 0; };    // KL over the gradient feature J
struct KLColor { std::array<double, 3> weights{0, 0, 0}; }; // per-channel KL sum

using EnergyTerm =
    std::variant<Length, MeanIntensity, AreaMatch, KLIntensity, KLComplement,
                 KLGradient, KLColor>;

/// Per-frame feature images; fixed while a frame is being tracked.
struct FrameFeatures {
    const Image* image = nullptr;
    Image gray;
    Image grad;
    std::array<Image, 3> channel; // populated for 3-channel input only

    static FrameFeatures build(const Image& img) {
        FrameFeatures f;
        f.image = &img;
        f.gray = to_grayscale(img);
        f.grad = gradient_magnitude(f.gray);
        if (img.channels == 3)
            for (int c = 0; c < 3; ++c) f.channel[c] = extract_channel(img, c);
        return f;
    }
};

/// Which region statistics the current term list reads.
struct StatNeeds {
    bool mean = false;
    bool intensity = false;
    bool complement = false;
    bool grad = false;
    bool color = false;
};

inline StatNeeds stat_needs(const std::vector<EnergyTerm>& terms) {
    StatNeeds n;
    for (const EnergyTerm& t : terms) {
        if (std::holds_alternative<MeanIntensity>(t)) n.mean = true;
        else if (std::holds_alternative<KLIntensity>(t)) n.intensity = true;
        else if (std::holds_alternative<KLComplement>(t)) n.complement = true;
        else if (std::holds_alternative<KLGradient>(t)) n.grad = true;
        else if (std::holds_alternative<KLColor>(t)) n.color = true;
    }
    return n;
}

/// Snapshot of the evolving region and its statistics for one iteration.
/// Rebuilt from scratch after every grid update; immutable while in use.
struct TermState {
    const FrameFeatures* frame = nullptr;
    const LevelSetGrid* grid = nullptr;
    const RefStats* ref = nullptr;
    RegionMask mask;
    double area = 0.0;
    double mean = 0.0;
    Histogram intensity;
    Histogram complement;
    Histogram grad;
    std::array<Histogram, 3> color;
};

inline TermState make_term_state(const FrameFeatures& frame, const LevelSetGrid& grid,
                                 const RefStats& ref, const StatNeeds& needs,
                                 int bins = kDefaultBinCount) {
    TermState st;
    st.frame = &frame;
    st.grid = &grid;
    st.ref = &ref;
    st.mask = extract_mask(grid);
    st.area = static_cast<double>(region_area(st.mask));
    if (st.area == 0) throw Error("empty region");
    if (needs.mean) st.mean = region_mean(frame.gray, st.mask);
    if (needs.intensity) st.intensity = build_histogram(frame.gray, st.mask, bins);
    if (needs.complement)
        st.complement = build_histogram(frame.gray, complement_mask(st.mask), bins);
    if (needs.grad) st.grad = build_histogram(frame.grad, st.mask, bins);
    if (needs.color) {
        if (frame.image->channels != 3)
            throw Error("channel mismatch: color statistics need an RGB frame");
        for (int c = 0; c < 3; ++c)
            st.color[c] = build_histogram(frame.channel[c], st.mask, bins);
    }
    return st;
}

namespace detail {

// Speeds act only near the curve; the evolution's ||grad u|| factor
// localizes the flow anyway, so the field is extended by zero outside a
// 3-pixel band of the zero level set.
constexpr double kSpeedBand = 3.0;

// The histogram ratio is clamped before it enters a speed: a bin missing
// from one region otherwise produces speeds ~1/floorEpsilon, which collapses
// the CFL time step for the whole grid and turns sparse bins into violent
// single-pixel oscillators. The clamp preserves the sign of (ratio - 1), so
// descent directions are unaffected.
constexpr double kRatioMin = 0.1;
constexpr double kRatioMax = 10.0;

inline double clamped_ratio(double p_ref, double p_cur) {
    const double r = p_ref / p_cur;
    return r < kRatioMin ? kRatioMin : (r > kRatioMax ? kRatioMax : r);
}

template <class F>
inline SpeedField band_speed(const TermState& st, F&& pixel_speed) {
    const LevelSetGrid& g = *st.grid;
    SpeedField v(g.width, g.height);
    parallel_rows(g.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < g.width; ++x)
                if (std::abs(g.at(x, y)) <= kSpeedBand) v.at(x, y) = pixel_speed(x, y);
    });
    return v;
}

inline void require_region(const TermState& st) {
    if (st.area <= 0) throw Error("empty region");
}

} // namespace detail

/// Energy contribution of a single term on the current state.
inline double term_energy(const EnergyTerm& term, const TermState& st) {
    detail::require_region(st);
    return std::visit(
        [&](const auto& t) -> double {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Length>) {
                return t.weight * boundary_length(*st.grid);
            } else if constexpr (std::is_same_v<T, MeanIntensity>) {
                const double d = st.mean - st.ref->ref_mean;
                return t.weight * d * d;
            } else if constexpr (std::is_same_v<T, AreaMatch>) {
                const double d = st.area - st.ref->ref_area;
                return t.weight * d * d;
            } else if constexpr (std::is_same_v<T, KLIntensity>) {
                return t.weight * kl_divergence(st.ref->ref_intensity, st.intensity);
            } else if constexpr (std::is_same_v<T, KLComplement>) {
                return t.weight * kl_divergence(st.ref->ref_complement, st.complement);
            } else if constexpr (std::is_same_v<T, KLGradient>) {
                return t.weight * kl_divergence(st.ref->ref_grad, st.grad);
            } else {
                static_assert(std::is_same_v<T, KLColor>);
                double e = 0.0;
                for (int c = 0; c < 3; ++c)
                    e += t.weights[c] * kl_divergence(st.ref->ref_color[c], st.color[c]);
                return e;
            }
        },
        term);
}

/// Outward-normal gradient-descent speed of a single term. Each formula is
/// the first variation of the corresponding region integral under boundary
/// perturbation; positive speed grows the region.
inline SpeedField term_speed(const EnergyTerm& term, const TermState& st) {
    detail::require_region(st);
    const FrameFeatures& fr = *st.frame;
    return std::visit(
        [&](const auto& t) -> SpeedField {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Length>) {
                return detail::band_speed(st, [&](int x, int y) {
                    return -t.weight * curvature(*st.grid, x, y);
                });
            } else if constexpr (std::is_same_v<T, MeanIntensity>) {
                const double coef =
                    -2.0 * t.weight * (st.mean - st.ref->ref_mean) / st.area;
                return detail::band_speed(st, [&](int x, int y) {
                    return coef * (fr.gray.at(x, y) - st.mean);
                });
            } else if constexpr (std::is_same_v<T, AreaMatch>) {
                const double v = -2.0 * t.weight * (st.area - st.ref->ref_area);
                return detail::band_speed(st, [&](int, int) { return v; });
            } else if constexpr (std::is_same_v<T, KLIntensity>) {
                const double coef = t.weight / st.area;
                return detail::band_speed(st, [&](int x, int y) {
                    const int b = feature_bin(fr.gray.at(x, y), st.intensity.bin_count);
                    return coef * (detail::clamped_ratio(st.ref->ref_intensity.bins[b],
                                                         st.intensity.bins[b]) -
                                   1.0);
                });
            } else if constexpr (std::is_same_v<T, KLComplement>) {
                const double comp_area =
                    static_cast<double>(st.mask.width) * st.mask.height - st.area;
                if (comp_area <= 0) throw Error("empty region (full-frame complement)");
                const double coef = -t.weight / comp_area;
                return detail::band_speed(st, [&](int x, int y) {
                    const int b = feature_bin(fr.gray.at(x, y), st.complement.bin_count);
                    return coef * (detail::clamped_ratio(st.ref->ref_complement.bins[b],
                                                         st.complement.bins[b]) -
                                   1.0);
                });
            } else if constexpr (std::is_same_v<T, KLGradient>) {
                const double coef = t.weight / st.area;
                return detail::band_speed(st, [&](int x, int y) {
                    const int b = feature_bin(fr.grad.at(x, y), st.grad.bin_count);
                    return coef * (detail::clamped_ratio(st.ref->ref_grad.bins[b],
                                                         st.grad.bins[b]) -
                                   1.0);
                });
            } else {
                static_assert(std::is_same_v<T, KLColor>);
                if (fr.image->channels != 3)
                    throw Error("channel mismatch: color speeds need an RGB frame");
                return detail::band_speed(st, [&](int x, int y) {
                    double v = 0.0;
                    for (int c = 0; c < 3; ++c) {
                        const int b =
                            feature_bin(fr.channel[c].at(x, y), st.color[c].bin_count);
                        v += t.weights[c] / st.area *
                             (detail::clamped_ratio(st.ref->ref_color[c].bins[b],
                                                    st.color[c].bins[b]) -
                              1.0);
                    }
                    return v;
                });
            }
        },
        term);
}

/// Term list of a design, in display order. Weight vectors follow the
/// design's multiplier order with the length weight last:
///   1: l1, len | 1B: l1, l2, len | 2: l1, len | 2B: l1, l2, len
///   3: l1, l2, len | 4: l1, l2, l3, len | 4B: l1, l2, l3, l4, len
inline std::vector<EnergyTerm> make_design(DesignId id, const std::vector<double>& w) {
    auto expect = [&](std::size_t n) {
        if (w.size() != n)
            throw Error("design " + design_name(id) + " expects " + std::to_string(n) +
                        " weights, got " + std::to_string(w.size()));
    };
    for (double v : w)
        if (!(v >= 0.0)) throw Error("weights must be non-negative");
    switch (id) {
        case DesignId::D1:
            expect(2);
            return {MeanIntensity{w[0]}, Length{w[1]}};
        case DesignId::D1B:
            expect(3);
            return {MeanIntensity{w[0]}, AreaMatch{w[1]}, Length{w[2]}};
        case DesignId::D2:
            expect(2);
            return {KLIntensity{w[0]}, Length{w[1]}};
        case DesignId::D2B:
            expect(3);
            return {KLIntensity{w[0]}, KLComplement{w[1]}, Length{w[2]}};
        case DesignId::D3:
            expect(3);
            return {KLIntensity{w[0]}, KLGradient{w[1]}, Length{w[2]}};
        case DesignId::D4:
            expect(4);
            return {KLColor{{w[0], w[1], w[2]}}, Length{w[3]}};
        case DesignId::D4B:
            expect(5);
            return {KLColor{{w[0], w[1], w[2]}}, AreaMatch{w[3]}, Length{w[4]}};
    }
    throw Error("unknown design id");
}

/// Calibrated default multipliers per design (same order as make_design).
/// The divergence weights sit where their restoring force at a desk-scale
/// region (a few hundred pixels) clearly outweighs the curve-shortening
/// drift of the length term; design 1 keeps the weak defaults that exhibit
/// its documented failure modes.
inline std::vector<double> default_weights(DesignId id) {
    switch (id) {
        case DesignId::D1: return {500.0, 0.05};
        case DesignId::D1B: return {500.0, 2e-3, 0.1};
        case DesignId::D2: return {600.0, 0.1};
        case DesignId::D2B: return {600.0, 600.0, 0.1};
        case DesignId::D3: return {600.0, 300.0, 0.1};
        case DesignId::D4: return {60.0, 60.0, 60.0, 0.05};
        case DesignId::D4B: return {60.0, 60.0, 60.0, 2e-3, 0.05};
    }
    throw Error("unknown design id");
}

inline double total_energy(const std::vector<EnergyTerm>& terms, const TermState& st) {
    if (terms.empty()) throw Error("empty term list");
    double e = 0.0;
    for (const EnergyTerm& t : terms) e += term_energy(t, st);
    return e;
}

/// Summed curve-length weight; its curvature flow is stepped parabolically
/// by evolve_step rather than through the advective speed field.
inline double length_weight(const std::vector<EnergyTerm>& terms) {
    double w = 0.0;
    for (const EnergyTerm& t : terms)
        if (const Length* l = std::get_if<Length>(&t)) w += l->weight;
    return w;
}

/// Sum of the advective term speeds (every term except Length).
inline SpeedField total_speed(const std::vector<EnergyTerm>& terms, const TermState& st) {
    if (terms.empty()) throw Error("empty term list");
    SpeedField sum(st.grid->width, st.grid->height);
    for (const EnergyTerm& t : terms) {
        if (std::holds_alternative<Length>(t)) continue;
        const SpeedField v = term_speed(t, st);
        for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += v.v[i];
    }
    return sum;
}

} // namespace contrack
