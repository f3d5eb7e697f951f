#pragma once

#include <cmath>
#include <vector>

#include "contrack/image.hpp"

namespace contrack {

constexpr int kDefaultBinCount = 32;
constexpr double kDefaultFloorEpsilon = 1e-6;

/// Binned probability distribution of a scalar feature over [0,1].
/// Every bin is floored to a small positive mass so divergence denominators
/// never vanish; bins always sum to 1.
struct Histogram {
    int bin_count = 0;
    double floor_epsilon = 0.0;
    std::vector<double> bins;

    bool empty() const { return bin_count == 0; }
};

/// Bin index of a feature value z in [0,1]: floor(z * binCount), with z = 1
/// clamped into the last bin.
inline int feature_bin(double z, int bin_count) {
    int b = static_cast<int>(z * bin_count);
    if (b < 0) b = 0;
    if (b >= bin_count) b = bin_count - 1;
    return b;
}

/// Normalized, epsilon-floored histogram of the feature image over the mask.
inline Histogram build_histogram(const Image& feature, const RegionMask& mask,
                                 int bin_count = kDefaultBinCount,
                                 double floor_epsilon = kDefaultFloorEpsilon) {
    if (feature.channels != 1) throw Error("build_histogram expects a 1-channel feature");
    if (feature.width != mask.width || feature.height != mask.height)
        throw Error("feature/mask dimension mismatch");
    if (bin_count < 2) throw Error("bin count must be at least 2");

    Histogram h;
    h.bin_count = bin_count;
    h.floor_epsilon = floor_epsilon;
    h.bins.assign(bin_count, 0.0);

    long n = 0;
    for (std::size_t i = 0; i < mask.inside.size(); ++i) {
        if (mask.inside[i]) {
            h.bins[feature_bin(feature.data[i], bin_count)] += 1.0;
            ++n;
        }
    }
    if (n == 0) throw Error("empty region");

    // Normalize counts, add the floor, renormalize.
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_total = 1.0 / (1.0 + bin_count * floor_epsilon);
    for (double& b : h.bins) b = (b * inv_n + floor_epsilon) * inv_total;
    return h;
}

/// KL(p || q) = sum_b p(b) ln(p(b)/q(b)). Bins with p(b) = 0 contribute 0.
inline double kl_divergence(const Histogram& p, const Histogram& q) {
    if (p.bin_count != q.bin_count) throw Error("histogram bin-count mismatch");
    double d = 0.0;
    for (int b = 0; b < p.bin_count; ++b) {
        if (p.bins[b] > 0.0) d += p.bins[b] * std::log(p.bins[b] / q.bins[b]);
    }
    return d < 0.0 ? 0.0 : d;
}

/// Per-pixel logical negation.
inline RegionMask complement_mask(const RegionMask& mask) {
    RegionMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.inside.size(); ++i)
        out.inside[i] = mask.inside[i] ? 0 : 1;
    return out;
}

} // namespace contrack
