#pragma once

#include "contrack/image.hpp"

namespace contrack {

/// Accuracy of a tracked region against ground truth.
/// drc: fraction of the desired region covered by the tracked region.
/// urc: fraction of the tracked region lying outside the desired region.
struct CoverageScore {
    double drc = 0.0;
    double urc = 0.0;
    long intersection_area = 0;
    long tracked_area = 0;
    long desired_area = 0;
};

inline CoverageScore coverage(const RegionMask& tracked, const RegionMask& desired) {
    if (!tracked.same_size(desired)) throw Error("mask dimension mismatch");
    CoverageScore s;
    for (std::size_t i = 0; i < tracked.inside.size(); ++i) {
        const bool t = tracked.inside[i] != 0;
        const bool d = desired.inside[i] != 0;
        s.tracked_area += t;
        s.desired_area += d;
        s.intersection_area += (t && d);
    }
    if (s.tracked_area == 0 || s.desired_area == 0) throw Error("empty mask");
    s.drc = static_cast<double>(s.intersection_area) / static_cast<double>(s.desired_area);
    s.urc = static_cast<double>(s.tracked_area - s.intersection_area) /
            static_cast<double>(s.tracked_area);
    return s;
}

} // namespace contrack
