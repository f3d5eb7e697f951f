#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "contrack/image.hpp"
#include "contrack/parallel.hpp"

namespace contrack {

/// Scalar field u over the image lattice (spacing 1 pixel). The tracked
/// curve is the zero level set; u <= 0 is the region interior.
struct LevelSetGrid {
    int width = 0;
    int height = 0;
    std::vector<double> u;

    LevelSetGrid() = default;
    LevelSetGrid(int w, int h, double fill = 0.0)
        : width(w), height(h), u(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw Error("invalid grid dimensions");
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    double at(int x, int y) const { return u[index(x, y)]; }
    double& at(int x, int y) { return u[index(x, y)]; }
};

/// Outward-normal speed per pixel; positive speed grows the region.
struct SpeedField {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    SpeedField() = default;
    SpeedField(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw Error("invalid field dimensions");
    }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

constexpr double kEdtInf = 1e18;

// One pass of the lower-envelope squared distance transform (Felzenszwalb).
inline void edt_pass(const double* f, double* d, int n, int* hull, double* breaks) {
    int k = 0;
    hull[0] = 0;
    breaks[0] = -kEdtInf;
    breaks[1] = kEdtInf;
    auto intersect = [&](int q, int p) {
        return ((f[q] + static_cast<double>(q) * q) -
                (f[p] + static_cast<double>(p) * p)) /
               (2.0 * q - 2.0 * p);
    };
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, hull[k]);
        while (s <= breaks[k]) {
            --k;
            s = intersect(q, hull[k]);
        }
        ++k;
        hull[k] = q;
        breaks[k] = s;
        breaks[k + 1] = kEdtInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (breaks[k + 1] < q) ++k;
        const double dq = q - hull[k];
        d[q] = dq * dq + f[hull[k]];
    }
}

// Two-pass transform of a seed field: d(q) = min_p (|q - p|^2 + seed(p)).
// With 0/inf seeds this is the exact squared Euclidean distance transform;
// nonzero seeds propagate sub-pixel offsets.
inline void squared_distance_field(int w, int h, std::vector<double>& g) {
    const int n = std::max(w, h);
    std::vector<double> f(n), d(n);
    std::vector<int> hull(n);
    std::vector<double> breaks(n + 1);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = g[static_cast<std::size_t>(y) * w + x];
        edt_pass(f.data(), d.data(), h, hull.data(), breaks.data());
        for (int y = 0; y < h; ++y) g[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        double* row = g.data() + static_cast<std::size_t>(y) * w;
        std::copy(row, row + w, f.data());
        edt_pass(f.data(), d.data(), w, hull.data(), breaks.data());
        std::copy(d.data(), d.data() + w, row);
    }
}

// Squared Euclidean distance to the nearest pixel whose mask membership
// equals `target`.
inline std::vector<double> squared_distance(const RegionMask& mask, bool target) {
    const int w = mask.width, h = mask.height;
    std::vector<double> g(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = ((mask.inside[i] != 0) == target) ? 0.0 : kEdtInf;
    squared_distance_field(w, h, g);
    return g;
}

// Backward/forward one-sided differences; at a border the available side
// substitutes for the missing one.
inline void one_sided_diffs(const LevelSetGrid& g, int x, int y,
                            double& dmx, double& dpx, double& dmy, double& dpy) {
    const double c = g.at(x, y);
    const bool has_l = x > 0, has_r = x + 1 < g.width;
    const bool has_d = y > 0, has_u = y + 1 < g.height;
    const double bx = has_l ? c - g.at(x - 1, y) : 0.0;
    const double fx = has_r ? g.at(x + 1, y) - c : 0.0;
    const double by = has_d ? c - g.at(x, y - 1) : 0.0;
    const double fy = has_u ? g.at(x, y + 1) - c : 0.0;
    dmx = has_l ? bx : fx;
    dpx = has_r ? fx : bx;
    dmy = has_d ? by : fy;
    dpy = has_u ? fy : by;
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

inline void central_gradient(const LevelSetGrid& g, int x, int y,
                             double& ux, double& uy) {
    const int xl = clamp_index(x - 1, g.width), xr = clamp_index(x + 1, g.width);
    const int yd = clamp_index(y - 1, g.height), yu = clamp_index(y + 1, g.height);
    ux = 0.5 * (g.at(xr, y) - g.at(xl, y));
    uy = 0.5 * (g.at(x, yu) - g.at(x, yd));
}

} // namespace detail

/// Signed distance to the mask boundary: negative strictly inside, positive
/// strictly outside, zero level set half a pixel off the inside/outside
/// pixel interface. extract_mask() of the result reproduces the input mask.
inline LevelSetGrid init_signed_distance(const RegionMask& mask) {
    const long area = region_area(mask);
    const long total = static_cast<long>(mask.width) * mask.height;
    if (area == 0 || area == total) throw Error("degenerate mask (empty or full)");

    const auto sq_to_inside = detail::squared_distance(mask, true);
    const auto sq_to_outside = detail::squared_distance(mask, false);
    LevelSetGrid g(mask.width, mask.height);
    for (std::size_t i = 0; i < g.u.size(); ++i) {
        g.u[i] = mask.inside[i] ? -(std::sqrt(sq_to_outside[i]) - 0.5)
                                : std::sqrt(sq_to_inside[i]) - 0.5;
    }
    return g;
}

/// Upwind gradient magnitude for outward motion (speed >= 0):
/// [max(D-x,0)^2 + min(D+x,0)^2 + max(D-y,0)^2 + min(D+y,0)^2]^(1/2).
inline double upwind_gradient_plus(const LevelSetGrid& g, int x, int y) {
    double dmx, dpx, dmy, dpy;
    detail::one_sided_diffs(g, x, y, dmx, dpx, dmy, dpy);
    const double a = std::max(dmx, 0.0), b = std::min(dpx, 0.0);
    const double c = std::max(dmy, 0.0), d = std::min(dpy, 0.0);
    return std::sqrt(a * a + b * b + c * c + d * d);
}

/// Upwind gradient magnitude for inward motion (speed < 0): the scheme
/// above with the roles of the one-sided differences swapped.
inline double upwind_gradient_minus(const LevelSetGrid& g, int x, int y) {
    double dmx, dpx, dmy, dpy;
    detail::one_sided_diffs(g, x, y, dmx, dpx, dmy, dpy);
    const double a = std::max(dpx, 0.0), b = std::min(dmx, 0.0);
    const double c = std::max(dpy, 0.0), d = std::min(dmy, 0.0);
    return std::sqrt(a * a + b * b + c * c + d * d);
}

/// Mean curvature of the level-set contour through (x, y), from central
/// first and second differences. Returns 0 where the gradient degenerates;
/// clamped to [-1, 1] (grid-scale kinks otherwise blow up the estimate).
inline double curvature(const LevelSetGrid& g, int x, int y) {
    const int xl = detail::clamp_index(x - 1, g.width), xr = detail::clamp_index(x + 1, g.width);
    const int yd = detail::clamp_index(y - 1, g.height), yu = detail::clamp_index(y + 1, g.height);
    const double ux = 0.5 * (g.at(xr, y) - g.at(xl, y));
    const double uy = 0.5 * (g.at(x, yu) - g.at(x, yd));
    const double grad2 = ux * ux + uy * uy;
    if (grad2 < 1e-12) return 0.0;
    const double uxx = g.at(xr, y) - 2.0 * g.at(x, y) + g.at(xl, y);
    const double uyy = g.at(x, yu) - 2.0 * g.at(x, y) + g.at(x, yd);
    const double uxy = 0.25 * (g.at(xr, yu) - g.at(xr, yd) - g.at(xl, yu) + g.at(xl, yd));
    const double k = (uxx * uy * uy - 2.0 * ux * uy * uxy + uyy * ux * ux) /
                     (grad2 * std::sqrt(grad2));
    return std::clamp(k, -1.0, 1.0);
}

/// Largest stable explicit time step for the combined advective/parabolic
/// update: 0.9 / (max|v| + 4 * curvatureWeight), or 1.0 when both vanish.
inline double stable_dt(const SpeedField& v, double curvature_weight) {
    if (curvature_weight < 0.0) throw Error("curvature weight must be non-negative");
    double maxv = 0.0;
    for (double s : v.v) maxv = std::max(maxv, std::abs(s));
    const double denom = maxv + 4.0 * curvature_weight;
    if (denom <= 0.0) return 1.0;
    return 0.9 / denom;
}

/// One explicit step of u_t + v ||grad u|| = curvatureWeight * kappa ||grad u||.
/// The advective term upwinds per the speed sign; the curvature term is
/// parabolic and uses central differences.
inline LevelSetGrid evolve_step(const LevelSetGrid& g, const SpeedField& v,
                                double curvature_weight, double dt) {
    if (g.width != v.width || g.height != v.height)
        throw Error("grid/speed dimension mismatch");
    if (dt <= 0.0) throw Error("time step must be positive");
    const double bound = stable_dt(v, curvature_weight);
    if (dt > bound * 1.01) throw Error("time step violates the CFL bound");

    LevelSetGrid out(g.width, g.height);
    parallel_rows(g.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < g.width; ++x) {
                const double s = v.at(x, y);
                double adv = 0.0;
                if (s > 0.0)      adv = s * upwind_gradient_plus(g, x, y);
                else if (s < 0.0) adv = s * upwind_gradient_minus(g, x, y);
                double curv = 0.0;
                if (curvature_weight > 0.0) {
                    double ux, uy;
                    detail::central_gradient(g, x, y, ux, uy);
                    curv = curvature_weight * curvature(g, x, y) *
                           std::sqrt(ux * ux + uy * uy);
                }
                out.at(x, y) = g.at(x, y) - dt * adv + dt * curv;
            }
        }
    });
    return out;
}

/// Region recovered from the grid: inside wherever u <= 0.
inline RegionMask extract_mask(const LevelSetGrid& g) {
    RegionMask m(g.width, g.height);
    for (std::size_t i = 0; i < g.u.size(); ++i) m.inside[i] = g.u[i] <= 0.0 ? 1 : 0;
    return m;
}

/// Inside pixels with at least one 4-neighbor outside; pixels beyond the
/// image border count as outside.
inline std::vector<std::pair<int, int>> boundary_pixels(const RegionMask& m) {
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) continue;
            const bool edge = x == 0 || x == m.width - 1 || y == 0 || y == m.height - 1 ||
                              !m.at(x - 1, y) || !m.at(x + 1, y) ||
                              !m.at(x, y - 1) || !m.at(x, y + 1);
            if (edge) out.emplace_back(x, y);
        }
    }
    return out;
}

inline std::vector<std::pair<int, int>> extract_boundary(const LevelSetGrid& g) {
    return boundary_pixels(extract_mask(g));
}

/// Length of the zero level set by marching squares: each 2x2 cell
/// contributes the segments of the linearly interpolated zero contour.
inline double boundary_length(const LevelSetGrid& g) {
    auto cross = [](double a, double b) { return a / (a - b); };
    double length = 0.0;
    for (int y = 0; y + 1 < g.height; ++y) {
        for (int x = 0; x + 1 < g.width; ++x) {
            const double va = g.at(x, y), vb = g.at(x + 1, y);
            const double vc = g.at(x + 1, y + 1), vd = g.at(x, y + 1);
            const int code = (va <= 0.0 ? 1 : 0) | (vb <= 0.0 ? 2 : 0) |
                             (vc <= 0.0 ? 4 : 0) | (vd <= 0.0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            // Edge crossings: top a-b, right b-c, bottom d-c, left a-d.
            const double tx = cross(va, vb), ty = cross(vb, vc);
            const double bx = cross(vd, vc), ly = cross(va, vd);
            const auto seg = [&](double x0, double y0, double x1, double y1) {
                length += std::hypot(x1 - x0, y1 - y0);
            };
            switch (code) {
                case 1: case 14: seg(tx, 0, 0, ly); break;
                case 2: case 13: seg(tx, 0, 1, ty); break;
                case 3: case 12: seg(0, ly, 1, ty); break;
                case 4: case 11: seg(1, ty, bx, 1); break;
                case 6: case 9:  seg(tx, 0, bx, 1); break;
                case 7: case 8:  seg(0, ly, bx, 1); break;
                case 5:
                case 10: {
                    // Saddle: resolve the connection by the cell-center sign.
                    const bool center_inside = (va + vb + vc + vd) * 0.25 <= 0.0;
                    if ((code == 5) == center_inside) {
                        seg(tx, 0, 1, ty);
                        seg(0, ly, bx, 1);
                    } else {
                        seg(tx, 0, 0, ly);
                        seg(1, ty, bx, 1);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return length;
}

/// Restores the signed-distance property without moving the zero level set.
/// A plain distance transform of the mask would snap the contour back to
/// pixel-interface raggedness, inflating the measured curve length after
/// every reinit; instead the transform is seeded with the sub-pixel
/// distances of the incoming field's zero crossings, so the interpolated
/// contour survives. Signs are copied from the input, so the extracted mask
/// is preserved exactly.
inline LevelSetGrid reinitialize(const LevelSetGrid& g) {
    const RegionMask m = extract_mask(g);
    const long area = region_area(m);
    if (area == 0 || area == static_cast<long>(m.width) * m.height)
        throw Error("degenerate level set (uniform sign)");

    std::vector<double> seed(g.u.size(), detail::kEdtInf);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const double c = g.at(x, y);
            double d0 = detail::kEdtInf;
            auto consider = [&](int nx, int ny) {
                const double nv = g.at(nx, ny);
                if ((c <= 0.0) == (nv <= 0.0)) return;
                const double denom = std::abs(c) + std::abs(nv);
                const double t = denom > 1e-300 ? std::abs(c) / denom : 0.0;
                d0 = std::min(d0, t);
            };
            if (x > 0) consider(x - 1, y);
            if (x + 1 < g.width) consider(x + 1, y);
            if (y > 0) consider(x, y - 1);
            if (y + 1 < g.height) consider(x, y + 1);
            if (d0 < detail::kEdtInf) seed[g.index(x, y)] = d0 * d0;
        }
    }

    detail::squared_distance_field(g.width, g.height, seed);
    LevelSetGrid out(g.width, g.height);
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        const double d = std::sqrt(seed[i]);
        out.u[i] = m.inside[i] ? -d : d;
    }
    return out;
}

} // namespace contrack
