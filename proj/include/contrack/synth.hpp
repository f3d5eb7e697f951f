#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contrack/image.hpp"

namespace contrack {

/// Scene primitive. Colors are RGB in [0,1]; grayscale scenes use the red
/// component. Velocity is pixels per frame.
struct Shape {
    enum class Kind { Disk, Rect };
    Kind kind = Kind::Disk;
    double cx = 0, cy = 0;
    double radius = 0;          // disk
    double half_w = 0, half_h = 0; // rect
    std::array<double, 3> color{0, 0, 0};
    double vx = 0, vy = 0;

    bool covers(double x, double y, int frame) const {
        const double px = cx + vx * frame, py = cy + vy * frame;
        if (kind == Kind::Disk) {
            const double dx = x - px, dy = y - py;
            return dx * dx + dy * dy <= radius * radius;
        }
        return std::abs(x - px) <= half_w && std::abs(y - py) <= half_h;
    }
};

/// Deterministic synthetic scene: background, ordered shapes (the first one
/// is the tracked ground truth), optional linear shading and uniform noise.
struct SceneSpec {
    int width = 64, height = 64;
    int channels = 1;
    std::array<double, 3> background{0, 0, 0};
    std::vector<Shape> shapes;
    double shading_dir_x = 1, shading_dir_y = 0;
    double shading_strength = 0;
    double noise_amplitude = 0;
    int frames = 1;
    std::uint32_t seed = 0;
};

namespace detail {

inline void check_scene(const SceneSpec& spec) {
    if (spec.width < 2 || spec.height < 2) throw Error("scene dimensions too small");
    if (spec.channels != 1 && spec.channels != 3) throw Error("scene channels must be 1 or 3");
    if (spec.frames < 1) throw Error("scene must have at least 1 frame");
    if (spec.shapes.empty()) throw Error("scene must have at least one shape");
    if (spec.noise_amplitude < 0 || spec.noise_amplitude > 0.2)
        throw Error("noise amplitude must be in [0, 0.2]");
    for (const Shape& s : spec.shapes) {
        for (int f = 0; f < spec.frames; ++f) {
            const double px = s.cx + s.vx * f, py = s.cy + s.vy * f;
            double ex, ey;
            if (s.kind == Shape::Kind::Disk) {
                ex = ey = s.radius;
                if (s.radius <= 0) throw Error("disk radius must be positive");
            } else {
                ex = s.half_w;
                ey = s.half_h;
                if (s.half_w <= 0 || s.half_h <= 0) throw Error("rect extent must be positive");
            }
            if (px - ex < 0 || px + ex > spec.width - 1 || py - ey < 0 ||
                py + ey > spec.height - 1)
                throw Error("shape out of bounds in frame " + std::to_string(f));
        }
    }
}

} // namespace detail

/// Renders every frame plus the exact ground-truth mask of the first shape.
/// Identical specs (including seed) produce bit-identical output.
inline std::pair<std::vector<Image>, std::vector<RegionMask>> render(const SceneSpec& spec) {
    detail::check_scene(spec);
    std::vector<Image> images;
    std::vector<RegionMask> masks;
    images.reserve(spec.frames);
    masks.reserve(spec.frames);

    // Shading ramps linearly along the projection axis, 0 at one end of the
    // frame to -strength at the other.
    const double dlen = std::hypot(spec.shading_dir_x, spec.shading_dir_y);
    const double dx = dlen > 0 ? spec.shading_dir_x / dlen : 0.0;
    const double dy = dlen > 0 ? spec.shading_dir_y / dlen : 0.0;
    double pmin = 0, pmax = 0;
    for (const int cx : {0, spec.width - 1})
        for (const int cy : {0, spec.height - 1}) {
            const double p = cx * dx + cy * dy;
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
        }
    const double pspan = pmax > pmin ? pmax - pmin : 1.0;

    for (int f = 0; f < spec.frames; ++f) {
        Image img(spec.width, spec.height, spec.channels);
        RegionMask mask(spec.width, spec.height);
        // Per-frame generator keeps frames independent of render order.
        std::mt19937 rng(spec.seed + 0x9e3779b9u * static_cast<std::uint32_t>(f));
        std::uniform_real_distribution<double> noise(-spec.noise_amplitude,
                                                     spec.noise_amplitude);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                std::array<double, 3> c = spec.background;
                for (const Shape& s : spec.shapes)
                    if (s.covers(x, y, f)) c = s.color;
                if (spec.shading_strength != 0.0) {
                    const double t = (x * dx + y * dy - pmin) / pspan;
                    for (double& v : c) v -= spec.shading_strength * t;
                }
                if (spec.noise_amplitude > 0.0) {
                    const double n = noise(rng);
                    for (double& v : c) v += n;
                }
                for (int ch = 0; ch < spec.channels; ++ch)
                    img.at(x, y, ch) = std::clamp(c[ch], 0.0, 1.0);
                mask.set(x, y, spec.shapes.front().covers(x, y, f));
            }
        }
        images.push_back(std::move(img));
        masks.push_back(std::move(mask));
    }
    return {std::move(images), std::move(masks)};
}

/// Stand-in for an eye image sequence: bright sclera background, colored
/// iris annulus with a dark pupil, optional shading band and small drift.
/// Ground truth is the iris+pupil disk.
struct EyeSceneParams {
    int width = 96, height = 96;
    double cx = 36, cy = 42;
    double iris_radius = 15;
    double pupil_radius = 6;
    std::array<double, 3> sclera{0.88, 0.87, 0.86};
    std::array<double, 3> iris{0.30, 0.45, 0.65};
    std::array<double, 3> pupil{0.10, 0.09, 0.09};
    double shading_strength = 0.0;
    double drift_x = 4, drift_y = 2;
    int frames = 5;
    double noise_amplitude = 0.01;
    std::uint32_t seed = 7;
};

inline SceneSpec eye_scene(const EyeSceneParams& p) {
    if (!(p.iris_radius > p.pupil_radius && p.pupil_radius > 0))
        throw Error("eye scene requires iris radius > pupil radius > 0");
    SceneSpec spec;
    spec.width = p.width;
    spec.height = p.height;
    spec.channels = 3;
    spec.background = p.sclera;
    spec.shading_dir_x = 1;
    spec.shading_dir_y = 0.25;
    spec.shading_strength = p.shading_strength;
    spec.noise_amplitude = p.noise_amplitude;
    spec.frames = p.frames;
    spec.seed = p.seed;

    Shape iris;
    iris.kind = Shape::Kind::Disk;
    iris.cx = p.cx;
    iris.cy = p.cy;
    iris.radius = p.iris_radius;
    iris.color = p.iris;
    iris.vx = p.drift_x;
    iris.vy = p.drift_y;
    spec.shapes.push_back(iris);

    Shape pupil = iris;
    pupil.radius = p.pupil_radius;
    pupil.color = p.pupil;
    spec.shapes.push_back(pupil);
    return spec;
}

/// Scene text format: one `key = value` per line, '#' comments. Keys:
///   width, height, channels, background, shading (dirx diry strength),
///   noise, frames, seed,
///   disk = cx cy r  R G B  vx vy
///   rect = cx cy hw hh  R G B  vx vy
/// Shapes keep file order; the first is the tracked ground truth.
inline SceneSpec parse_scene(const std::string& text) {
    SceneSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw Error("scene parse error (line " + std::to_string(lineno) + "): " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                fail("expected key = value");
            continue;
        }
        std::istringstream keys(line.substr(0, eq)), vals(line.substr(eq + 1));
        std::string key;
        keys >> key;
        if (key.empty()) fail("missing key");

        if (key == "width") { if (!(vals >> spec.width)) fail("bad width"); }
        else if (key == "height") { if (!(vals >> spec.height)) fail("bad height"); }
        else if (key == "channels") { if (!(vals >> spec.channels)) fail("bad channels"); }
        else if (key == "frames") { if (!(vals >> spec.frames)) fail("bad frames"); }
        else if (key == "seed") { if (!(vals >> spec.seed)) fail("bad seed"); }
        else if (key == "noise") { if (!(vals >> spec.noise_amplitude)) fail("bad noise"); }
        else if (key == "background") {
            if (!(vals >> spec.background[0])) fail("bad background");
            if (!(vals >> spec.background[1])) spec.background[2] = spec.background[1] = spec.background[0];
            else if (!(vals >> spec.background[2])) fail("background needs 1 or 3 values");
        } else if (key == "shading") {
            if (!(vals >> spec.shading_dir_x >> spec.shading_dir_y >> spec.shading_strength))
                fail("shading needs: dirx diry strength");
        } else if (key == "disk" || key == "rect") {
            Shape s;
            if (key == "disk") {
                s.kind = Shape::Kind::Disk;
                if (!(vals >> s.cx >> s.cy >> s.radius)) fail("disk needs: cx cy r R G B vx vy");
            } else {
                s.kind = Shape::Kind::Rect;
                if (!(vals >> s.cx >> s.cy >> s.half_w >> s.half_h))
                    fail("rect needs: cx cy hw hh R G B vx vy");
            }
            if (!(vals >> s.color[0] >> s.color[1] >> s.color[2] >> s.vx >> s.vy))
                fail("shape needs color and velocity: R G B vx vy");
            spec.shapes.push_back(s);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (spec.shapes.empty()) throw Error("scene parse error: no shapes defined");
    return spec;
}

inline std::string format_scene(const SceneSpec& spec) {
    std::ostringstream out;
    out << "width = " << spec.width << "\n"
        << "height = " << spec.height << "\n"
        << "channels = " << spec.channels << "\n"
        << "background = " << spec.background[0] << " " << spec.background[1]
        << " " << spec.background[2] << "\n"
        << "shading = " << spec.shading_dir_x << " " << spec.shading_dir_y
        << " " << spec.shading_strength << "\n"
        << "noise = " << spec.noise_amplitude << "\n"
        << "frames = " << spec.frames << "\n"
        << "seed = " << spec.seed << "\n";
    for (const Shape& s : spec.shapes) {
        if (s.kind == Shape::Kind::Disk)
            out << "disk = " << s.cx << " " << s.cy << " " << s.radius;
        else
            out << "rect = " << s.cx << " " << s.cy << " " << s.half_w << " " << s.half_h;
        out << "  " << s.color[0] << " " << s.color[1] << " " << s.color[2]
            << "  " << s.vx << " " << s.vy << "\n";
    }
    return out.str();
}

} // namespace contrack
