#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "contrack/levelset.hpp"

using namespace contrack;

namespace {

RegionMask disk_mask(int w, int h, double cx, double cy, double r) {
    RegionMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
    return m;
}

LevelSetGrid analytic_disk_sdf(int w, int h, double cx, double cy, double r) {
    LevelSetGrid g(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            g.at(x, y) = std::hypot(x - cx, y - cy) - r;
    return g;
}

double region_radius(const RegionMask& m) {
    return std::sqrt(static_cast<double>(region_area(m)) / M_PI);
}

RegionMask random_blob(std::mt19937& rng, int w, int h) {
    // Union of a few random disks, clipped away from the border.
    RegionMask m(w, h);
    const int disks = 1 + static_cast<int>(rng() % 3);
    for (int d = 0; d < disks; ++d) {
        const double cx = 4 + static_cast<double>(rng() % (w - 8));
        const double cy = 4 + static_cast<double>(rng() % (h - 8));
        const double r = 2 + static_cast<double>(rng() % 5);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
    }
    if (region_area(m) == 0) m.set(w / 2, h / 2, true);
    return m;
}

} // namespace

TEST_CASE("init_signed_distance reproduces the analytic disk distance") {
    const RegionMask m = disk_mask(64, 64, 32, 32, 10);
    const LevelSetGrid g = init_signed_distance(m);
    CHECK(g.at(32, 32) == Catch::Approx(-10.0).margin(0.6));
    const double corner_expected = std::hypot(32.0, 32.0) - 10.0;
    CHECK(g.at(0, 0) == Catch::Approx(corner_expected).margin(0.6));
}

TEST_CASE("init_signed_distance of a half plane is linear") {
    RegionMask m(64, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) m.set(x, y, true);
    const LevelSetGrid g = init_signed_distance(m);
    for (int y = 0; y < 32; y += 5)
        for (int x = 0; x < 64; x += 3)
            CHECK(g.at(x, y) == Catch::Approx(x - 31.5).margin(0.6));
}

TEST_CASE("init_signed_distance minimizes u at a single-pixel mask") {
    RegionMask m(16, 16);
    m.set(5, 9, true);
    const LevelSetGrid g = init_signed_distance(m);
    const double umin = *std::min_element(g.u.begin(), g.u.end());
    CHECK(g.at(5, 9) == umin);
    CHECK(g.at(5, 9) < 0.0);
}

TEST_CASE("init_signed_distance rejects degenerate masks") {
    CHECK_THROWS_AS(init_signed_distance(RegionMask(8, 8)), Error);
    CHECK_THROWS_AS(init_signed_distance(RegionMask(8, 8, true)), Error);
}

TEST_CASE("extract_mask inverts init_signed_distance exactly") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const RegionMask m = random_blob(rng, 24, 20);
        if (region_area(m) == 24 * 20) continue;
        CHECK(extract_mask(init_signed_distance(m)) == m);
    }
}

TEST_CASE("signed-distance property holds near the zero level set") {
    std::mt19937 rng(37);
    const RegionMask m = random_blob(rng, 48, 48);
    const LevelSetGrid g = init_signed_distance(m);
    long near = 0, good = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            if (std::abs(g.at(x, y)) > 5.0) continue;
            ++near;
            double ux, uy;
            const int xl = std::max(x - 1, 0), xr = std::min(x + 1, 47);
            const int yd = std::max(y - 1, 0), yu = std::min(y + 1, 47);
            ux = (g.at(xr, y) - g.at(xl, y)) / (xr - xl);
            uy = (g.at(x, yu) - g.at(x, yd)) / (yu - yd);
            const double n = std::hypot(ux, uy);
            if (n >= 0.5 && n <= 1.5) ++good;
        }
    REQUIRE(near > 0);
    CHECK(static_cast<double>(good) / static_cast<double>(near) >= 0.9);
}

TEST_CASE("upwind gradients vanish on a constant field") {
    LevelSetGrid g(12, 9, 3.5);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) {
            CHECK(upwind_gradient_plus(g, x, y) == 0.0);
            CHECK(upwind_gradient_minus(g, x, y) == 0.0);
        }
}

TEST_CASE("upwind gradients are 1 on an exact ramp") {
    LevelSetGrid g(16, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) g.at(x, y) = x;
    for (int y = 0; y < 8; ++y)
        for (int x = 1; x < 15; ++x) {
            CHECK(upwind_gradient_plus(g, x, y) == Catch::Approx(1.0).margin(1e-14));
            CHECK(upwind_gradient_minus(g, x, y) == Catch::Approx(1.0).margin(1e-14));
        }
}

TEST_CASE("upwind gradients at a kink select the correct one-sided values") {
    const int x0 = 8;
    LevelSetGrid g(17, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 17; ++x) g.at(x, y) = std::abs(x - x0);
    // At the kink D-x = -1 and D+x = +1: the outward scheme sees nothing,
    // the inward scheme sees both sides.
    CHECK(upwind_gradient_plus(g, x0, 2) == 0.0);
    CHECK(upwind_gradient_minus(g, x0, 2) == Catch::Approx(std::sqrt(2.0)).margin(1e-14));
}

TEST_CASE("upwind update ignores the side information does not flow from") {
    LevelSetGrid g(16, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) g.at(x, y) = x;
    SpeedField v(16, 8, 1.0); // outward speed: plus-scheme reads the backward difference
    const double dt = stable_dt(v, 0.0);
    const LevelSetGrid base = evolve_step(g, v, 0.0, dt);

    LevelSetGrid bumped = g;
    bumped.at(9, 4) += 0.5; // forward-difference side of pixel (8, 4) grows steeper
    const LevelSetGrid after = evolve_step(bumped, v, 0.0, dt);
    CHECK(after.at(8, 4) == base.at(8, 4));
}

TEST_CASE("curvature of a disk front is 1/r") {
    const LevelSetGrid g = analytic_disk_sdf(64, 64, 32.0, 32.0, 10.0);
    CHECK(curvature(g, 42, 32) == Catch::Approx(0.1).epsilon(0.10));
    CHECK(curvature(g, 32, 22) == Catch::Approx(0.1).epsilon(0.10));

    const LevelSetGrid g5 = analytic_disk_sdf(64, 64, 32.0, 32.0, 5.0);
    CHECK(curvature(g5, 37, 32) == Catch::Approx(0.2).epsilon(0.10));
}

TEST_CASE("curvature of a straight front is zero, flat fields guarded") {
    LevelSetGrid line(32, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 32; ++x) line.at(x, y) = x - 11.5;
    for (int y = 2; y < 14; ++y)
        for (int x = 2; x < 30; ++x) CHECK(curvature(line, x, y) == 0.0);

    LevelSetGrid flat(8, 8, 2.0);
    CHECK(curvature(flat, 4, 4) == 0.0);
}

TEST_CASE("stable_dt formula and cap") {
    CHECK(stable_dt(SpeedField(8, 8, 0.0), 0.0) == 1.0);
    CHECK(stable_dt(SpeedField(8, 8, 1.0), 0.0) == Catch::Approx(0.9));
    SpeedField v(8, 8, 0.0);
    v.at(3, 3) = -1.0;
    CHECK(stable_dt(v, 0.0) == Catch::Approx(0.9));
    CHECK(stable_dt(SpeedField(8, 8, 0.0), 1.0) == Catch::Approx(0.225));
}

TEST_CASE("evolve_step with zero speed and weight is the identity") {
    std::mt19937 rng(3);
    const RegionMask m = random_blob(rng, 20, 20);
    const LevelSetGrid g = init_signed_distance(m);
    const LevelSetGrid out = evolve_step(g, SpeedField(20, 20, 0.0), 0.0, 0.5);
    CHECK(out.u == g.u);
}

TEST_CASE("evolve_step rejects CFL-violating steps") {
    const LevelSetGrid g = analytic_disk_sdf(32, 32, 16, 16, 6);
    SpeedField v(32, 32, 1.0);
    const double bound = stable_dt(v, 0.0);
    CHECK_THROWS_AS(evolve_step(g, v, 0.0, bound * 1.02), Error);
    CHECK_NOTHROW(evolve_step(g, v, 0.0, bound));
}

TEST_CASE("unit outward speed grows a disk at unit rate") {
    const double r0 = 8.0;
    LevelSetGrid g = init_signed_distance(disk_mask(64, 64, 32, 32, r0));
    SpeedField v(64, 64, 1.0);
    double t = 0.0;
    while (t < 5.0) {
        const double dt = std::min(stable_dt(v, 0.0), 5.0 - t);
        g = evolve_step(g, v, 0.0, dt);
        t += dt;
    }
    CHECK(region_radius(extract_mask(g)) == Catch::Approx(r0 + 5.0).margin(1.0));
}

TEST_CASE("area is monotone under constant speed") {
    std::mt19937 rng(71);
    const RegionMask m = random_blob(rng, 32, 32);
    for (const double c : {0.7, -0.7}) {
        LevelSetGrid g = init_signed_distance(m);
        SpeedField v(32, 32, c);
        long prev = region_area(extract_mask(g));
        for (int it = 0; it < 12; ++it) {
            g = evolve_step(g, v, 0.0, stable_dt(v, 0.0));
            const long area = region_area(extract_mask(g));
            if (c > 0)
                CHECK(area >= prev);
            else
                CHECK(area <= prev);
            prev = area;
        }
    }
}

TEST_CASE("curvature flow shrinks a circle like sqrt(r0^2 - 2t)") {
    const double r0 = 20.0;
    LevelSetGrid g = init_signed_distance(disk_mask(128, 128, 64, 64, r0));
    const SpeedField v(128, 128, 0.0);
    const double dt = stable_dt(v, 1.0);
    double t = 0.0;
    int step = 0;
    while (t + dt <= 50.0) {
        g = evolve_step(g, v, 1.0, dt);
        t += dt;
        if (++step % 20 == 0) g = reinitialize(g);
        if (step % 40 == 0) {
            const double expected = std::sqrt(r0 * r0 - 2.0 * t);
            CHECK(region_radius(extract_mask(g)) == Catch::Approx(expected).epsilon(0.05));
        }
    }
}

TEST_CASE("perimeter is non-increasing under curvature flow") {
    std::mt19937 rng(12);
    const RegionMask m = random_blob(rng, 48, 48);
    LevelSetGrid g = init_signed_distance(m);
    const SpeedField v(48, 48, 0.0);
    const double dt = stable_dt(v, 1.0);
    std::vector<double> lengths{boundary_length(g)};
    for (int it = 1; it <= 60; ++it) {
        g = evolve_step(g, v, 1.0, dt);
        if (it % 20 == 0) g = reinitialize(g);
        lengths.push_back(boundary_length(g));
        if (region_area(extract_mask(g)) == 0) break;
    }
    for (std::size_t i = 0; i + 10 < lengths.size(); ++i)
        CHECK(lengths[i + 10] <= lengths[i] * 1.001);
}

TEST_CASE("extract_mask and extract_boundary conventions") {
    LevelSetGrid outside(6, 5, 1.0);
    CHECK(region_area(extract_mask(outside)) == 0);
    CHECK(extract_boundary(outside).empty());

    LevelSetGrid inside(6, 5, -1.0);
    CHECK(region_area(extract_mask(inside)) == 30);
    CHECK(extract_boundary(inside).size() == 2 * 6 + 2 * 5 - 4);

    const LevelSetGrid disk = init_signed_distance(disk_mask(64, 64, 32, 32, 10));
    const auto boundary = extract_boundary(disk);
    CHECK(boundary.size() >= std::size_t(2 * M_PI * 10 * 0.8));
    CHECK(boundary.size() <= std::size_t(2 * M_PI * 10 * 1.5));
}

TEST_CASE("boundary_length approximates known perimeters") {
    const LevelSetGrid disk = analytic_disk_sdf(64, 64, 32, 32, 10);
    CHECK(boundary_length(disk) == Catch::Approx(2 * M_PI * 10).epsilon(0.05));

    RegionMask square(64, 64);
    for (int y = 20; y < 40; ++y)
        for (int x = 20; x < 40; ++x) square.set(x, y, true);
    CHECK(boundary_length(init_signed_distance(square)) == Catch::Approx(80.0).epsilon(0.10));
}

TEST_CASE("reinitialize preserves the region and restores the distance property") {
    const RegionMask m = disk_mask(48, 48, 24, 24, 9);
    const LevelSetGrid g = init_signed_distance(m);

    SECTION("fixed point on a signed distance field") {
        CHECK(extract_mask(reinitialize(g)) == m);
    }
    SECTION("rescaled field keeps its zero set") {
        LevelSetGrid scaled = g;
        for (double& u : scaled.u) u *= 5.0;
        const LevelSetGrid out = reinitialize(scaled);
        CHECK(extract_mask(out) == m);
        CHECK(out.at(24, 24) == Catch::Approx(g.at(24, 24)).margin(0.6));
    }
    SECTION("steep tanh front recovers the distance near the zero set") {
        LevelSetGrid steep = g;
        for (double& u : steep.u) u = std::tanh(u);
        const LevelSetGrid out = reinitialize(steep);
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x)
                if (std::abs(g.at(x, y)) <= 3.0)
                    CHECK(out.at(x, y) == Catch::Approx(g.at(x, y)).margin(0.6));
    }
    SECTION("uniform-sign fields are degenerate") {
        CHECK_THROWS_AS(reinitialize(LevelSetGrid(8, 8, 1.0)), Error);
    }
}
