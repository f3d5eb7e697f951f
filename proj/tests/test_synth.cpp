#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "contrack/image.hpp"
#include "contrack/synth.hpp"

using namespace contrack;

namespace {

SceneSpec single_disk(double r = 10, double vx = 0, double vy = 0, int frames = 1) {
    SceneSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.channels = 1;
    spec.background = {0.9, 0.9, 0.9};
    Shape s;
    s.kind = Shape::Kind::Disk;
    s.cx = 28;
    s.cy = 32;
    s.radius = r;
    s.color = {0.2, 0.2, 0.2};
    s.vx = vx;
    s.vy = vy;
    spec.frames = frames;
    spec.shapes.push_back(s);
    return spec;
}

} // namespace

TEST_CASE("rendered disk mask area matches pi r^2") {
    const auto [images, masks] = render(single_disk(10));
    REQUIRE(images.size() == 1);
    images[0].validate();
    const double area = static_cast<double>(region_area(masks[0]));
    CHECK(area == Catch::Approx(M_PI * 100.0).epsilon(0.02));
}

TEST_CASE("translated shapes shift their masks exactly") {
    const auto [images, masks] = render(single_disk(8, 3, 0, 2));
    REQUIRE(masks.size() == 2);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const bool shifted = x >= 3 && masks[0].at(x - 3, y);
            CHECK(masks[1].at(x, y) == shifted);
        }
}

TEST_CASE("render is deterministic in the seed") {
    SceneSpec spec = single_disk(9, 1, 1, 3);
    spec.noise_amplitude = 0.05;
    spec.seed = 1234;
    const auto [img_a, mask_a] = render(spec);
    const auto [img_b, mask_b] = render(spec);
    for (std::size_t f = 0; f < img_a.size(); ++f) {
        CHECK(img_a[f].data == img_b[f].data);
        CHECK(mask_a[f] == mask_b[f]);
    }

    SceneSpec other = spec;
    other.seed = 99;
    const auto [img_c, mask_c] = render(other);
    CHECK(img_a[0].data != img_c[0].data);
    CHECK(mask_a[0] == mask_c[0]); // geometry is seed-independent
}

TEST_CASE("ground truth is the first shape's exact coverage") {
    SceneSpec spec = single_disk(7);
    Shape rect;
    rect.kind = Shape::Kind::Rect;
    rect.cx = 48;
    rect.cy = 16;
    rect.half_w = 6;
    rect.half_h = 4;
    rect.color = {0.5, 0.5, 0.5};
    spec.shapes.push_back(rect);

    const auto [images, masks] = render(spec);
    const Shape& truth = spec.shapes.front();
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            CHECK(masks[0].at(x, y) == truth.covers(x, y, 0));
}

TEST_CASE("equal-luma different-color disks separate in channels only") {
    // Solve 0.299 R + 0.587 G + 0.114 B for the second green so both colors
    // share the same luma exactly.
    const std::array<double, 3> color_a{0.8, 0.3, 0.4};
    const double gb = (0.299 * (0.8 - 0.2) + 0.587 * 0.3 + 0.114 * (0.4 - 0.6)) / 0.587;
    const std::array<double, 3> color_b{0.2, gb, 0.6};

    SceneSpec spec;
    spec.width = 96;
    spec.height = 64;
    spec.channels = 3;
    spec.background = {0.95, 0.95, 0.95};
    Shape a;
    a.kind = Shape::Kind::Disk;
    a.cx = 30;
    a.cy = 32;
    a.radius = 11;
    a.color = color_a;
    spec.shapes.push_back(a);
    Shape b = a;
    b.cx = 64;
    b.color = color_b;
    spec.shapes.push_back(b);

    const auto [images, masks] = render(spec);
    const Image gray = to_grayscale(images[0]);
    CHECK(gray.at(30, 32) == Catch::Approx(gray.at(64, 32)).margin(1e-9));
    CHECK(std::abs(images[0].at(30, 32, 0) - images[0].at(64, 32, 0)) > 0.5);
}

TEST_CASE("render validates its spec") {
    SECTION("shape leaving the frame") {
        SceneSpec spec = single_disk(10, 5, 0, 8); // walks off the right edge
        CHECK_THROWS_AS(render(spec), Error);
    }
    SECTION("noise amplitude cap") {
        SceneSpec spec = single_disk(10);
        spec.noise_amplitude = 0.25;
        CHECK_THROWS_AS(render(spec), Error);
    }
    SECTION("no shapes") {
        SceneSpec spec = single_disk(10);
        spec.shapes.clear();
        CHECK_THROWS_AS(render(spec), Error);
    }
}

TEST_CASE("eye_scene validates radii ordering") {
    EyeSceneParams p;
    p.iris_radius = 5;
    p.pupil_radius = 9;
    CHECK_THROWS_AS(eye_scene(p), Error);
    p.iris_radius = 14;
    p.pupil_radius = 0;
    CHECK_THROWS_AS(eye_scene(p), Error);
}

TEST_CASE("eye_scene renders a trackable iris+pupil disk") {
    EyeSceneParams p;
    const SceneSpec spec = eye_scene(p);
    const auto [images, masks] = render(spec);
    REQUIRE(images.size() == std::size_t(p.frames));
    images[0].validate();
    const double expected = M_PI * p.iris_radius * p.iris_radius;
    CHECK(static_cast<double>(region_area(masks[0])) == Catch::Approx(expected).epsilon(0.03));

    // Pupil darker than iris, iris darker than sclera, on the first frame.
    const Image gray = to_grayscale(images[0]);
    const double pupil = gray.at(static_cast<int>(p.cx), static_cast<int>(p.cy));
    const double iris =
        gray.at(static_cast<int>(p.cx + p.pupil_radius + 2), static_cast<int>(p.cy));
    const double sclera = gray.at(4, static_cast<int>(p.cy));
    CHECK(pupil < iris);
    CHECK(iris < sclera);
}

TEST_CASE("scene text round-trips through format and parse") {
    SceneSpec spec = single_disk(9, 2, 1, 4);
    spec.noise_amplitude = 0.03;
    spec.seed = 42;
    spec.shading_dir_x = 1;
    spec.shading_dir_y = 0.5;
    spec.shading_strength = 0.2;

    const SceneSpec back = parse_scene(format_scene(spec));
    const auto [img_a, mask_a] = render(spec);
    const auto [img_b, mask_b] = render(back);
    CHECK(img_a[0].data == img_b[0].data);
    CHECK(mask_a[3] == mask_b[3]);
}

TEST_CASE("parse_scene reports bad input distinctly") {
    CHECK_THROWS_WITH(parse_scene("width = \n"), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_scene("bogus = 3\n"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(parse_scene("width = 64\n"),
                      Catch::Matchers::ContainsSubstring("no shapes"));
    CHECK_THROWS_WITH(parse_scene("disk = 5 5\n"), Catch::Matchers::ContainsSubstring("disk"));
}

TEST_CASE("shading darkens along the configured direction") {
    SceneSpec spec = single_disk(6);
    spec.shading_dir_x = 1;
    spec.shading_dir_y = 0;
    spec.shading_strength = 0.3;
    const auto [images, masks] = render(spec);
    const Image& img = images[0];
    CHECK(img.at(0, 10) > img.at(63, 10));
    CHECK(img.at(0, 10) - img.at(63, 10) == Catch::Approx(0.3).margin(0.02));
}
