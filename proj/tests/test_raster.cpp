#include <doctest.h>

#include <filesystem>

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/raster.hpp"
#include "test_util.hpp"

using namespace leafscope;

namespace {

// 2x2 RGB PNG with pixels (255,0,0) (0,255,0) / (0,0,255) (255,255,0),
// bytes generated once with an external encoder.
const unsigned char kPng2x2[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x08, 0x02, 0x00, 0x00,
    0x00, 0xfd, 0xd4, 0x9a, 0x73, 0x00, 0x00, 0x00, 0x14, 0x49, 0x44, 0x41, 0x54, 0x78,
    0x9c, 0x63, 0xf8, 0xcf, 0xc0, 0xc0, 0x00, 0xc2, 0x0c, 0xff, 0xff, 0xff, 0x67, 0x00,
    0x00, 0x1e, 0xef, 0x04, 0xfc, 0xa3, 0xc8, 0xb4, 0xf7, 0x00, 0x00, 0x00, 0x00, 0x49,
    0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

RasterImage gradient_image(int w, int h) {
    RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            uint8_t* p = img.at(x, y);
            p[0] = static_cast<uint8_t>((x * 7 + y * 3) % 256);
            p[1] = static_cast<uint8_t>((x * 5 + y * 11) % 256);
            p[2] = static_cast<uint8_t>((x * 13 + y * 17) % 256);
        }
    return img;
}

}  // namespace

TEST_SUITE("raster") {

TEST_CASE("load_image decodes a known 2x2 PNG losslessly") {
    auto dir = testutil::temp_dir("raster_load");
    auto path = dir / "fixture.png";
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(kPng2x2), sizeof(kPng2x2));
    }
    RasterImage img = load_image(path.string());
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    CHECK(img.at(0, 0)[0] == 255);
    CHECK(img.at(0, 0)[1] == 0);
    CHECK(img.at(0, 0)[2] == 0);
    CHECK(img.at(1, 0)[1] == 255);
    CHECK(img.at(0, 1)[2] == 255);
    CHECK(img.at(1, 1)[0] == 255);
    CHECK(img.at(1, 1)[1] == 255);
    CHECK(img.at(1, 1)[2] == 0);
}

TEST_CASE("load_image reports missing and undecodable files with the path") {
    auto dir = testutil::temp_dir("raster_errors");
    CHECK_THROWS_WITH_AS(load_image((dir / "nope.png").string()),
                         doctest::Contains("file not found"), Error);
    auto empty = dir / "empty.png";
    testutil::write_file(empty, "");
    try {
        load_image(empty.string());
        FAIL("expected a decode error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Format);
        CHECK(std::string(e.what()).find("empty.png") != std::string::npos);
    }
}

TEST_CASE("png round-trip preserves pixels") {
    auto dir = testutil::temp_dir("raster_roundtrip");
    RasterImage img = gradient_image(33, 17);
    save_png(img, (dir / "img.png").string());
    RasterImage back = load_image((dir / "img.png").string());
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("resize_longest_edge dimensions") {
    RasterImage a(512, 256);
    RasterImage r = resize_longest_edge(a, 256);
    CHECK(r.width == 256);
    CHECK(r.height == 128);

    RasterImage b(256, 100);
    RasterImage rb = resize_longest_edge(b, 256);
    CHECK(rb.width == 256);
    CHECK(rb.height == 100);

    // 750 * 256 / 1000 = 192 exactly
    RasterImage c(1000, 750);
    RasterImage rc = resize_longest_edge(c, 256);
    CHECK(rc.width == 256);
    CHECK(rc.height == 192);
}

TEST_CASE("resize_longest_edge never upsizes and hits the target exactly") {
    for (auto [w, h] : std::vector<std::pair<int, int>>{{300, 541}, {256, 256}, {100, 40},
                                                        {999, 998}, {257, 33}}) {
        RasterImage img = gradient_image(w, h);
        RasterImage out = resize_longest_edge(img, 256);
        if (std::max(w, h) >= 256) {
            CHECK(std::max(out.width, out.height) == 256);
        } else {
            CHECK(out.width == w);
            CHECK(out.height == h);
        }
        CHECK(out.width >= 1);
        CHECK(out.height >= 1);
    }
}

TEST_CASE("resize of a constant image stays constant") {
    RasterImage img(640, 480, 77);
    RasterImage out = resize_longest_edge(img, 256);
    for (uint8_t v : out.pixels) CHECK(v == 77);
}

TEST_CASE("rgb_to_lab reference points") {
    RasterImage img(3, 1);
    uint8_t* white = img.at(0, 0);
    white[0] = white[1] = white[2] = 255;
    uint8_t* black = img.at(1, 0);
    black[0] = black[1] = black[2] = 0;
    uint8_t* gray = img.at(2, 0);
    gray[0] = gray[1] = gray[2] = 128;

    LabImage lab = rgb_to_lab(img);
    CHECK(lab.L[0] == doctest::Approx(100.0).epsilon(0.001));
    CHECK(std::abs(lab.A[0]) < 0.5);
    CHECK(std::abs(lab.B[0]) < 0.5);

    CHECK(lab.L[1] == doctest::Approx(0.0).epsilon(0.001));
    CHECK(std::abs(lab.A[1]) < 0.5);
    CHECK(std::abs(lab.B[1]) < 0.5);

    // Independent colorimetry value for sRGB (128,128,128) under D65.
    CHECK(std::abs(lab.L[2] - 53.585015771669404) < 0.1);
    CHECK(std::abs(lab.A[2]) < 0.5);
    CHECK(std::abs(lab.B[2]) < 0.5);
}

TEST_CASE("rgb_to_lab maps every gray to near-zero chroma") {
    RasterImage img(256, 1);
    for (int v = 0; v < 256; ++v) {
        uint8_t* p = img.at(v, 0);
        p[0] = p[1] = p[2] = static_cast<uint8_t>(v);
    }
    LabImage lab = rgb_to_lab(img);
    for (int v = 0; v < 256; ++v) {
        CHECK(std::abs(lab.A[v]) < 0.5);
        CHECK(std::abs(lab.B[v]) < 0.5);
    }
}

TEST_CASE("lab plane encoding is on the 8-bit scale") {
    RasterImage img(2, 1);
    uint8_t* w = img.at(0, 0);
    w[0] = w[1] = w[2] = 255;
    uint8_t* k = img.at(1, 0);
    k[0] = k[1] = k[2] = 0;
    LabImage lab = rgb_to_lab(img);
    RealImage l = lab_plane_encoded(lab, LabPlane::L);
    RealImage a = lab_plane_encoded(lab, LabPlane::A);
    CHECK(l.values[0] == doctest::Approx(255.0).epsilon(1e-4));
    CHECK(l.values[1] == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(a.values[0] == doctest::Approx(128.0).epsilon(0.01));
}

TEST_CASE("to_grayscale uses the 601 weights with rounding") {
    RasterImage img(3, 1);
    uint8_t* w = img.at(0, 0);
    w[0] = w[1] = w[2] = 255;
    uint8_t* r = img.at(1, 0);
    r[0] = 255;
    r[1] = r[2] = 0;
    uint8_t* k = img.at(2, 0);
    k[0] = k[1] = k[2] = 0;

    GrayImage g = to_grayscale(img);
    CHECK(g.values[0] == 255);
    CHECK(g.values[1] == 76);  // 0.299 * 255 = 76.245
    CHECK(g.values[2] == 0);
}

TEST_CASE("gaussian_blur keeps a constant image constant") {
    GrayImage img(40, 30, 93);
    GrayImage out = gaussian_blur(img, 1.0);
    CHECK(out.values == img.values);
}

TEST_CASE("gaussian_blur of a single bright pixel is symmetric and mass-preserving") {
    GrayImage img(21, 21, 0);
    img.at(10, 10) = 255;
    GrayImage out = gaussian_blur(img, 1.0);

    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x) {
            CHECK(out.at(x, y) == out.at(20 - x, y));
            CHECK(out.at(x, y) == out.at(x, 20 - y));
            CHECK(out.at(x, y) == out.at(y, x));
        }

    long in_sum = 255;
    long out_sum = 0;
    for (uint8_t v : out.values) out_sum += v;
    // Kernel is normalized; rounding each pixel loses a little mass.
    CHECK(std::abs(out_sum - in_sum) <= 0.01 * in_sum + 8);
}

TEST_CASE("gaussian_blur matches the direct 2-D convolution oracle") {
    GrayImage img(32, 24, 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) img.at(x, y) = x < 16 ? 30 : 220;

    GrayImage fast = gaussian_blur(img, 1.0);
    GrayImage slow = testutil::gaussian_blur_2d_oracle(img, 1.0);
    for (size_t i = 0; i < fast.values.size(); ++i)
        CHECK(std::abs(static_cast<int>(fast.values[i]) - static_cast<int>(slow.values[i])) <= 1);

    // Monotone transition across the step
    for (int x = 1; x < img.width; ++x) CHECK(fast.at(x, 12) >= fast.at(x - 1, 12));
}

TEST_CASE("rotate_quarter composition is the identity") {
    RasterImage img = gradient_image(7, 5);
    RasterImage r1 = rotate_quarter(img, 1);
    RasterImage back = rotate_quarter(r1, 3);
    CHECK(back.pixels == img.pixels);
    CHECK(back.width == img.width);

    RasterImage r2 = rotate_quarter(rotate_quarter(img, 2), 2);
    CHECK(r2.pixels == img.pixels);
}

TEST_CASE("rotate_quarter dimensions and mapping") {
    RasterImage img = gradient_image(2, 3);
    RasterImage r = rotate_quarter(img, 1);
    CHECK(r.width == 3);
    CHECK(r.height == 2);

    RasterImage half = gradient_image(4, 3);
    RasterImage r180 = rotate_quarter(half, 2);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(r180.at(3 - x, 2 - y)[c] == half.at(x, y)[c]);
}

TEST_CASE("rotate_quarter rejects bad turn counts") {
    RasterImage img = gradient_image(2, 2);
    CHECK_THROWS_AS(rotate_quarter(img, 0), Error);
    CHECK_THROWS_AS(rotate_quarter(img, 4), Error);
}

}  // TEST_SUITE
