#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/segmentation.hpp"
#include "test_util.hpp"

using namespace leafscope;
using namespace leafscope::seg;

namespace {

RasterImage solid_color(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    RasterImage img(w, h);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        img.pixels[i * 3 + 0] = r;
        img.pixels[i * 3 + 1] = g;
        img.pixels[i * 3 + 2] = b;
    }
    return img;
}

// Dark green disk on the given background painter.
template <typename BgFn>
RasterImage disk_image(int size, double radius, BgFn bg) {
    RasterImage img(size, size);
    double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            uint8_t* p = img.at(x, y);
            double dx = x - c, dy = y - c;
            if (dx * dx + dy * dy <= radius * radius) {
                p[0] = 52;
                p[1] = 108;
                p[2] = 44;
            } else {
                bg(x, y, p);
            }
        }
    return img;
}

// k-means objective of a fixed binary partition.
double partition_objective(const std::vector<std::array<double, 2>>& pts, unsigned assignment) {
    std::array<double, 2> c0 = {0, 0}, c1 = {0, 0};
    int n0 = 0, n1 = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (assignment >> i & 1) {
            c1[0] += pts[i][0];
            c1[1] += pts[i][1];
            ++n1;
        } else {
            c0[0] += pts[i][0];
            c0[1] += pts[i][1];
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) return 1e300;
    c0 = {c0[0] / n0, c0[1] / n0};
    c1 = {c1[0] / n1, c1[1] / n1};
    double obj = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& c = (assignment >> i & 1) ? c1 : c0;
        double dx = pts[i][0] - c[0], dy = pts[i][1] - c[1];
        obj += dx * dx + dy * dy;
    }
    return obj;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("select_plane thresholds the encoded A mean") {
    SegmentationConfig cfg;
    cfg.a_threshold = 128.0;

    RasterImage gray = solid_color(8, 8, 120, 120, 120);
    CHECK(select_plane(rgb_to_lab(gray), cfg) == PlaneChoice::LA);

    RasterImage red = solid_color(8, 8, 230, 30, 30);
    CHECK(select_plane(rgb_to_lab(red), cfg) == PlaneChoice::AB);

    // Mean exactly at the threshold goes to LA (strict inequality).
    LabImage lab(4, 4);
    for (auto& a : lab.A) a = 0.0;  // encodes to exactly 128
    CHECK(select_plane(lab, cfg) == PlaneChoice::LA);
}

TEST_CASE("kmeans2 separates two tight blobs exactly") {
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({10.0 + 0.1 * i, 5.0});
    for (int i = 0; i < 20; ++i) pts.push_back({200.0 + 0.1 * i, 7.0});
    auto result = kmeans2(pts, 3, 0);
    for (int i = 0; i < 20; ++i) CHECK(result.labels[i] == result.labels[0]);
    for (int i = 20; i < 40; ++i) CHECK(result.labels[i] == result.labels[20]);
    CHECK(result.labels[0] != result.labels[20]);

    int blob0 = result.labels[0];
    CHECK(result.centroids[blob0][0] >= 10.0);
    CHECK(result.centroids[blob0][0] <= 12.0);
}

TEST_CASE("kmeans2 matches the brute-force partition on a thin rectangle") {
    std::vector<std::array<double, 2>> pts = {{0, 0}, {10, 0}, {0, 1}, {10, 1}};
    auto result = kmeans2(pts, 3, 0);

    unsigned best = 0;
    double best_obj = 1e301;
    for (unsigned assignment = 1; assignment < 15; ++assignment) {
        double obj = partition_objective(pts, assignment);
        if (obj < best_obj) {
            best_obj = obj;
            best = assignment;
        }
    }
    unsigned got = 0;
    for (size_t i = 0; i < pts.size(); ++i) got |= static_cast<unsigned>(result.labels[i]) << i;
    bool same = got == best || got == (~best & 0xFu);
    CHECK(same);
    // Long axis split: {0,2} vs {1,3}
    CHECK(result.labels[0] == result.labels[2]);
    CHECK(result.labels[1] == result.labels[3]);
    CHECK(result.labels[0] != result.labels[1]);
}

TEST_CASE("kmeans2 rejects identical points") {
    std::vector<std::array<double, 2>> pts(10, {3.0, 4.0});
    CHECK_THROWS_WITH_AS(kmeans2(pts, 3, 0), doctest::Contains("degenerate"), Error);
}

TEST_CASE("kmeans2 objective is non-increasing across rounds") {
    std::vector<std::array<double, 2>> pts;
    uint64_t state = 42;
    auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 40) / (1 << 24);
    };
    for (int i = 0; i < 300; ++i) pts.push_back({next() * 255, next() * 255});
    auto result = kmeans2(pts, 8, 0);
    for (size_t i = 1; i < result.objective_per_round.size(); ++i)
        CHECK(result.objective_per_round[i] <= result.objective_per_round[i - 1] + 1e-9);
}

TEST_CASE("pick_leaf_cluster prefers the cluster away from the border") {
    int w = 20, h = 20;
    std::vector<uint8_t> labels(static_cast<size_t>(w) * h, 0);
    // Centered disk of cluster 1
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 15; ++x) labels[static_cast<size_t>(y) * w + x] = 1;
    CHECK(pick_leaf_cluster(labels, w, h) == 1);

    // Leaf occupying one corner: still fewer border pixels than background
    std::fill(labels.begin(), labels.end(), 0);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) labels[static_cast<size_t>(y) * w + x] = 1;
    CHECK(pick_leaf_cluster(labels, w, h) == 1);
}

TEST_CASE("pick_leaf_cluster breaks border ties toward the smaller cluster") {
    // Left half cluster 0, right half cluster 1 on a width-4 image: each
    // holds half the border.
    int w = 4, h = 6;
    std::vector<uint8_t> labels(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 2; x < w; ++x) labels[static_cast<size_t>(y) * w + x] = 1;
    CHECK(pick_leaf_cluster(labels, w, h) == 0);  // equal areas: lower id

    // Shrink cluster 1's area without touching its border share.
    labels[static_cast<size_t>(2) * w + 2] = 0;
    CHECK(pick_leaf_cluster(labels, w, h) == 1);
}

TEST_CASE("otsu_threshold equals the exhaustive oracle on a two-level image") {
    GrayImage img(20, 10);
    for (size_t i = 0; i < img.values.size(); ++i) img.values[i] = i % 2 ? 50 : 200;
    int t = otsu_threshold(img);
    CHECK(t == testutil::otsu_oracle(testutil::histogram_of(img)));
    CHECK(t >= 50);
    CHECK(t < 200);
    CHECK(t == 50);  // lowest maximizing threshold
}

TEST_CASE("otsu_threshold equals the oracle on bimodal mixtures") {
    uint64_t state = 7;
    auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 40) / (1 << 24);
    };
    for (int trial = 0; trial < 25; ++trial) {
        GrayImage img(64, 32);
        for (auto& v : img.values) {
            double u = next();
            double mean = u < 0.45 ? 60 + 30 * next() : 170 + 40 * next();
            v = static_cast<uint8_t>(std::clamp(mean, 0.0, 255.0));
        }
        CHECK(otsu_threshold(img) == testutil::otsu_oracle(testutil::histogram_of(img)));
    }
}

TEST_CASE("otsu_threshold rejects constant images") {
    GrayImage img(8, 8, 100);
    CHECK_THROWS_WITH_AS(otsu_threshold(img), doctest::Contains("no threshold"), Error);
}

TEST_CASE("binarize_inverse boundary behavior") {
    GrayImage zeros(4, 4, 0);
    CHECK(binarize_inverse(zeros, 10).count_true() == 16);

    GrayImage bright(4, 4, 255);
    CHECK(binarize_inverse(bright, 10).count_true() == 0);

    GrayImage att(4, 4, 10);
    CHECK(binarize_inverse(att, 10).count_true() == 16);  // value == t is leaf
}

TEST_CASE("fill_holes fills a ring into a disk") {
    auto ring = testutil::disk_mask(40, 20, 20, 15);
    auto inner = testutil::disk_mask(40, 20, 20, 8);
    for (size_t i = 0; i < ring.bits.size(); ++i)
        if (inner.bits[i]) ring.bits[i] = 0;

    auto filled = fill_holes(ring);
    CHECK(filled == testutil::disk_mask(40, 20, 20, 15));
}

TEST_CASE("fill_holes leaves hole-free and border-open shapes alone") {
    auto disk = testutil::disk_mask(30, 15, 15, 10);
    CHECK(fill_holes(disk) == disk);

    // C-shape: cavity connected to the border stays open.
    BinaryMask c(20, 20);
    for (int y = 2; y < 18; ++y)
        for (int x = 2; x < 18; ++x) c.set(x, y, true);
    for (int y = 0; y < 12; ++y)
        for (int x = 7; x < 13; ++x) c.set(x, y, false);
    CHECK(fill_holes(c) == testutil::fill_holes_oracle(c));
    CHECK(fill_holes(c) == c);
}

TEST_CASE("fill_holes is monotone and idempotent") {
    uint64_t state = 99;
    auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 33;
    };
    for (int trial = 0; trial < 10; ++trial) {
        BinaryMask m(25, 25);
        for (auto& b : m.bits) b = next() % 3 == 0;
        BinaryMask once = fill_holes(m);
        for (size_t i = 0; i < m.bits.size(); ++i)
            if (m.bits[i]) CHECK(once.bits[i]);
        CHECK(fill_holes(once) == once);
        CHECK(once == testutil::fill_holes_oracle(m));
    }
}

TEST_CASE("morphological opening removes the tail of a square-with-tail fixture") {
    BinaryMask m = testutil::rect_mask(80, 60, 10, 10, 40, 40);
    // 3-pixel-wide, 20-pixel-long tail
    for (int y = 28; y < 31; ++y)
        for (int x = 50; x < 70; ++x) m.set(x, y, true);

    BinaryMask opened = morphological_open(m, 9);
    CHECK(opened == testutil::opening_oracle(m, 9));

    // Tail gone
    for (int y = 28; y < 31; ++y)
        for (int x = 55; x < 70; ++x) CHECK(!opened.at(x, y));
    // Square body survives away from its boundary
    for (int y = 15; y < 45; ++y)
        for (int x = 15; x < 45; ++x) CHECK(opened.at(x, y));
}

TEST_CASE("morphological opening is anti-extensive and idempotent") {
    auto disk = testutil::disk_mask(50, 25, 25, 15);
    BinaryMask once = morphological_open(disk, 9);
    for (size_t i = 0; i < disk.bits.size(); ++i)
        if (once.bits[i]) CHECK(disk.bits[i]);
    CHECK(morphological_open(once, 9) == once);

    BinaryMask empty(20, 20);
    CHECK(morphological_open(empty, 9).count_true() == 0);
}

TEST_CASE("segment_leaf recovers a dark disk on white background") {
    SegmentationConfig cfg;
    auto img = disk_image(200, 60.0, [](int, int, uint8_t* p) { p[0] = p[1] = p[2] = 250; });
    auto result = segment_leaf(img, cfg);
    CHECK(result.report.verdict == Verdict::Ok);
    CHECK(testutil::mask_iou(result.mask, testutil::disk_mask(200, 100, 100, 60.0)) >= 0.95);
}

TEST_CASE("segment_leaf on a gradient background") {
    SegmentationConfig cfg;
    auto img = disk_image(200, 55.0, [](int x, int y, uint8_t* p) {
        uint8_t v = static_cast<uint8_t>(205 + (x + y) * 50 / 400);
        p[0] = p[1] = p[2] = v;
    });
    auto result = segment_leaf(img, cfg);
    CHECK(result.report.verdict == Verdict::Ok);
    CHECK(testutil::mask_iou(result.mask, testutil::disk_mask(200, 100, 100, 55.0)) >= 0.90);
}

TEST_CASE("segment_leaf maps degenerate input to a wiped_out verdict") {
    SegmentationConfig cfg;
    auto white = solid_color(64, 64, 255, 255, 255);
    auto result = segment_leaf(white, cfg);
    CHECK(result.report.verdict == Verdict::WipedOut);
    CHECK(result.mask.count_true() == 0);
}

TEST_CASE("segment_leaf is deterministic and masks with white") {
    SegmentationConfig cfg;
    auto img = disk_image(150, 40.0, [](int x, int y, uint8_t* p) {
        p[0] = p[1] = p[2] = static_cast<uint8_t>(240 + (x * 31 + y * 17) % 14);
    });
    auto a = segment_leaf(img, cfg);
    auto b = segment_leaf(img, cfg);
    CHECK(a.mask == b.mask);
    CHECK(a.masked.pixels == b.masked.pixels);

    for (int y = 0; y < a.mask.height; ++y)
        for (int x = 0; x < a.mask.width; ++x) {
            const uint8_t* p = a.masked.at(x, y);
            const uint8_t* src = img.at(x, y);
            if (a.mask.at(x, y)) {
                CHECK(p[0] == src[0]);
                CHECK(p[1] == src[1]);
                CHECK(p[2] == src[2]);
            } else {
                CHECK(p[0] == 255);
                CHECK(p[1] == 255);
                CHECK(p[2] == 255);
            }
        }
}

TEST_CASE("judge_segmentation verdict rules") {
    SegmentationConfig cfg;
    BinaryMask empty(50, 50);
    CHECK(judge_segmentation(empty, cfg).verdict == Verdict::WipedOut);

    BinaryMask all(50, 50, true);
    CHECK(judge_segmentation(all, cfg).verdict == Verdict::BackgroundResidue);

    // Centered disk covering ~30% of the frame
    auto disk = testutil::disk_mask(100, 50, 50, 31);
    auto report = judge_segmentation(disk, cfg);
    CHECK(report.verdict == Verdict::Ok);
    CHECK(report.leaf_area_fraction == doctest::Approx(0.30).epsilon(0.05));
    CHECK(report.border_leaf_fraction == 0.0);
}

}  // TEST_SUITE
