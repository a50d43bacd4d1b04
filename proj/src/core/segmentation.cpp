#include "segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace leafscope::seg {

PlaneChoice select_plane(const LabImage& lab, const SegmentationConfig& cfg) {
    RealImage a = lab_plane_encoded(lab, LabPlane::A);
    double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / a.values.size();
    return mean > cfg.a_threshold ? PlaneChoice::AB : PlaneChoice::LA;
}

namespace {

inline double sqdist(const std::array<double, 2>& p, const std::array<double, 2>& q) {
    double dx = p[0] - q[0], dy = p[1] - q[1];
    return dx * dx + dy * dy;
}

}  // namespace

KmeansResult kmeans2(const std::vector<std::array<double, 2>>& points, int iterations,
                     uint64_t /*seed*/) {
    if (iterations < 1) raise(ErrorCode::InvalidArgument, "kmeans iterations must be >= 1");
    if (points.size() < 2) raise(ErrorCode::Degenerate, "degenerate input, clustering impossible");

    bool all_equal = std::all_of(points.begin(), points.end(),
                                 [&](const auto& p) { return p == points.front(); });
    if (all_equal) raise(ErrorCode::Degenerate, "degenerate input, clustering impossible");

    // Percentile seeding along the first coordinate keeps the init
    // deterministic; the rng seed is reserved for a randomized mode.
    std::vector<size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return points[a] < points[b];
    });
    size_t n = points.size();
    size_t lo = static_cast<size_t>(std::lround(0.05 * (n - 1)));
    size_t hi = static_cast<size_t>(std::lround(0.95 * (n - 1)));
    std::array<std::array<double, 2>, 2> centroids = {points[order[lo]], points[order[hi]]};
    if (centroids[0] == centroids[1]) {
        centroids = {points[order.front()], points[order.back()]};
    }

    KmeansResult result;
    result.labels.assign(n, 0);
    for (int round = 0; round < iterations; ++round) {
        double objective = 0.0;
        std::array<double, 3> sum0 = {0, 0, 0}, sum1 = {0, 0, 0};  // x, y, count
        for (size_t i = 0; i < n; ++i) {
            double d0 = sqdist(points[i], centroids[0]);
            double d1 = sqdist(points[i], centroids[1]);
            int label = d1 < d0 ? 1 : 0;
            result.labels[i] = static_cast<uint8_t>(label);
            objective += label ? d1 : d0;
            auto& s = label ? sum1 : sum0;
            s[0] += points[i][0];
            s[1] += points[i][1];
            s[2] += 1.0;
        }
        result.objective_per_round.push_back(objective);
        if (sum0[2] > 0) centroids[0] = {sum0[0] / sum0[2], sum0[1] / sum0[2]};
        if (sum1[2] > 0) centroids[1] = {sum1[0] / sum1[2], sum1[1] / sum1[2]};
    }
    // Labels reflect the final centroids.
    for (size_t i = 0; i < n; ++i) {
        result.labels[i] =
            sqdist(points[i], centroids[1]) < sqdist(points[i], centroids[0]) ? 1 : 0;
    }
    result.centroids = centroids;
    return result;
}

int pick_leaf_cluster(const std::vector<uint8_t>& labels, int width, int height) {
    size_t border_total = 0;
    std::array<size_t, 2> border_count = {0, 0};
    std::array<size_t, 2> area = {0, 0};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int label = labels[static_cast<size_t>(y) * width + x];
            ++area[label];
            if (x == 0 || y == 0 || x == width - 1 || y == height - 1) {
                ++border_total;
                ++border_count[label];
            }
        }
    }
    if (border_total == 0) return area[0] <= area[1] ? 0 : 1;
    double frac0 = static_cast<double>(border_count[0]) / border_total;
    double frac1 = static_cast<double>(border_count[1]) / border_total;
    if (frac0 == frac1) return area[0] <= area[1] ? 0 : 1;
    return frac0 < frac1 ? 0 : 1;
}

int otsu_threshold(const GrayImage& img) {
    std::array<int64_t, 256> hist = {};
    for (uint8_t v : img.values) ++hist[v];

    int distinct = 0;
    for (int64_t c : hist)
        if (c > 0) ++distinct;
    if (distinct < 2) raise(ErrorCode::Degenerate, "no threshold exists for constant image");

    int64_t total = static_cast<int64_t>(img.values.size());
    int64_t total_sum = 0;
    for (int v = 0; v < 256; ++v) total_sum += static_cast<int64_t>(v) * hist[v];

    int best_t = 0;
    double best_var = -1.0;
    int64_t cnt0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        cnt0 += hist[t];
        sum0 += static_cast<int64_t>(t) * hist[t];
        int64_t cnt1 = total - cnt0;
        if (cnt0 == 0 || cnt1 == 0) continue;
        double mu0 = static_cast<double>(sum0) / cnt0;
        double mu1 = static_cast<double>(total_sum - sum0) / cnt1;
        double diff = mu0 - mu1;
        double var = static_cast<double>(cnt0) * static_cast<double>(cnt1) * diff * diff;
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask binarize_inverse(const GrayImage& img, int t) {
    if (t < 0 || t > 255) raise(ErrorCode::InvalidArgument, "threshold out of [0,255]");
    BinaryMask mask(img.width, img.height);
    for (size_t i = 0; i < img.values.size(); ++i) mask.bits[i] = img.values[i] <= t ? 1 : 0;
    return mask;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    int w = mask.width, h = mask.height;
    std::vector<uint8_t> outside(static_cast<size_t>(w) * h, 0);
    std::vector<int> stack;
    auto push = [&](int x, int y) {
        size_t i = static_cast<size_t>(y) * w + x;
        if (!outside[i] && !mask.bits[i]) {
            outside[i] = 1;
            stack.push_back(y * w + x);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        int p = stack.back();
        stack.pop_back();
        int x = p % w, y = p / w;
        if (x > 0) push(x - 1, y);
        if (x < w - 1) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y < h - 1) push(x, y + 1);
    }
    BinaryMask out = mask;
    for (size_t i = 0; i < out.bits.size(); ++i)
        if (!out.bits[i] && !outside[i]) out.bits[i] = 1;
    return out;
}

static std::vector<std::pair<int, int>> disk_offsets(int kernel_diameter) {
    if (kernel_diameter < 1 || kernel_diameter % 2 == 0)
        raise(ErrorCode::InvalidArgument, "kernel diameter must be odd and positive");
    int r = kernel_diameter / 2;
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) offsets.emplace_back(dx, dy);
    return offsets;
}

BinaryMask morphological_open(const BinaryMask& mask, int kernel_diameter) {
    auto offsets = disk_offsets(kernel_diameter);
    int w = mask.width, h = mask.height;

    // Erosion; out-of-bounds counts as background.
    BinaryMask eroded(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool all = true;
            for (auto [dx, dy] : offsets) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            eroded.set(x, y, all);
        }
    }
    // Dilation.
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!eroded.at(x, y)) continue;
            for (auto [dx, dy] : offsets) {
                int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < w && ny < h) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

SegmentationReport judge_segmentation(const BinaryMask& mask, const SegmentationConfig& cfg) {
    SegmentationReport report;
    size_t total = mask.bits.size();
    size_t leaf = mask.count_true();
    report.leaf_area_fraction = total ? static_cast<double>(leaf) / total : 0.0;

    size_t border_total = 0, border_leaf = 0;
    int w = mask.width, h = mask.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
                ++border_total;
                if (mask.at(x, y)) ++border_leaf;
            }
        }
    }
    report.border_leaf_fraction =
        border_total ? static_cast<double>(border_leaf) / border_total : 0.0;

    if (report.leaf_area_fraction < cfg.wiped_out_below) {
        report.verdict = Verdict::WipedOut;
    } else if (report.leaf_area_fraction > cfg.residue_area_above ||
               report.border_leaf_fraction > cfg.residue_border_above) {
        report.verdict = Verdict::BackgroundResidue;
    } else {
        report.verdict = Verdict::Ok;
    }
    return report;
}

RasterImage apply_mask(const RasterImage& img, const BinaryMask& mask) {
    if (img.width != mask.width || img.height != mask.height)
        raise(ErrorCode::Dimension, "mask and image dimensions differ");
    RasterImage out = img;
    for (size_t i = 0; i < mask.bits.size(); ++i) {
        if (!mask.bits[i]) {
            out.pixels[i * 3 + 0] = 255;
            out.pixels[i * 3 + 1] = 255;
            out.pixels[i * 3 + 2] = 255;
        }
    }
    return out;
}

SegmentationResult segment_leaf(const RasterImage& img, const SegmentationConfig& cfg) {
    RasterImage resized = resize_longest_edge(img, cfg.resize_target);
    SegmentationResult result;

    try {
        LabImage lab = rgb_to_lab(resized);
        PlaneChoice plane = select_plane(lab, cfg);
        RealImage p0 = lab_plane_encoded(lab, plane == PlaneChoice::AB ? LabPlane::A : LabPlane::L);
        RealImage p1 = lab_plane_encoded(lab, plane == PlaneChoice::AB ? LabPlane::B : LabPlane::A);

        std::vector<std::array<double, 2>> points(p0.values.size());
        for (size_t i = 0; i < points.size(); ++i) points[i] = {p0.values[i], p1.values[i]};
        KmeansResult km = kmeans2(points, cfg.kmeans_iterations, cfg.rng_seed);
        int leaf_cluster = pick_leaf_cluster(km.labels, resized.width, resized.height);

        GrayImage gray = gaussian_blur(to_grayscale(resized), cfg.blur_sigma);
        BinaryMask otsu_mask = binarize_inverse(gray, otsu_threshold(gray));

        BinaryMask mask(resized.width, resized.height);
        for (size_t i = 0; i < mask.bits.size(); ++i)
            mask.bits[i] = (otsu_mask.bits[i] && km.labels[i] == leaf_cluster) ? 1 : 0;
        result.mask = fill_holes(mask);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Degenerate) throw;
        // Constant input: nothing to segment.
        result.mask = BinaryMask(resized.width, resized.height, false);
    }

    result.masked = apply_mask(resized, result.mask);
    result.report = judge_segmentation(result.mask, cfg);
    return result;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Ok: return "ok";
        case Verdict::WipedOut: return "wiped_out";
        case Verdict::BackgroundResidue: return "background_residue";
    }
    return "?";
}

}  // namespace leafscope::seg
