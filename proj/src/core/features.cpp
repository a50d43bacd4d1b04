#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace leafscope::feat {

GlcmMatrix build_glcm(const GrayImage& img, const BinaryMask& mask, int levels) {
    if (levels < 1 || levels > 256) raise(ErrorCode::InvalidArgument, "glcm levels out of range");
    if (img.width != mask.width || img.height != mask.height)
        raise(ErrorCode::Dimension, "gray and mask dimensions differ");

    GlcmMatrix g;
    g.levels = levels;
    g.cells.assign(static_cast<size_t>(levels) * levels, 0.0);
    size_t pairs = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x + 1 < img.width; ++x) {
            if (!mask.at(x, y) || !mask.at(x + 1, y)) continue;
            int i = img.at(x, y) * levels / 256;
            int j = img.at(x + 1, y) * levels / 256;
            g.cells[static_cast<size_t>(i) * levels + j] += 1.0;
            ++pairs;
        }
    }
    if (pairs == 0) raise(ErrorCode::Degenerate, "GLCM undefined: no horizontally adjacent mask pixels");
    for (double& c : g.cells) c /= static_cast<double>(pairs);
    return g;
}

GlcmStats glcm_stats(const GlcmMatrix& g) {
    int n = g.levels;
    GlcmStats s;
    std::vector<double> pi(n, 0.0), pj(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double p = g.at(i, j);
            s.contrast += static_cast<double>(i - j) * (i - j) * p;
            s.energy += p * p;
            if (p > 0.0) s.entropy -= p * std::log2(p);
            pi[i] += p;
            pj[j] += p;
        }
    }
    double mu_i = 0.0, mu_j = 0.0;
    for (int i = 0; i < n; ++i) {
        mu_i += i * pi[i];
        mu_j += i * pj[i];
    }
    double var_i = 0.0, var_j = 0.0;
    for (int i = 0; i < n; ++i) {
        var_i += (i - mu_i) * (i - mu_i) * pi[i];
        var_j += (i - mu_j) * (i - mu_j) * pj[i];
    }
    if (var_i > 0.0 && var_j > 0.0) {
        double cov = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cov += (i - mu_i) * (j - mu_j) * g.at(i, j);
        s.correlation = cov / std::sqrt(var_i * var_j);
    }
    return s;
}

IntensityStats intensity_stats(std::span<const double> values) {
    if (values.empty()) raise(ErrorCode::Degenerate, "intensity stats over empty set");
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= values.size();
    return {mean, std::sqrt(var)};
}

IntensityStats intensity_stats(const GrayImage& img, const BinaryMask& mask) {
    if (img.width != mask.width || img.height != mask.height)
        raise(ErrorCode::Dimension, "gray and mask dimensions differ");
    std::vector<double> values;
    values.reserve(mask.count_true());
    for (size_t i = 0; i < mask.bits.size(); ++i)
        if (mask.bits[i]) values.push_back(img.values[i] / 255.0);
    if (values.empty()) raise(ErrorCode::Degenerate, "intensity stats over empty mask");
    return intensity_stats(values);
}

namespace {

template <typename Fn>
auto feature_step(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        raise(e.code(), std::string("feature ") + name + ": " + e.what());
    }
}

}  // namespace

Hcf56 extract_hcf(const BinaryMask& mask, const GrayImage& gray, const FeatureConfig& cfg) {
    if (mask.width != gray.width || mask.height != gray.height)
        raise(ErrorCode::Dimension, "gray and mask dimensions differ");

    // Shape features describe the dominant contour; texture and intensity
    // features use every mask pixel.
    auto contours = feature_step("contour", [&] { return geom::trace_contours(mask); });
    const geom::Contour* leaf = &contours[0];
    double leaf_area = geom::contour_area(*leaf);
    for (const auto& c : contours) {
        double a = geom::contour_area(c);
        if (a > leaf_area) {
            leaf_area = a;
            leaf = &c;
        }
    }
    const geom::Contour& c = *leaf;

    double area = leaf_area;
    double perimeter = geom::contour_perimeter(c);
    if (area <= 0.0 || perimeter <= 0.0)
        raise(ErrorCode::Degenerate, "feature contour: zero area or perimeter");

    auto axes = feature_step("ovality", [&] { return geom::fit_ellipse_axes(c); });
    auto hull = feature_step("solidity", [&] { return geom::convex_hull(c); });
    double hull_area = geom::contour_area(hull);
    if (hull_area <= 0.0) raise(ErrorCode::Degenerate, "feature solidity: degenerate hull");

    double equi_diameter = std::sqrt(4.0 * area / M_PI);

    auto defects = geom::convexity_defects(c, hull);
    std::vector<double> depths;
    depths.reserve(defects.size());
    for (const auto& d : defects) depths.push_back(d.depth);
    std::sort(depths.rbegin(), depths.rend());
    depths.resize(4, 0.0);

    geom::Rect rect = geom::bounding_rect(c);

    auto glcm = feature_step("glcm", [&] { return build_glcm(gray, mask, cfg.glcm_levels); });
    GlcmStats texture = glcm_stats(glcm);
    auto intensity = feature_step("intensity", [&] { return intensity_stats(gray, mask); });

    int corners = feature_step("corner_count", [&] {
        return geom::harris_corner_count(gray, cfg.harris_k, cfg.harris_rel_threshold);
    });

    // Hu moments of the min-max normalized masked grayscale; a flat leaf
    // degrades to the plain binary shape so it stays classifiable.
    uint8_t lo = 255, hi = 0;
    for (size_t i = 0; i < mask.bits.size(); ++i) {
        if (!mask.bits[i]) continue;
        lo = std::min(lo, gray.values[i]);
        hi = std::max(hi, gray.values[i]);
    }
    RealImage mass(gray.width, gray.height, 0.0);
    for (size_t i = 0; i < mask.bits.size(); ++i) {
        if (!mask.bits[i]) continue;
        mass.values[i] = hi > lo ? (gray.values[i] - lo) / static_cast<double>(hi - lo) : 1.0;
    }
    auto hu = feature_step("hu", [&] { return geom::hu_moments4(mass); });

    auto radii = feature_step("centroid_radii", [&] { return geom::centroid_radii(c, 36); });

    Hcf56 f;
    f[0] = axes.semi_major / axes.semi_minor;
    f[1] = area / perimeter;
    for (int i = 0; i < 4; ++i) f[2 + i] = depths[i] / equi_diameter;
    f[6] = area / hull_area;
    f[7] = equi_diameter;
    f[8] = area / (static_cast<double>(rect.width) * rect.height);
    f[9] = texture.correlation;
    f[10] = texture.contrast;
    f[11] = texture.entropy;
    f[12] = texture.energy;
    f[13] = intensity.std_dev;
    f[14] = intensity.mean;
    f[15] = static_cast<double>(corners);
    for (int i = 0; i < 4; ++i) f[16 + i] = hu[i];
    for (int i = 0; i < 36; ++i) f[20 + i] = radii[i];
    return f;
}

namespace {

// Index blocks per group in the canonical 56-dim layout.
const std::vector<int>& group_block(char g) {
    static const std::vector<int> a = [] {
        std::vector<int> v(36);
        std::iota(v.begin(), v.end(), 20);
        return v;
    }();
    static const std::vector<int> b = {2, 3, 4, 5, 16, 17, 18, 19};
    static const std::vector<int> c = {0, 1, 6, 7, 8, 15};
    static const std::vector<int> d = {9, 10, 11, 12, 13, 14};
    switch (g) {
        case 'A': return a;
        case 'B': return b;
        case 'C': return c;
        case 'D': return d;
    }
    raise(ErrorCode::InvalidArgument, std::string("unknown feature group '") + g + "'");
}

}  // namespace

std::vector<int> group_indices(const std::string& groups) {
    if (groups.empty()) raise(ErrorCode::InvalidArgument, "empty feature group set");
    std::vector<int> idx;
    for (char g : groups) {
        const auto& block = group_block(g);
        idx.insert(idx.end(), block.begin(), block.end());
    }
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        raise(ErrorCode::InvalidArgument, "duplicate feature group in '" + groups + "'");
    return idx;
}

int group_dimension(const std::string& groups) {
    return static_cast<int>(group_indices(groups).size());
}

std::vector<double> group_subset(const Hcf56& f, const std::string& groups) {
    std::vector<int> idx = group_indices(groups);
    std::vector<double> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(f[i]);
    return out;
}

}  // namespace leafscope::feat
