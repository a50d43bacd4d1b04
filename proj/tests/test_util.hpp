#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately take the brute-force route so they stay independent of the
// production implementations they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "core/raster.hpp"

namespace testutil {

using leafscope::BinaryMask;
using leafscope::GrayImage;
using leafscope::RasterImage;
using leafscope::RealImage;

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("leafscope_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------- fixtures

inline BinaryMask disk_mask(int size, double cx, double cy, double radius) {
    BinaryMask m(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= radius * radius) m.set(x, y, true);
        }
    return m;
}

inline BinaryMask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
    BinaryMask m(w, h);
    for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x) m.set(x, y, true);
    return m;
}

inline GrayImage constant_gray(int w, int h, uint8_t v) { return GrayImage(w, h, v); }

// ------------------------------------------------------------------ oracles

// Direct (non-separable) 2-D Gaussian convolution with replicated edges.
inline GrayImage gaussian_blur_2d_oracle(const GrayImage& img, double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    int k = 2 * radius + 1;
    std::vector<double> kernel(static_cast<size_t>(k) * k);
    double sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            kernel[static_cast<size_t>(dy + radius) * k + (dx + radius)] = w;
            sum += w;
        }
    for (double& w : kernel) w /= sum;

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    int xi = std::clamp(x + dx, 0, img.width - 1);
                    int yi = std::clamp(y + dy, 0, img.height - 1);
                    acc += kernel[static_cast<size_t>(dy + radius) * k + (dx + radius)] *
                           img.at(xi, yi);
                }
            out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    return out;
}

// Exhaustive between-class-variance scan straight from the histogram,
// recomputing the class statistics from scratch at every threshold.
inline int otsu_oracle(const std::array<int64_t, 256>& hist) {
    int best_t = 0;
    double best = -1.0;
    for (int t = 0; t < 256; ++t) {
        int64_t cnt0 = 0, cnt1 = 0, sum0 = 0, sum1 = 0;
        for (int v = 0; v < 256; ++v) {
            if (v <= t) {
                cnt0 += hist[v];
                sum0 += static_cast<int64_t>(v) * hist[v];
            } else {
                cnt1 += hist[v];
                sum1 += static_cast<int64_t>(v) * hist[v];
            }
        }
        if (cnt0 == 0 || cnt1 == 0) continue;
        double mu0 = static_cast<double>(sum0) / cnt0;
        double mu1 = static_cast<double>(sum1) / cnt1;
        double diff = mu0 - mu1;
        double var = static_cast<double>(cnt0) * static_cast<double>(cnt1) * diff * diff;
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

inline std::array<int64_t, 256> histogram_of(const GrayImage& img) {
    std::array<int64_t, 256> hist = {};
    for (uint8_t v : img.values) ++hist[v];
    return hist;
}

// Opening as the union of all structuring-element placements that fit
// inside the mask; a set-theoretic route independent of erode-then-dilate.
inline BinaryMask opening_oracle(const BinaryMask& mask, int diameter) {
    int r = diameter / 2;
    std::vector<std::pair<int, int>> se;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) se.emplace_back(dx, dy);

    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool fits = true;
            for (auto [dx, dy] : se) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height ||
                    !mask.at(nx, ny)) {
                    fits = false;
                    break;
                }
            }
            if (!fits) continue;
            for (auto [dx, dy] : se) out.set(x + dx, y + dy, true);
        }
    return out;
}

// Per-pixel border-reachability check over the background, 4-connected.
inline BinaryMask fill_holes_oracle(const BinaryMask& mask) {
    int w = mask.width, h = mask.height;
    BinaryMask out = mask;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (mask.at(x, y)) continue;
            // BFS from this background pixel looking for the border.
            std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
            std::vector<std::pair<int, int>> queue = {{x, y}};
            seen[static_cast<size_t>(y) * w + x] = 1;
            bool reaches_border = false;
            while (!queue.empty() && !reaches_border) {
                auto [cx, cy] = queue.back();
                queue.pop_back();
                if (cx == 0 || cy == 0 || cx == w - 1 || cy == h - 1) {
                    reaches_border = true;
                    break;
                }
                const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int nx = cx + dx[d], ny = cy + dy[d];
                    size_t ni = static_cast<size_t>(ny) * w + nx;
                    if (!mask.at(nx, ny) && !seen[ni]) {
                        seen[ni] = 1;
                        queue.push_back({nx, ny});
                    }
                }
            }
            if (!reaches_border) out.set(x, y, true);
        }
    }
    return out;
}

inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < a.bits.size(); ++i) {
        inter += a.bits[i] && b.bits[i];
        uni += a.bits[i] || b.bits[i];
    }
    return uni ? static_cast<double>(inter) / uni : 1.0;
}

}  // namespace testutil
