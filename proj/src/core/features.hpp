#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "raster.hpp"

namespace leafscope::feat {

struct FeatureConfig {
    int glcm_levels = 32;
    double harris_k = 0.04;
    double harris_rel_threshold = 0.01;
};

// Horizontal co-occurrence probabilities (displacement 1, 0 degrees) of the
// gray image quantized to `levels` bins, counted over mask-true pixel pairs.
struct GlcmMatrix {
    int levels = 0;
    std::vector<double> cells;  // levels x levels, row-major, sums to 1

    double at(int i, int j) const { return cells[static_cast<size_t>(i) * levels + j]; }
};

GlcmMatrix build_glcm(const GrayImage& img, const BinaryMask& mask, int levels = 32);

struct GlcmStats {
    double correlation = 0.0;  // 0 when either marginal is constant
    double contrast = 0.0;
    double entropy = 0.0;  // base-2
    double energy = 0.0;
};

GlcmStats glcm_stats(const GlcmMatrix& g);

// Mean and population standard deviation of the [0,1]-scaled gray values
// under the mask.
struct IntensityStats {
    double mean = 0.0;
    double std_dev = 0.0;
};

IntensityStats intensity_stats(const GrayImage& img, const BinaryMask& mask);
IntensityStats intensity_stats(std::span<const double> values);  // values already in [0,1]

// The 56 hand-crafted dimensions, in fixed order:
//   [0]     ovality               semi-major / semi-minor
//   [1]     area_per_length       contour area / perimeter
//   [2..5]  convexity             four largest defect depths / equi-diameter
//   [6]     solidity              area / hull area
//   [7]     equi_diameter         sqrt(4*area/pi)
//   [8]     extent                area / bounding-rect area
//   [9]     correlation           \
//   [10]    contrast               | GLCM statistics
//   [11]    entropy                |
//   [12]    energy                /
//   [13]    std_dev               masked intensity
//   [14]    mean                  masked intensity
//   [15]    corner_count          Harris corners
//   [16..19] hu                   first four Hu invariants
//   [20..55] centroid_radii       36 normalized contour distances
inline constexpr int kHcfDim = 56;

using Hcf56 = std::array<double, kHcfDim>;

Hcf56 extract_hcf(const BinaryMask& mask, const GrayImage& gray,
                  const FeatureConfig& cfg = FeatureConfig{});

// Feature groups:
//   A = centroid_radii (36), B = convexity + hu (8),
//   C = ovality, area_per_length, solidity, equi_diameter, extent,
//       corner_count (6),
//   D = correlation, contrast, entropy, energy, std_dev, mean (6).
// Groups are given as a subset of "ABCD".
int group_dimension(const std::string& groups);
std::vector<int> group_indices(const std::string& groups);
std::vector<double> group_subset(const Hcf56& f, const std::string& groups);

}  // namespace leafscope::feat
