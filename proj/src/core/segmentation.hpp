#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "raster.hpp"

namespace leafscope::seg {

struct SegmentationConfig {
    double a_threshold = 128.0;  // on the [0,255] encoded A plane
    int kmeans_iterations = 3;
    double blur_sigma = 1.0;
    int opening_kernel = 9;  // odd; elliptical (disk) structuring element
    int resize_target = 256;
    uint64_t rng_seed = 0;  // reserved for an optional randomized k-means init
    double wiped_out_below = 0.01;
    double residue_area_above = 0.90;
    double residue_border_above = 0.30;
};

enum class Verdict { Ok, WipedOut, BackgroundResidue };

struct SegmentationReport {
    double leaf_area_fraction = 0.0;
    double border_leaf_fraction = 0.0;
    Verdict verdict = Verdict::WipedOut;
};

enum class PlaneChoice { AB, LA };

// AB when the mean of the encoded A plane exceeds the threshold, LA otherwise.
PlaneChoice select_plane(const LabImage& lab, const SegmentationConfig& cfg);

struct KmeansResult {
    std::vector<uint8_t> labels;                  // 0 or 1 per point
    std::array<std::array<double, 2>, 2> centroids;
    std::vector<double> objective_per_round;      // sum of squared distances after each assignment
};

// Two-cluster Lloyd's algorithm on 2-D points, a fixed number of
// assign/update rounds, centroids seeded at the 5th/95th percentile of the
// first coordinate. Deterministic.
KmeansResult kmeans2(const std::vector<std::array<double, 2>>& points, int iterations,
                     uint64_t seed);

// The cluster with the smaller share of the image border; ties go to the
// smaller cluster.
int pick_leaf_cluster(const std::vector<uint8_t>& labels, int width, int height);

// Between-class-variance maximizer over the 256-bin histogram; lowest
// maximizing threshold on ties. Errors on constant images.
int otsu_threshold(const GrayImage& img);

// True where value <= t.
BinaryMask binarize_inverse(const GrayImage& img, int t);

// Fills every false region not 4-connected to the image border.
BinaryMask fill_holes(const BinaryMask& mask);

// Morphological opening (erosion then dilation) with a centered disk of the
// given odd diameter. Removes the stem and other thin protrusions.
BinaryMask morphological_open(const BinaryMask& mask, int kernel_diameter);

SegmentationReport judge_segmentation(const BinaryMask& mask, const SegmentationConfig& cfg);

struct SegmentationResult {
    BinaryMask mask;
    RasterImage masked;  // original over white background
    SegmentationReport report;
};

// Full background-elimination pipeline: resize, Lab, plane selection,
// k-means, grayscale+blur, Otsu inverse binarization intersected with the
// leaf cluster, hole filling. Degenerate inputs come back as WipedOut
// rather than an error.
SegmentationResult segment_leaf(const RasterImage& img, const SegmentationConfig& cfg);

// Applies the masked-out white background to an image.
RasterImage apply_mask(const RasterImage& img, const BinaryMask& mask);

const char* verdict_name(Verdict v);

}  // namespace leafscope::seg
