#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "raster.hpp"

namespace leafscope::geom {

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

// Closed pixel contour; the last point connects back to the first. Traced
// contours are stored with positive signed area (shoelace, y growing down).
struct Contour {
    std::vector<Point> points;
};

struct EllipseAxes {
    double semi_major = 0.0;
    double semi_minor = 0.0;
};

struct ConvexityDefect {
    size_t start_index = 0;     // contour index of the hull edge start
    size_t end_index = 0;       // contour index of the hull edge end
    size_t farthest_index = 0;  // deepest contour point on the arc
    double depth = 0.0;         // pixels
};

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    bool operator==(const Rect&) const = default;
};

// Outer border of every 8-connected true region, Moore-neighbor tracing.
// Regions too small to form a closed border (under 3 boundary pixels) are
// dropped. Errors when the mask has no contour at all.
std::vector<Contour> trace_contours(const BinaryMask& mask);

double signed_area(const Contour& c);
double contour_area(const Contour& c);       // |shoelace|
double contour_perimeter(const Contour& c);  // includes the closing segment

// Convex hull of the contour points, counterclockwise (positive area).
Contour convex_hull(const Contour& c);

// One defect per hull edge whose contour arc sags by at least one pixel;
// depth is the maximum perpendicular distance from the arc to the edge.
std::vector<ConvexityDefect> convexity_defects(const Contour& c, const Contour& hull);

// Semi-axes from the second central moments of the filled contour region:
// 2*sqrt of the covariance eigenvalues of the interior pixels.
EllipseAxes fit_ellipse_axes(const Contour& c);

// Minimal axis-aligned rectangle containing every contour point,
// inclusive-pixel widths.
Rect bounding_rect(const Contour& c);

// First four Hu invariants of a non-negative mass image.
std::array<double, 4> hu_moments4(const RealImage& img);

// Harris corner response from Sobel gradients with a sigma=1 Gaussian
// window; counts 3x3 local maxima above rel_threshold * max response.
int harris_corner_count(const GrayImage& img, double k = 0.04, double rel_threshold = 0.01);

// Normalized centroid-to-contour distances sampled at n equal arc-length
// steps, starting from the contour point closest to the 0-degree direction.
// The maximum element is exactly 1.
std::vector<double> centroid_radii(const Contour& c, int n = 36);

// Pixels covered by the contour polygon (even-odd fill plus the contour
// pixels themselves).
std::vector<Point> contour_interior(const Contour& c);

}  // namespace leafscope::geom
