#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace leafscope {

// 8-bit RGB image, row-major, channels interleaved.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // width*height*3

    RasterImage() = default;
    RasterImage(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, fill) {}

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    uint8_t* at(int x, int y) { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
    const uint8_t* at(int x, int y) const {
        return &pixels[(static_cast<size_t>(y) * width + x) * 3];
    }
};

// Single-channel 8-bit image.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> values;  // width*height

    GrayImage() = default;
    GrayImage(int w, int h, uint8_t fill = 0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

// Double-valued single-channel image, used for moment and response maps.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

// CIE L*a*b* planes. L in [0,100], a and b roughly in [-128,127].
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> L;
    std::vector<double> A;
    std::vector<double> B;

    LabImage() = default;
    LabImage(int w, int h)
        : width(w),
          height(h),
          L(static_cast<size_t>(w) * h, 0.0),
          A(static_cast<size_t>(w) * h, 0.0),
          B(static_cast<size_t>(w) * h, 0.0) {}
};

// Binary leaf mask, true = leaf.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count_true() const;

    bool operator==(const BinaryMask& other) const = default;
};

// Scales so the longer edge becomes `target`; images already at or below
// the target are returned unchanged. Bilinear, half-pixel centers.
RasterImage resize_longest_edge(const RasterImage& img, int target = 256);

// sRGB (D65) to CIE L*a*b*.
LabImage rgb_to_lab(const RasterImage& img);

// Maps Lab planes onto a common [0,255] scale: L*255/100, a+128, b+128,
// clamped. Values stay fractional; only the scale is 8-bit.
enum class LabPlane { L, A, B };
RealImage lab_plane_encoded(const LabImage& lab, LabPlane plane);

// Rec. 601 luma, rounded to nearest integer.
GrayImage to_grayscale(const RasterImage& img);

// Separable Gaussian, kernel radius ceil(3*sigma), replicated edges.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Lossless rotation by turns*90 degrees, turns in {1,2,3}.
RasterImage rotate_quarter(const RasterImage& img, int turns);
GrayImage rotate_quarter(const GrayImage& img, int turns);
BinaryMask rotate_quarter(const BinaryMask& mask, int turns);

}  // namespace leafscope
