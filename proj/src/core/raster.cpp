#include "raster.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace leafscope {

size_t BinaryMask::count_true() const {
    size_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

RasterImage resize_longest_edge(const RasterImage& img, int target) {
    if (target < 1) raise(ErrorCode::InvalidArgument, "resize target must be >= 1");
    int longest = std::max(img.width, img.height);
    if (longest <= target) return img;

    double scale = static_cast<double>(target) / longest;
    int out_w, out_h;
    if (img.width >= img.height) {
        out_w = target;
        out_h = std::max(1, static_cast<int>(std::lround(img.height * scale)));
    } else {
        out_h = target;
        out_w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
    }

    RasterImage out(out_w, out_h);
    double sx = static_cast<double>(img.width) / out_w;
    double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double src_y = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(src_y));
        double fy = src_y - y0;
        int y1 = std::clamp(y0 + 1, 0, img.height - 1);
        y0 = std::clamp(y0, 0, img.height - 1);
        for (int x = 0; x < out_w; ++x) {
            double src_x = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(src_x));
            double fx = src_x - x0;
            int x1 = std::clamp(x0 + 1, 0, img.width - 1);
            x0 = std::clamp(x0, 0, img.width - 1);
            const uint8_t* p00 = img.at(x0, y0);
            const uint8_t* p10 = img.at(x1, y0);
            const uint8_t* p01 = img.at(x0, y1);
            const uint8_t* p11 = img.at(x1, y1);
            uint8_t* dst = out.at(x, y);
            for (int c = 0; c < 3; ++c) {
                double v = (1 - fy) * ((1 - fx) * p00[c] + fx * p10[c]) +
                           fy * ((1 - fx) * p01[c] + fx * p11[c]);
                dst[c] = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

namespace {

inline double srgb_inverse_gamma(uint8_t v) {
    double c = v / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    constexpr double delta3 = delta * delta * delta;
    return t > delta3 ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

LabImage rgb_to_lab(const RasterImage& img) {
    // D65 reference white
    constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
    LabImage lab(img.width, img.height);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        double r = srgb_inverse_gamma(img.pixels[i * 3 + 0]);
        double g = srgb_inverse_gamma(img.pixels[i * 3 + 1]);
        double b = srgb_inverse_gamma(img.pixels[i * 3 + 2]);
        double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
        double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
        double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
        double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
        lab.L[i] = 116.0 * fy - 16.0;
        lab.A[i] = 500.0 * (fx - fy);
        lab.B[i] = 200.0 * (fy - fz);
    }
    return lab;
}

RealImage lab_plane_encoded(const LabImage& lab, LabPlane plane) {
    RealImage out(lab.width, lab.height);
    const std::vector<double>* src = nullptr;
    switch (plane) {
        case LabPlane::L: src = &lab.L; break;
        case LabPlane::A: src = &lab.A; break;
        case LabPlane::B: src = &lab.B; break;
    }
    for (size_t i = 0; i < src->size(); ++i) {
        double v = plane == LabPlane::L ? (*src)[i] * 255.0 / 100.0 : (*src)[i] + 128.0;
        out.values[i] = std::clamp(v, 0.0, 255.0);
    }
    return out;
}

GrayImage to_grayscale(const RasterImage& img) {
    GrayImage out(img.width, img.height);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        double y = 0.299 * img.pixels[i * 3 + 0] + 0.587 * img.pixels[i * 3 + 1] +
                   0.114 * img.pixels[i * 3 + 2];
        out.values[i] = static_cast<uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    }
    return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& w : k) w /= sum;
    return k;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) raise(ErrorCode::InvalidArgument, "blur sigma must be > 0");
    std::vector<double> k = gaussian_kernel(sigma);
    int radius = static_cast<int>(k.size() / 2);

    RealImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int xi = std::clamp(x + i, 0, img.width - 1);
                acc += k[i + radius] * img.at(xi, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int yi = std::clamp(y + i, 0, img.height - 1);
                acc += k[i + radius] * tmp.at(x, yi);
            }
            out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    }
    return out;
}

namespace {

// Maps (x, y) in the rotated frame back onto the source pixel.
template <typename Img, typename CopyFn>
Img rotate_quarter_impl(const Img& img, int turns, CopyFn copy) {
    if (turns < 1 || turns > 3)
        raise(ErrorCode::InvalidArgument, "rotation turns must be 1, 2 or 3");
    int w = img.width, h = img.height;
    Img out;
    if (turns == 2) {
        out = Img(w, h);
    } else {
        out = Img(h, w);
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int nx, ny;
            switch (turns) {
                case 1: nx = h - 1 - y; ny = x; break;          // 90 degrees
                case 2: nx = w - 1 - x; ny = h - 1 - y; break;  // 180 degrees
                default: nx = y; ny = w - 1 - x; break;         // 270 degrees
            }
            copy(img, x, y, out, nx, ny);
        }
    }
    return out;
}

}  // namespace

RasterImage rotate_quarter(const RasterImage& img, int turns) {
    return rotate_quarter_impl(img, turns,
                               [](const RasterImage& src, int x, int y, RasterImage& dst, int nx,
                                  int ny) {
                                   const uint8_t* s = src.at(x, y);
                                   uint8_t* d = dst.at(nx, ny);
                                   d[0] = s[0];
                                   d[1] = s[1];
                                   d[2] = s[2];
                               });
}

GrayImage rotate_quarter(const GrayImage& img, int turns) {
    return rotate_quarter_impl(
        img, turns,
        [](const GrayImage& src, int x, int y, GrayImage& dst, int nx, int ny) {
            dst.at(nx, ny) = src.at(x, y);
        });
}

BinaryMask rotate_quarter(const BinaryMask& mask, int turns) {
    return rotate_quarter_impl(
        mask, turns,
        [](const BinaryMask& src, int x, int y, BinaryMask& dst, int nx, int ny) {
            dst.set(nx, ny, src.at(x, y));
        });
}

}  // namespace leafscope
