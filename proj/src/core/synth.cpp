#include "synth.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace leafscope::corpus {

namespace {

struct SynthRng {
    uint64_t state;
    explicit SynthRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    // Box-Muller; good enough for pixel noise and fully deterministic.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1 + 1e-300)) * std::cos(2.0 * M_PI * u2);
    }
};

inline uint8_t clamp_u8(double v) {
    return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void validate(const LeafSpec& s, int size) {
    if (size < 64) raise(ErrorCode::InvalidArgument, "synthetic leaf size must be >= 64");
    if (s.ellipse_ratio < 1.0 || s.ellipse_ratio > 6.0)
        raise(ErrorCode::InvalidArgument, "ellipse_ratio out of [1,6]");
    if (s.lobe_count < 0 || s.lobe_count > 12)
        raise(ErrorCode::InvalidArgument, "lobe_count out of [0,12]");
    if (s.lobe_depth < 0.0 || s.lobe_depth > 0.4)
        raise(ErrorCode::InvalidArgument, "lobe_depth out of [0,0.4]");
    if (s.serration_amplitude < 0.0 || s.serration_amplitude > 4.0)
        raise(ErrorCode::InvalidArgument, "serration_amplitude out of [0,4]");
    if (s.stem_length < 0.0 || s.stem_length > 60.0)
        raise(ErrorCode::InvalidArgument, "stem_length out of [0,60]");
    if (s.stem_width < 0.0 || s.stem_width > 8.0)
        raise(ErrorCode::InvalidArgument, "stem_width out of [0,8]");
}

}  // namespace

SynthLeaf synth_leaf(const LeafSpec& spec, int size, uint64_t seed) {
    validate(spec, size);
    SynthRng rng(seed);
    double serration_phase = rng.uniform() * 2.0 * M_PI;
    constexpr int kSerrationFreq = 31;

    double cx = size / 2.0, cy = size / 2.0;
    // Semi-axes sized so lobes and serration stay inside the frame.
    double a = 0.40 * size / (1.0 + spec.lobe_depth);
    double b = a / spec.ellipse_ratio;

    auto radius_at = [&](double theta) {
        double ca = b * std::cos(theta), sa = a * std::sin(theta);
        double ellipse = a * b / std::sqrt(ca * ca + sa * sa);
        double lobes = 1.0 + spec.lobe_depth * std::cos(spec.lobe_count * theta);
        double serration =
            spec.serration_amplitude * std::sin(kSerrationFreq * theta + serration_phase);
        return ellipse * lobes + serration;
    };

    SynthLeaf out;
    out.image = RasterImage(size, size);
    out.ground_truth = BinaryMask(size, size);

    // Stem rectangle hangs from the blade's bottom edge (theta = +pi/2,
    // y growing down).
    double stem_top = cy + radius_at(M_PI / 2.0) - 2.0;
    double stem_bottom = std::min<double>(size - 2.0, stem_top + spec.stem_length);
    double stem_half = spec.stem_width / 2.0;
    bool has_stem = spec.stem_width > 0.0 && spec.stem_length > 0.0;

    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double dx = x - cx, dy = y - cy;
            double rho = std::sqrt(dx * dx + dy * dy);
            double theta = std::atan2(dy, dx);
            bool blade = rho <= radius_at(theta);
            bool stem = has_stem && !blade && std::abs(x - cx) <= stem_half && y >= stem_top &&
                        y <= stem_bottom;

            uint8_t* px = out.image.at(x, y);
            if (blade) {
                out.ground_truth.set(x, y, true);
                // Gentle vein-like shading plus pixel noise keeps texture
                // statistics non-degenerate.
                double shade = 12.0 * std::sin(0.35 * x) * std::sin(0.35 * y);
                double n = 4.0 * rng.gaussian();
                px[0] = clamp_u8(58.0 + shade + n);
                px[1] = clamp_u8(112.0 + shade + n);
                px[2] = clamp_u8(42.0 + shade + n);
            } else if (stem) {
                double n = 4.0 * rng.gaussian();
                px[0] = clamp_u8(96.0 + n);
                px[1] = clamp_u8(86.0 + n);
                px[2] = clamp_u8(44.0 + n);
            } else {
                double n = 3.0 * rng.gaussian();
                px[0] = clamp_u8(246.0 + n);
                px[1] = clamp_u8(246.0 + n);
                px[2] = clamp_u8(244.0 + n);
            }
        }
    }
    return out;
}

}  // namespace leafscope::corpus
