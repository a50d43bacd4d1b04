#pragma once

#include <cstdint>
#include <utility>

#include "raster.hpp"

namespace leafscope::corpus {

// Parametric leaf silhouette: an ellipse modulated by lobes and serration,
// r(theta) = ellipse(theta) * (1 + lobe_depth*cos(lobe_count*theta))
//            + serration ripple,
// rendered leaf-green on a near-white noisy background with a stem
// rectangle attached at the bottom.
struct LeafSpec {
    double ellipse_ratio = 1.5;       // semi-major / semi-minor, in [1, 6]
    int lobe_count = 0;               // [0, 12]
    double lobe_depth = 0.0;          // [0, 0.4]
    double serration_amplitude = 0.0; // pixels, [0, 4]
    double stem_length = 24.0;        // pixels, [0, 60]
    double stem_width = 5.0;          // pixels, [0, 8]
};

struct SynthLeaf {
    RasterImage image;
    BinaryMask ground_truth;  // blade only; the stem is not part of it
};

// Deterministic per (spec, size, seed). The ground-truth mask comes from
// the same radial function that is rendered.
SynthLeaf synth_leaf(const LeafSpec& spec, int size, uint64_t seed);

}  // namespace leafscope::corpus
