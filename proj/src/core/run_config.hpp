#pragma once

#include <string>

#include "features.hpp"
#include "learn.hpp"
#include "segmentation.hpp"

namespace leafscope::config {

// Everything tunable in one place, loadable from a flat `key = value` file.
// Unknown keys are rejected.
struct RunConfig {
    uint64_t seed = 0;
    seg::SegmentationConfig segmentation;
    feat::FeatureConfig features;
    learn::TrainConfig train;
    std::string ablate_combos = "A,B,C,D,AB,AC,AD,ABC,ABD,ACD,ABCD";

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    void validate() const;
};

}  // namespace leafscope::config
