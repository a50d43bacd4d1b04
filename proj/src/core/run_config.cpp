#include "run_config.hpp"

#include <algorithm>
#include <fstream>

#include "error.hpp"

namespace leafscope::config {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::Format, "config key '" + key + "': '" + value + "' is not a number");
    }
}

int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int64_t v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::Format, "config key '" + key + "': '" + value + "' is not an integer");
    }
}

uint64_t parse_uint(const std::string& key, const std::string& value) {
    int64_t v = parse_int(key, value);
    if (v < 0) raise(ErrorCode::Format, "config key '" + key + "' must be non-negative");
    return static_cast<uint64_t>(v);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "seed") {
        seed = parse_uint(key, value);
        segmentation.rng_seed = seed;
        train.rng_seed = seed;
    } else if (key == "resize_target") {
        segmentation.resize_target = static_cast<int>(parse_int(key, value));
    } else if (key == "a_threshold") {
        segmentation.a_threshold = parse_double(key, value);
    } else if (key == "kmeans_iterations") {
        segmentation.kmeans_iterations = static_cast<int>(parse_int(key, value));
    } else if (key == "blur_sigma") {
        segmentation.blur_sigma = parse_double(key, value);
    } else if (key == "opening_kernel") {
        segmentation.opening_kernel = static_cast<int>(parse_int(key, value));
    } else if (key == "verdict_wiped_out") {
        segmentation.wiped_out_below = parse_double(key, value);
    } else if (key == "verdict_residue_area") {
        segmentation.residue_area_above = parse_double(key, value);
    } else if (key == "verdict_residue_border") {
        segmentation.residue_border_above = parse_double(key, value);
    } else if (key == "glcm_levels") {
        features.glcm_levels = static_cast<int>(parse_int(key, value));
    } else if (key == "harris_k") {
        features.harris_k = parse_double(key, value);
    } else if (key == "harris_rel_threshold") {
        features.harris_rel_threshold = parse_double(key, value);
    } else if (key == "base_lr") {
        train.base_lr = parse_double(key, value);
    } else if (key == "lr_gamma") {
        train.gamma = parse_double(key, value);
    } else if (key == "lr_step") {
        train.step = parse_uint(key, value);
    } else if (key == "momentum") {
        train.momentum = parse_double(key, value);
    } else if (key == "weight_decay") {
        train.weight_decay = parse_double(key, value);
    } else if (key == "batch_size") {
        train.batch_size = static_cast<size_t>(parse_uint(key, value));
    } else if (key == "max_iterations") {
        train.max_iterations = parse_uint(key, value);
    } else if (key == "hinge_margin") {
        train.hinge_margin = parse_double(key, value);
    } else if (key == "c_positive_weight") {
        train.c_positive_weight = parse_double(key, value);
    } else if (key == "ablate_combos") {
        ablate_combos = value;
    } else {
        raise(ErrorCode::Format, "unknown config key '" + key + "'");
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "config file not found: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::Format,
                  path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        try {
            set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const Error& e) {
            raise(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate();
}

void RunConfig::validate() const {
    if (segmentation.resize_target < 1)
        raise(ErrorCode::InvalidArgument, "resize_target must be >= 1");
    if (segmentation.kmeans_iterations < 1)
        raise(ErrorCode::InvalidArgument, "kmeans_iterations must be >= 1");
    if (segmentation.blur_sigma <= 0) raise(ErrorCode::InvalidArgument, "blur_sigma must be > 0");
    if (segmentation.opening_kernel < 1 || segmentation.opening_kernel % 2 == 0)
        raise(ErrorCode::InvalidArgument, "opening_kernel must be odd and positive");
    if (features.glcm_levels < 1 || features.glcm_levels > 256)
        raise(ErrorCode::InvalidArgument, "glcm_levels must be in [1,256]");
    train.validate();
}

}  // namespace leafscope::config
